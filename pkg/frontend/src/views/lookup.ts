/** Look Up view: query token + k/d controls over the word cloud. */
import { ApiClient, ApiError, GenerationGate } from "../api";
import { clear, el, showErrorBanner } from "../dom";
import type { ViewState } from "../state";
import { renderCloud } from "./cloud";

export class LookupView {
  private gate = new GenerationGate();
  private results!: HTMLElement;
  private meta!: HTMLElement;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private state: ViewState,
    private onStateChange: (patch: Partial<ViewState>) => void,
  ) {}

  private patch(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    this.onStateChange(patch);
  }

  mount(): void {
    clear(this.root);
    const tokenInput = el("input", {
      id: "lookup-token",
      type: "text",
      value: this.state.token,
      placeholder: "token, e.g. republicans",
    });
    const kSelect = el("select", { id: "lookup-k" });
    for (const level of [0, 1, 2]) {
      const option = el("option", { value: String(level) }, [`k=${level}`]);
      if (level === this.state.k) option.selected = true;
      kSelect.append(option);
    }
    const dSlider = el("input", {
      id: "lookup-d",
      type: "range",
      min: "0",
      max: "5",
      step: "1",
      value: String(this.state.d),
    });
    const dLabel = el("span", { class: "d-label" }, [`d=${this.state.d}`]);
    const go = el("button", { type: "button", class: "primary" }, ["look up"]);

    const submit = () => {
      this.patch({
        token: tokenInput.value.trim(),
        k: Number(kSelect.value),
        d: Number(dSlider.value),
      });
      this.refresh();
    };
    go.addEventListener("click", submit);
    tokenInput.addEventListener("keydown", (event) => {
      if (event.key === "Enter") submit();
    });
    kSelect.addEventListener("change", submit);
    dSlider.addEventListener("change", submit);
    dSlider.addEventListener("input", () => {
      dLabel.textContent = `d=${dSlider.value}`;
    });

    this.meta = el("p", { class: "result-meta" });
    this.results = el("div", { class: "results" });
    this.root.append(
      el("div", { class: "controls" }, [
        el("label", { for: "lookup-token" }, ["token"]),
        tokenInput,
        kSelect,
        dLabel,
        dSlider,
        go,
      ]),
      this.meta,
      this.results,
    );
    if (this.state.token) this.refresh();
  }

  refresh(): void {
    const { token, k, d } = this.state;
    if (!token) return;
    const generation = this.gate.next();
    this.results.classList.add("pending");
    this.api
      .lookup(token, k, d)
      .then((response) => {
        if (!this.gate.isCurrent(generation)) return;
        this.results.classList.remove("pending");
        this.meta.textContent = `${response.members.length} member(s) in bucket ${response.key} (k=${response.k})`;
        this.meta.dataset.params = `token=${token}&k=${k}&d=${d}`;
        renderCloud(this.results, response.members, (raw) => {
          this.patch({ token: raw });
          this.mount();
        });
      })
      .catch((error: unknown) => {
        if (!this.gate.isCurrent(generation)) return;
        this.results.classList.remove("pending");
        const apiError = error instanceof ApiError ? error : new ApiError("NetworkError", String(error), 0);
        showErrorBanner(this.root, apiError.code, apiError.message);
      });
  }

  update(state: ViewState): void {
    this.state = state;
    this.mount();
  }
}
