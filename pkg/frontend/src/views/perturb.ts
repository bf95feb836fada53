/** Perturbation view: ratio slider with presets, seed control with
 * re-roll, highlighted replacements, achieved/requested counters, and
 * copy-to-clipboard of the perturbed output.
 */
import { ApiClient, ApiError, GenerationGate } from "../api";
import { byteSlice, clear, el, showErrorBanner } from "../dom";
import type { ViewState } from "../state";
import type { PerturbResponse } from "../types";

export const RATIO_PRESETS = [0.15, 0.25, 0.5];

/** Rebuild the input text, marking replaced spans with their new tokens. */
export function renderPerturbedText(inputText: string, response: PerturbResponse): HTMLElement {
  const container = el("div", { class: "annotated-text" });
  let cursor = 0;
  for (const repl of response.replacements) {
    if (repl.start > cursor) container.append(byteSlice(inputText, cursor, repl.start));
    container.append(
      el(
        "mark",
        {
          class: "perturbed",
          "data-original": repl.original,
          title: `${repl.original} → ${repl.replacement} (bucket of ${repl.bucket_size})`,
        },
        [repl.replacement],
      ),
    );
    cursor = repl.end;
  }
  const bytes = new TextEncoder().encode(inputText);
  if (cursor < bytes.length) container.append(byteSlice(inputText, cursor, bytes.length));
  return container;
}

export class PerturbView {
  private gate = new GenerationGate();
  private results!: HTMLElement;
  private lastOutput = "";

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
    const textArea = el("textarea", { id: "perturb-text", rows: "4" });
    textArea.value = this.state.text;
    const ratioSlider = el("input", {
      id: "perturb-ratio",
      type: "range",
      min: "0",
      max: "1",
      step: "0.01",
      value: String(this.state.ratio),
    });
    const ratioLabel = el("span", { class: "ratio-label" }, [`${Math.round(this.state.ratio * 100)}%`]);
    ratioSlider.addEventListener("input", () => {
      ratioLabel.textContent = `${Math.round(Number(ratioSlider.value) * 100)}%`;
    });
    const presets = RATIO_PRESETS.map((preset) => {
      const button = el("button", { type: "button", class: "preset", "data-ratio": String(preset) }, [
        `${Math.round(preset * 100)}%`,
      ]);
      button.addEventListener("click", () => {
        ratioSlider.value = String(preset);
        ratioLabel.textContent = `${Math.round(preset * 100)}%`;
        submit();
      });
      return button;
    });
    const seedInput = el("input", { id: "perturb-seed", type: "number", value: String(this.state.seed) });
    const reroll = el("button", { type: "button", "data-action": "reroll" }, ["re-roll"]);
    reroll.addEventListener("click", () => {
      seedInput.value = String(Number(seedInput.value) + 1);
      submit();
    });
    const go = el("button", { type: "button", class: "primary" }, ["perturb"]);
    const copy = el("button", { type: "button", "data-action": "copy" }, ["copy output"]);
    copy.addEventListener("click", () => {
      if (this.lastOutput && navigator.clipboard) void navigator.clipboard.writeText(this.lastOutput);
    });

    const submit = () => {
      this.patch({
        text: textArea.value,
        ratio: Number(ratioSlider.value),
        seed: Number(seedInput.value),
      });
      this.refresh();
    };
    go.addEventListener("click", submit);

    this.results = el("div", { class: "results" });
    this.root.append(
      el("div", { class: "controls column" }, [
        el("label", { for: "perturb-text" }, ["input text"]),
        textArea,
        el("div", { class: "controls" }, [
          el("label", { for: "perturb-ratio" }, ["ratio"]),
          ratioSlider,
          ratioLabel,
          ...presets,
          el("label", { for: "perturb-seed" }, ["seed"]),
          seedInput,
          reroll,
          go,
          copy,
        ]),
      ]),
      this.results,
    );
    if (this.state.text) this.refresh();
  }

  refresh(): void {
    const { text, ratio, seed, k, d } = this.state;
    if (!text) return;
    const generation = this.gate.next();
    this.results.classList.add("pending");
    this.api
      .perturb(text, ratio, seed, k, d)
      .then((response) => {
        if (!this.gate.isCurrent(generation)) return;
        this.results.classList.remove("pending");
        this.lastOutput = response.output_text;
        clear(this.results);
        this.results.append(
          el("p", { class: "result-meta", "data-achieved": String(response.achieved) }, [
            `replaced ${response.achieved} of ${response.requested} requested ` +
              `(${response.eligible} eligible, generator ${response.generator})`,
          ]),
          renderPerturbedText(text, response),
        );
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
