/** Social-listening view: per-variant frequency timelines plus a
 * sentiment chart when the service has a lexicon configured.
 */
import { ApiClient, ApiError, GenerationGate } from "../api";
import { clear, el, showErrorBanner } from "../dom";
import type { ViewState } from "../state";
import type { TimelineResponse } from "../types";
import { renderLineChart, type Series } from "./chart";

export class TimelineView {
  private gate = new GenerationGate();
  private results!: HTMLElement;
  private enabledVariants: Set<string> | null = null;
  private lastResponse: TimelineResponse | null = null;

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
    const wordInput = el("input", { id: "timeline-word", type: "text", value: this.state.word });
    const fromInput = el("input", { id: "timeline-from", type: "text", value: this.state.from, placeholder: "2021-11-01T00:00:00Z" });
    const toInput = el("input", { id: "timeline-to", type: "text", value: this.state.to, placeholder: "2021-12-01T00:00:00Z" });
    const granularity = el("select", { id: "timeline-granularity" });
    for (const g of ["day", "week", "month"]) {
      const option = el("option", { value: g }, [g]);
      if (g === this.state.granularity) option.selected = true;
      granularity.append(option);
    }
    const go = el("button", { type: "button", class: "primary" }, ["fetch timeline"]);
    const submit = () => {
      this.enabledVariants = null;
      this.patch({
        word: wordInput.value.trim(),
        from: fromInput.value.trim(),
        to: toInput.value.trim(),
        granularity: granularity.value as ViewState["granularity"],
      });
      this.refresh();
    };
    go.addEventListener("click", submit);
    granularity.addEventListener("change", submit);

    this.results = el("div", { class: "results" });
    this.root.append(
      el("div", { class: "controls" }, [
        el("label", { for: "timeline-word" }, ["word"]),
        wordInput,
        el("label", { for: "timeline-from" }, ["from"]),
        fromInput,
        el("label", { for: "timeline-to" }, ["to"]),
        toInput,
        granularity,
        go,
      ]),
      this.results,
    );
    if (this.state.word && this.state.from && this.state.to) this.refresh();
  }

  refresh(): void {
    const { word, from, to, granularity, k, d } = this.state;
    if (!word || !from || !to) return;
    const generation = this.gate.next();
    this.results.classList.add("pending");
    this.api
      .timeline(word, from, to, granularity, k, d)
      .then((response) => {
        if (!this.gate.isCurrent(generation)) return;
        this.results.classList.remove("pending");
        this.lastResponse = response;
        if (this.enabledVariants === null) this.enabledVariants = new Set(response.variants);
        this.renderResults();
      })
      .catch((error: unknown) => {
        if (!this.gate.isCurrent(generation)) return;
        this.results.classList.remove("pending");
        const apiError = error instanceof ApiError ? error : new ApiError("NetworkError", String(error), 0);
        showErrorBanner(this.root, apiError.code, apiError.message);
      });
  }

  private renderResults(): void {
    const response = this.lastResponse;
    if (!response) return;
    clear(this.results);
    if (response.warning) {
      this.results.append(el("p", { class: "warning" }, [response.warning]));
    }
    if (response.buckets.length === 0) {
      this.results.append(el("p", { class: "empty-state" }, ["no data in range"]));
      return;
    }
    const toggles = el("div", { class: "variant-toggles" });
    for (const variant of response.variants) {
      const checkbox = el("input", { type: "checkbox", id: `variant-${variant}` });
      checkbox.checked = this.enabledVariants?.has(variant) ?? true;
      checkbox.addEventListener("change", () => {
        if (checkbox.checked) this.enabledVariants?.add(variant);
        else this.enabledVariants?.delete(variant);
        this.renderResults();
      });
      toggles.append(
        el("label", { class: "variant-toggle", for: `variant-${variant}` }, [checkbox, variant]),
      );
    }
    const labels = response.buckets.map((b) => b.bucket_start);
    const series: Series[] = response.variants
      .filter((variant) => this.enabledVariants?.has(variant))
      .map((variant) => ({
        name: variant,
        values: response.buckets.map((b) => b.counts[variant] ?? 0),
      }));
    series.push({ name: "documents", values: response.buckets.map((b) => b.total) });

    this.results.append(
      el("p", { class: "result-meta" }, [
        `${response.documents_scanned} documents scanned, ` +
          `${response.documents_skipped} skipped, ${response.buckets.length} ${response.granularity} bucket(s)`,
      ]),
      toggles,
      el("h3", {}, ["frequency"]),
      renderLineChart(labels, series, { className: "chart frequency" }),
    );
    const sentiments = response.buckets.map((b) => b.mean_sentiment);
    if (sentiments.some((s) => s !== null)) {
      this.results.append(
        el("h3", {}, ["sentiment"]),
        renderLineChart(labels, [{ name: "mean sentiment", values: sentiments }], {
          className: "chart sentiment",
          min: -1,
          max: 1,
        }),
      );
    }
  }

  update(state: ViewState): void {
    this.state = state;
    this.mount();
  }
}
