/** Normalization view: corrected text with highlighted spans and popups
 * describing each token before and after normalization.
 */
import { ApiClient, ApiError, GenerationGate } from "../api";
import { byteSlice, clear, el, showErrorBanner } from "../dom";
import type { ViewState } from "../state";
import type { Annotation, NormalizeResponse } from "../types";

function popupFor(annotation: Annotation): HTMLElement {
  const rows = annotation.candidates.map((candidate) =>
    el("tr", {}, [
      el("td", {}, [candidate.word]),
      el("td", {}, [String(candidate.distance)]),
      el("td", {}, [candidate.coherency.toFixed(3)]),
    ]),
  );
  return el("div", { class: "popup", role: "tooltip" }, [
    el("p", { class: "popup-change" }, [
      el("del", {}, [annotation.original]),
      " → ",
      el("ins", {}, [annotation.replacement ?? annotation.original]),
    ]),
    el("table", { class: "candidates" }, [
      el("thead", {}, [
        el("tr", {}, [el("th", {}, ["candidate"]), el("th", {}, ["d"]), el("th", {}, ["coherency"])]),
      ]),
      el("tbody", {}, rows),
    ]),
  ]);
}

/** Rebuild the input text inline, marking each annotated span. */
export function renderAnnotatedText(inputText: string, response: NormalizeResponse): HTMLElement {
  const container = el("div", { class: "annotated-text" });
  let cursor = 0;
  for (const annotation of response.annotations) {
    if (annotation.start > cursor) {
      container.append(byteSlice(inputText, cursor, annotation.start));
    }
    if (annotation.status === "normalized") {
      const mark = el(
        "mark",
        { class: "normalized", "data-original": annotation.original, tabindex: "0" },
        [annotation.replacement ?? annotation.original],
      );
      mark.append(popupFor(annotation));
      container.append(mark);
    } else if (annotation.status === "unknown") {
      container.append(
        el("span", { class: "unknown", title: "no dictionary candidates" }, [annotation.original]),
      );
    } else {
      container.append(annotation.original);
    }
    cursor = annotation.end;
  }
  const bytes = new TextEncoder().encode(inputText);
  if (cursor < bytes.length) container.append(byteSlice(inputText, cursor, bytes.length));
  return container;
}

export class NormalizeView {
  private gate = new GenerationGate();
  private results!: HTMLElement;

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
    const textArea = el("textarea", { id: "normalize-text", rows: "4" });
    textArea.value = this.state.text;
    const go = el("button", { type: "button", class: "primary" }, ["normalize"]);
    go.addEventListener("click", () => {
      this.patch({ text: textArea.value });
      this.refresh();
    });
    this.results = el("div", { class: "results" });
    this.root.append(
      el("div", { class: "controls column" }, [
        el("label", { for: "normalize-text" }, ["input text"]),
        textArea,
        go,
      ]),
      this.results,
    );
    if (this.state.text) this.refresh();
  }

  refresh(): void {
    const { text, k, d } = this.state;
    if (!text) return;
    const generation = this.gate.next();
    this.results.classList.add("pending");
    this.api
      .normalize(text, k, d, 5)
      .then((response) => {
        if (!this.gate.isCurrent(generation)) return;
        this.results.classList.remove("pending");
        clear(this.results);
        const changed = response.annotations.filter((a) => a.status === "normalized").length;
        const unknown = response.annotations.filter((a) => a.status === "unknown").length;
        this.results.append(
          el("p", { class: "result-meta" }, [
            `${changed} token(s) normalized, ${unknown} unknown`,
          ]),
          renderAnnotatedText(text, response),
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
