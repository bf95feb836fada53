/** ViewState <-> URL hash. Every view is deep-linkable: the hash encodes
 * the active view and its parameters, and decoding a hash reproduces the
 * exact view. Unknown keys are ignored; missing keys fall back to defaults.
 */

export type View = "lookup" | "normalize" | "perturb" | "timeline";

export interface ViewState {
  view: View;
  token: string;
  k: number;
  d: number;
  text: string;
  ratio: number;
  seed: number;
  word: string;
  from: string;
  to: string;
  granularity: "day" | "week" | "month";
}

export const DEFAULT_STATE: ViewState = {
  view: "lookup",
  token: "",
  k: 1,
  d: 3,
  text: "",
  ratio: 0.25,
  seed: 1,
  word: "",
  from: "",
  to: "",
  granularity: "day",
};

const VIEWS: View[] = ["lookup", "normalize", "perturb", "timeline"];
const GRANULARITIES = ["day", "week", "month"] as const;

export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  for (const [key, value] of Object.entries(state)) {
    const fallback = DEFAULT_STATE[key as keyof ViewState];
    if (value !== fallback) params.set(key, String(value));
  }
  params.set("view", state.view);
  return params.toString();
}

function toNumber(value: string | null, fallback: number): number {
  if (value === null) return fallback;
  const parsed = Number(value);
  return Number.isFinite(parsed) ? parsed : fallback;
}

export function decodeState(hash: string): ViewState {
  const params = new URLSearchParams(hash.replace(/^#/, ""));
  const view = params.get("view");
  const granularity = params.get("granularity");
  return {
    view: VIEWS.includes(view as View) ? (view as View) : DEFAULT_STATE.view,
    token: params.get("token") ?? DEFAULT_STATE.token,
    k: toNumber(params.get("k"), DEFAULT_STATE.k),
    d: toNumber(params.get("d"), DEFAULT_STATE.d),
    text: params.get("text") ?? DEFAULT_STATE.text,
    ratio: toNumber(params.get("ratio"), DEFAULT_STATE.ratio),
    seed: toNumber(params.get("seed"), DEFAULT_STATE.seed),
    word: params.get("word") ?? DEFAULT_STATE.word,
    from: params.get("from") ?? DEFAULT_STATE.from,
    to: params.get("to") ?? DEFAULT_STATE.to,
    granularity: GRANULARITIES.includes(granularity as never)
      ? (granularity as ViewState["granularity"])
      : DEFAULT_STATE.granularity,
  };
}

export function readStateFromLocation(): ViewState {
  return decodeState(window.location.hash);
}

export function writeStateToLocation(state: ViewState): void {
  const encoded = encodeState(state);
  if (window.location.hash.replace(/^#/, "") !== encoded) {
    window.history.replaceState(null, "", `#${encoded}`);
  }
}
