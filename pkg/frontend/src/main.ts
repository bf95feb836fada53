/** App shell: tab navigation, settings pane (bearer token), and hash-based
 * routing so every view state is deep-linkable and reload-stable.
 */
import { ApiClient, getStoredToken, storeToken } from "./api";
import { clear, el } from "./dom";
import {
  readStateFromLocation,
  writeStateToLocation,
  type View,
  type ViewState,
} from "./state";
import { LookupView } from "./views/lookup";
import { NormalizeView } from "./views/normalize";
import { PerturbView } from "./views/perturb";
import { TimelineView } from "./views/timeline";

const VIEW_LABELS: Record<View, string> = {
  lookup: "Look Up",
  normalize: "Normalize",
  perturb: "Perturb",
  timeline: "Timeline",
};

type AnyView = LookupView | NormalizeView | PerturbView | TimelineView;

export class App {
  private state: ViewState;
  private viewHost!: HTMLElement;
  private nav!: HTMLElement;
  private current: AnyView | null = null;

  constructor(
    private root: HTMLElement,
    private api: ApiClient = new ApiClient(),
  ) {
    this.state = readStateFromLocation();
  }

  mount(): void {
    clear(this.root);
    this.nav = el("nav", { class: "tabs" });
    for (const view of Object.keys(VIEW_LABELS) as View[]) {
      const tab = el("button", { type: "button", class: "tab", "data-view": view }, [
        VIEW_LABELS[view],
      ]);
      tab.addEventListener("click", () => {
        this.setState({ view });
        this.renderView();
      });
      this.nav.append(tab);
    }
    const settings = this.buildSettings();
    this.viewHost = el("main", { class: "view-host" });
    this.root.append(el("header", { class: "topbar" }, [el("h1", {}, ["cryptext console"]), this.nav, settings]));
    this.root.append(this.viewHost);
    window.addEventListener("hashchange", () => {
      this.state = readStateFromLocation();
      this.renderView();
    });
    this.renderView();
  }

  private buildSettings(): HTMLElement {
    const tokenInput = el("input", {
      id: "settings-token",
      type: "password",
      placeholder: "API token",
      value: getStoredToken(),
    });
    tokenInput.addEventListener("change", () => storeToken(tokenInput.value.trim()));
    const details = el("details", { class: "settings" }, [
      el("summary", {}, ["settings"]),
      el("label", { for: "settings-token" }, ["bearer token (session only)"]),
      tokenInput,
    ]);
    return details;
  }

  setState(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    writeStateToLocation(this.state);
  }

  renderView(): void {
    for (const tab of this.nav.querySelectorAll(".tab")) {
      tab.classList.toggle("active", tab.getAttribute("data-view") === this.state.view);
    }
    clear(this.viewHost);
    const host = el("section", { class: `view view-${this.state.view}` });
    this.viewHost.append(host);
    const onChange = (patch: Partial<ViewState>) => this.setState(patch);
    switch (this.state.view) {
      case "lookup":
        this.current = new LookupView(host, this.api, this.state, onChange);
        break;
      case "normalize":
        this.current = new NormalizeView(host, this.api, this.state, onChange);
        break;
      case "perturb":
        this.current = new PerturbView(host, this.api, this.state, onChange);
        break;
      case "timeline":
        this.current = new TimelineView(host, this.api, this.state, onChange);
        break;
    }
    this.current.mount();
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  new App(document.getElementById("app") as HTMLElement).mount();
}
