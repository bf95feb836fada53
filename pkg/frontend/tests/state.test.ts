/** Deep-link contract: ViewState survives the URL hash round trip and the
 * app reproduces a view from a loaded hash. */
import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { App } from "../src/main";
import { decodeState, DEFAULT_STATE, encodeState, type ViewState } from "../src/state";
import { flush, MockServer } from "./mockApi";

beforeEach(() => {
  document.body.innerHTML = "";
  window.location.hash = "";
  window.sessionStorage.clear();
});

describe("view state codec", () => {
  it("round-trips every field", () => {
    const state: ViewState = {
      view: "perturb",
      token: "republicans",
      k: 2,
      d: 1,
      text: "the dirty republicans",
      ratio: 0.5,
      seed: 42,
      word: "vaccine",
      from: "2021-11-01T00:00:00Z",
      to: "2021-12-01T00:00:00Z",
      granularity: "week",
    };
    expect(decodeState(encodeState(state))).toEqual(state);
  });

  it("fills defaults for missing or invalid fields", () => {
    expect(decodeState("")).toEqual(DEFAULT_STATE);
    const decoded = decodeState("view=nope&k=banana&granularity=hourly");
    expect(decoded.view).toBe("lookup");
    expect(decoded.k).toBe(DEFAULT_STATE.k);
    expect(decoded.granularity).toBe("day");
  });

  it("keeps the hash compact by omitting defaults", () => {
    const encoded = encodeState({ ...DEFAULT_STATE, token: "amazon" });
    expect(encoded).toBe("token=amazon&view=lookup");
  });
});

describe("deep links", () => {
  it("reload reproduces the encoded view state", async () => {
    window.location.hash = "#view=perturb&text=the%20dirty%20republicans&ratio=0.34&seed=7";
    const server = new MockServer();
    const root = document.createElement("div");
    document.body.append(root);
    const app = new App(root, new ApiClient("", server.fetch));
    app.mount();
    await flush();
    expect(root.querySelector(".tab.active")?.getAttribute("data-view")).toBe("perturb");
    expect(root.querySelector<HTMLTextAreaElement>("#perturb-text")!.value).toBe(
      "the dirty republicans",
    );
    expect(root.querySelector<HTMLInputElement>("#perturb-seed")!.value).toBe("7");
    expect(root.querySelector<HTMLInputElement>("#perturb-ratio")!.value).toBe("0.34");
    // the view fetched with exactly the deep-linked parameters
    expect(server.calls.some((c) => c.startsWith("POST /api/v1/perturb"))).toBe(true);
  });

  it("hash changes re-route to the encoded view", async () => {
    const server = new MockServer();
    const root = document.createElement("div");
    document.body.append(root);
    const app = new App(root, new ApiClient("", server.fetch));
    app.mount();
    await flush();
    expect(root.querySelector(".tab.active")?.getAttribute("data-view")).toBe("lookup");
    window.location.hash = "#view=timeline&word=the&from=2021-11-01T00:00:00Z&to=2021-11-15T00:00:00Z&d=1";
    window.dispatchEvent(new HashChangeEvent("hashchange"));
    await flush();
    expect(root.querySelector(".tab.active")?.getAttribute("data-view")).toBe("timeline");
    expect(root.querySelector<HTMLInputElement>("#timeline-word")!.value).toBe("the");
  });

  it("parameter edits are written back into the hash", async () => {
    window.location.hash = "#view=lookup&token=republicans&d=1";
    const server = new MockServer();
    const root = document.createElement("div");
    document.body.append(root);
    const app = new App(root, new ApiClient("", server.fetch));
    app.mount();
    await flush();
    const slider = root.querySelector<HTMLInputElement>("#lookup-d")!;
    slider.value = "3";
    slider.dispatchEvent(new Event("change"));
    await flush();
    expect(window.location.hash).toContain("token=republicans");
    expect(window.location.hash).not.toContain("d=1");
  });
});
