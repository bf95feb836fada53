/** Look Up view contract: one cloud element per member, font size
 * monotone in count, click-to-requery, error banners. */
import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { DEFAULT_STATE, type ViewState } from "../src/state";
import { LookupView } from "../src/views/lookup";
import { fontSizeFor, renderCloud, SPHERE_CUTOFF } from "../src/views/cloud";
import { flush, LOOKUP_D3, LOOKUP_WEIGHTED, MockServer } from "./mockApi";

function setup(state: Partial<ViewState>) {
  const server = new MockServer();
  const api = new ApiClient("", server.fetch);
  const root = document.createElement("div");
  document.body.append(root);
  const patches: Partial<ViewState>[] = [];
  const view = new LookupView(root, api, { ...DEFAULT_STATE, ...state }, (patch) => patches.push(patch));
  view.mount();
  return { server, root, view, patches };
}

beforeEach(() => {
  document.body.innerHTML = "";
  window.sessionStorage.clear();
});

describe("lookup view", () => {
  it("renders one cloud element per member", async () => {
    const { root } = setup({ token: "republicans", k: 1, d: 3 });
    await flush();
    const words = root.querySelectorAll(".cloud-word");
    expect(words.length).toBe(LOOKUP_D3.members.length);
    const raws = [...words].map((w) => w.getAttribute("data-raw"));
    expect(raws).toEqual(LOOKUP_D3.members.map((m) => m.raw));
  });

  it("uses font sizes monotone in member count", async () => {
    const { root } = setup({ token: "dirty", k: 1, d: 3 });
    await flush();
    const words = [...root.querySelectorAll<HTMLElement>(".cloud-word")];
    const byRaw = new Map(words.map((w) => [w.getAttribute("data-raw"), parseFloat(w.style.fontSize)]));
    const sorted = [...LOOKUP_WEIGHTED.members].sort((a, b) => a.count - b.count);
    for (let i = 1; i < sorted.length; i++) {
      const smaller = byRaw.get(sorted[i - 1].raw)!;
      const larger = byRaw.get(sorted[i].raw)!;
      expect(larger).toBeGreaterThan(smaller);
    }
  });

  it("re-queries with a cloud word as the new token when clicked", async () => {
    const { root, server, patches } = setup({ token: "republicans", k: 1, d: 3 });
    await flush();
    const target = root.querySelector<HTMLElement>('.cloud-word[data-raw="repubLIEcans"]');
    target!.click();
    await flush();
    expect(patches.at(-1)).toEqual({ token: "repubLIEcans" });
    expect(server.calls.some((c) => c.includes("token=repubLIEcans"))).toBe(true);
  });

  it("shows the empty state for a member-less bucket", async () => {
    const { root } = setup({ token: "unseen", k: 1, d: 3 });
    await flush();
    expect(root.querySelector(".empty-state")?.textContent).toContain("no perturbations found");
  });

  it("shows a dismissible banner with the structured error code", async () => {
    const { root } = setup({ token: "err", k: 1, d: 3 });
    await flush();
    const banner = root.querySelector(".banner.error");
    expect(banner?.getAttribute("data-code")).toBe("LevelMismatch");
    expect(banner?.textContent).toContain("no index for level 9");
    banner?.querySelector<HTMLElement>(".banner-dismiss")!.click();
    expect(root.querySelector(".banner.error")).toBeNull();
  });

  it("marks results pending during refetch", async () => {
    const { root, view } = setup({ token: "republicans", k: 1, d: 3 });
    await flush();
    view.refresh();
    expect(root.querySelector(".results")!.classList.contains("pending")).toBe(true);
    await flush();
    expect(root.querySelector(".results")!.classList.contains("pending")).toBe(false);
  });
});

describe("cloud renderer", () => {
  it("degrades to a flat weighted list above the sphere cutoff", () => {
    const members = Array.from({ length: SPHERE_CUTOFF + 1 }, (_, i) => ({
      raw: `word${i}`,
      count: i + 1,
      distance: 1,
    }));
    const host = document.createElement("div");
    renderCloud(host, members, () => undefined);
    expect(host.querySelector(".cloud")!.classList.contains("flat-list")).toBe(true);
    expect(host.querySelectorAll(".cloud-word").length).toBe(members.length);
    const small = document.createElement("div");
    renderCloud(small, members.slice(0, 3), () => undefined);
    expect(small.querySelector(".cloud")!.classList.contains("sphere")).toBe(true);
  });

  it("font sizing is monotone and bounded", () => {
    expect(fontSizeFor(1, 10)).toBeLessThan(fontSizeFor(5, 10));
    expect(fontSizeFor(5, 10)).toBeLessThan(fontSizeFor(10, 10));
    expect(fontSizeFor(10, 10)).toBeLessThanOrEqual(34);
    expect(fontSizeFor(0, 10)).toBeGreaterThanOrEqual(12);
  });
});
