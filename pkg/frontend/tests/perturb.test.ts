/** Perturb view contract: DOM-stable re-render under a fixed seed,
 * highlighted replacements, counters from the response, re-roll. */
import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { DEFAULT_STATE, type ViewState } from "../src/state";
import { PerturbView, renderPerturbedText, RATIO_PRESETS } from "../src/views/perturb";
import { flush, MockServer, PERTURB } from "./mockApi";

function setup(state: Partial<ViewState>) {
  const server = new MockServer();
  const api = new ApiClient("", server.fetch);
  const root = document.createElement("div");
  document.body.append(root);
  const patches: Partial<ViewState>[] = [];
  const view = new PerturbView(
    root,
    api,
    { ...DEFAULT_STATE, view: "perturb", ...state },
    (patch) => patches.push(patch),
  );
  view.mount();
  return { server, root, view, patches };
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("perturb view", () => {
  it("re-render with a fixed seed is DOM-stable", async () => {
    const { root, view } = setup({ text: "the dirty republicans", ratio: 0.34, seed: 7 });
    await flush();
    const first = root.querySelector(".results")!.innerHTML;
    view.refresh();
    await flush();
    const second = root.querySelector(".results")!.innerHTML;
    expect(second).toBe(first);
  });

  it("highlights each replacement and shows response counters", async () => {
    const { root } = setup({ text: "the dirty republicans", ratio: 0.34, seed: 7 });
    await flush();
    const marks = root.querySelectorAll("mark.perturbed");
    expect(marks.length).toBe(PERTURB.replacements.length);
    expect(marks[0].textContent).toBe("thee");
    expect(marks[0].getAttribute("data-original")).toBe("the");
    const meta = root.querySelector<HTMLElement>(".result-meta")!;
    expect(meta.dataset.achieved).toBe(String(PERTURB.achieved));
    expect(meta.textContent).toContain(`replaced ${PERTURB.achieved} of ${PERTURB.requested}`);
    expect(meta.textContent).toContain(`${PERTURB.eligible} eligible`);
    expect(meta.textContent).toContain(PERTURB.generator);
  });

  it("ratio zero shows no highlights", async () => {
    const { root } = setup({ text: "the dirty republicans", ratio: 0, seed: 7 });
    await flush();
    expect(root.querySelectorAll("mark.perturbed").length).toBe(0);
    expect(root.querySelector(".annotated-text")?.textContent).toBe("the dirty republicans");
  });

  it("offers the preset ratios and a re-roll that bumps the seed", async () => {
    const { root, patches } = setup({ text: "the dirty republicans", ratio: 0.34, seed: 7 });
    await flush();
    const presets = [...root.querySelectorAll<HTMLElement>("button.preset")];
    expect(presets.map((b) => b.getAttribute("data-ratio"))).toEqual(RATIO_PRESETS.map(String));
    presets[1].click();
    await flush();
    expect(patches.at(-1)?.ratio).toBe(0.25);
    root.querySelector<HTMLElement>('button[data-action="reroll"]')!.click();
    await flush();
    expect(patches.at(-1)?.seed).toBe(8);
  });

  it("exposes a copy-to-clipboard control", async () => {
    const { root } = setup({ text: "the dirty republicans", ratio: 0.34, seed: 7 });
    await flush();
    expect(root.querySelector('button[data-action="copy"]')).not.toBeNull();
  });
});

describe("perturbed text reconstruction", () => {
  it("splices replacements at byte offsets and keeps other bytes", () => {
    const host = renderPerturbedText("the dirty republicans", PERTURB);
    expect(host.textContent).toBe("thee dirty republicans");
    expect(host.querySelector("mark.perturbed")?.textContent).toBe("thee");
  });
});
