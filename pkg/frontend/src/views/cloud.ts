/** Word-cloud renderer: a rotating tag sphere for small member sets,
 * degrading to a flat weighted list above the size cutoff. Font size is a
 * monotone function of the member's corpus count.
 */
import { clear, el } from "../dom";
import type { LookupMember } from "../types";

export const SPHERE_CUTOFF = 200;
const MIN_FONT = 12;
const MAX_FONT = 34;

export function fontSizeFor(count: number, maxCount: number): number {
  if (maxCount <= 0) return MIN_FONT;
  return MIN_FONT + ((MAX_FONT - MIN_FONT) * count) / maxCount;
}

/** Golden-angle spiral on a sphere; deterministic per member index. */
function spherePosition(index: number, total: number, radius: number): { x: number; y: number; z: number } {
  const offset = 2 / total;
  const y = index * offset - 1 + offset / 2;
  const r = Math.sqrt(Math.max(0, 1 - y * y));
  const phi = index * Math.PI * (3 - Math.sqrt(5));
  return { x: Math.cos(phi) * r * radius, y: y * radius, z: Math.sin(phi) * r * radius };
}

export function renderCloud(
  host: HTMLElement,
  members: LookupMember[],
  onSelect: (raw: string) => void,
): void {
  clear(host);
  if (members.length === 0) {
    host.append(el("p", { class: "empty-state" }, ["no perturbations found"]));
    return;
  }
  const maxCount = Math.max(...members.map((m) => m.count));
  const sphere = members.length <= SPHERE_CUTOFF;
  const container = el("div", {
    class: sphere ? "cloud sphere" : "cloud flat-list",
    "data-members": String(members.length),
  });
  members.forEach((member, index) => {
    const size = fontSizeFor(member.count, maxCount);
    const word = el(
      "button",
      {
        class: "cloud-word",
        type: "button",
        "data-raw": member.raw,
        "data-count": String(member.count),
        "data-distance": String(member.distance),
        title: `${member.raw}: count ${member.count}, distance ${member.distance}`,
      },
      [member.raw],
    );
    word.style.fontSize = `${size.toFixed(2)}px`;
    if (sphere) {
      const { x, y, z } = spherePosition(index, members.length, 110);
      word.style.transform = `translate3d(${x.toFixed(1)}px, ${y.toFixed(1)}px, ${z.toFixed(1)}px)`;
      word.style.opacity = (0.55 + (0.45 * (z + 110)) / 220).toFixed(2);
    }
    word.addEventListener("click", () => onSelect(member.raw));
    container.append(word);
  });
  host.append(container);
}
