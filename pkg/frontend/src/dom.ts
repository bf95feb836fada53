/** Tiny DOM helpers shared by the views. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

/** Slice a string by UTF-8 byte offsets (the API's span coordinates). */
export function byteSlice(text: string, start: number, end: number): string {
  const bytes = new TextEncoder().encode(text);
  return new TextDecoder().decode(bytes.subarray(start, end));
}

/** Dismissible error banner carrying the structured error code. */
export function showErrorBanner(host: HTMLElement, code: string, message: string): void {
  const banner = el("div", { class: "banner error", role: "alert", "data-code": code }, [
    el("strong", {}, [code]),
    ` ${message} `,
  ]);
  const dismiss = el("button", { class: "banner-dismiss", type: "button" }, ["dismiss"]);
  dismiss.addEventListener("click", () => banner.remove());
  banner.append(dismiss);
  host.prepend(banner);
}
