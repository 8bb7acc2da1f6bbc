/** Tiny element builder so views stay free of innerHTML string soup. */

type Child = Node | string | null | undefined;

export function el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    attrs: Record<string, string | ((event: Event) => void)> = {},
    ...children: Child[]
): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) {
        if (typeof value === "function") {
            node.addEventListener(key.replace(/^on/, ""), value);
        } else if (key === "text") {
            node.textContent = value;
        } else {
            node.setAttribute(key, value);
        }
    }
    for (const child of children) {
        if (child == null) continue;
        node.append(child);
    }
    return node;
}

export function clear(node: HTMLElement): void {
    while (node.firstChild) node.removeChild(node.firstChild);
}

export function fmtMs(ms: number): string {
    const totalSeconds = Math.floor(ms / 1000);
    const minutes = Math.floor(totalSeconds / 60);
    const seconds = totalSeconds % 60;
    const millis = ms % 1000;
    return `${minutes}:${String(seconds).padStart(2, "0")}.${String(millis).padStart(3, "0")}`;
}
