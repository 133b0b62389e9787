/** Small DOM helpers shared by the panels. */

type Attrs = Record<string, string | boolean | undefined>;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (v === undefined || v === false) continue;
    if (v === true) node.setAttribute(k, "");
    else node.setAttribute(k, v);
  }
  for (const child of children) node.append(child);
  return node;
}

/**
 * Fixed-point formatting for service numbers. Display-only; the value
 * itself always arrives in a response body.
 */
export function fmtNum(value: number, digits = 4): string {
  return value.toFixed(digits);
}

/**
 * A span displaying one number taken from a service response. The
 * data-metric attribute names the response field so scripted clients
 * can audit that every rendered figure maps back to recorded traffic.
 */
export function metricSpan(
  metric: string,
  value: number,
  digits = 4,
): HTMLSpanElement {
  return el("span", { "data-metric": metric }, fmtNum(value, digits));
}

export function setMetric(
  span: HTMLElement,
  value: number,
  digits = 4,
): void {
  span.textContent = fmtNum(value, digits);
}

/** Non-blocking error strip; the panel underneath stays interactive. */
export function showBanner(banner: HTMLElement, message: string): void {
  banner.textContent = message;
  banner.hidden = false;
}

export function clearBanner(banner: HTMLElement): void {
  banner.hidden = true;
  banner.textContent = "";
}
