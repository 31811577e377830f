/**
 * String-assembled SVG.  No DOM, no renderer: every element is an ordinary
 * template string, so identical inputs produce byte-identical figures.
 */

export function esc(s: string): string {
  return s
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** Fixed-precision coordinate so float noise never leaks into the markup. */
export function px(x: number): string {
  const rounded = Math.round(x * 100) / 100;
  return String(rounded === 0 ? 0 : rounded);
}

export type Attrs = Record<string, string | number>;

function attrText(attrs: Attrs): string {
  const parts = Object.entries(attrs).map(([k, v]) => `${k}="${typeof v === "number" ? px(v) : esc(v)}"`);
  return parts.length > 0 ? " " + parts.join(" ") : "";
}

export function tag(name: string, attrs: Attrs, ...children: string[]): string {
  if (children.length === 0) {
    return `<${name}${attrText(attrs)}/>`;
  }
  return `<${name}${attrText(attrs)}>${children.join("")}</${name}>`;
}

export function textEl(x: number, y: number, s: string, attrs: Attrs = {}): string {
  return tag("text", { x, y, ...attrs }, esc(s));
}

export function polyline(points: Array<[number, number]>, attrs: Attrs): string {
  const d = points.map(([x, y]) => `${px(x)},${px(y)}`).join(" ");
  return tag("polyline", { points: d, fill: "none", ...attrs });
}

export function svgDocument(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
    `width="${width}" height="${height}" font-family="Helvetica, Arial, sans-serif" font-size="12">` +
    `<rect width="${width}" height="${height}" fill="white"/>` +
    body +
    `</svg>`
  );
}
