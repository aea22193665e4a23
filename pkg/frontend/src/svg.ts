/**
 * Tiny deterministic SVG builder: fixed canvas, monospace text, explicit
 * number formatting so identical inputs produce identical bytes.
 */

export const FONT = "monospace";

export function fmt(v: number): string {
  if (!Number.isFinite(v)) {
    throw new Error(`cannot format non-finite value ${v}`);
  }
  return v.toFixed(2);
}

export interface Scale {
  (value: number): number;
  domain: [number, number];
}

/** Linear scale with a small padding so extreme points stay inside. */
export function linearScale(
  values: number[],
  range: [number, number],
  padFraction = 0.05,
): Scale {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const pad = (hi - lo) * padFraction;
  lo -= pad;
  hi += pad;
  const [r0, r1] = range;
  const scale = ((v: number) => r0 + ((v - lo) / (hi - lo)) * (r1 - r0)) as Scale;
  scale.domain = [lo, hi];
  return scale;
}

export function ticks(domain: [number, number], count = 5): number[] {
  const [lo, hi] = domain;
  const step = (hi - lo) / (count - 1);
  return Array.from({ length: count }, (_, i) => lo + i * step);
}

type Attrs = Record<string, string | number>;

function tag(name: string, attrs: Attrs, body = ""): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join(" ");
  return body === "" ? `<${name} ${parts}/>` : `<${name} ${parts}>${body}</${name}>`;
}

export class SvgCanvas {
  private readonly parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {}

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, extra: Attrs = {}): void {
    this.parts.push(tag("line", { x1, y1, x2, y2, stroke, "stroke-width": "1", ...extra }));
  }

  polyline(points: [number, number][], stroke: string, extra: Attrs = {}): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(tag("polyline", { points: pts, fill: "none", stroke, "stroke-width": "1.5", ...extra }));
  }

  circle(cx: number, cy: number, r: number, fill: string): void {
    this.parts.push(tag("circle", { cx, cy, r, fill }));
  }

  rect(x: number, y: number, w: number, h: number, fill: string, extra: Attrs = {}): void {
    this.parts.push(tag("rect", { x, y, width: w, height: h, fill, ...extra }));
  }

  text(x: number, y: number, content: string, extra: Attrs = {}): void {
    this.parts.push(
      tag(
        "text",
        { x, y, "font-family": FONT, "font-size": "10", fill: "#222", ...extra },
        escapeXml(content),
      ),
    );
  }

  axes(
    box: { left: number; right: number; top: number; bottom: number },
    xScale: Scale,
    yScale: Scale,
    xLabel: string,
    yLabel: string,
  ): void {
    this.line(box.left, box.bottom, box.right, box.bottom, "#222");
    this.line(box.left, box.top, box.left, box.bottom, "#222");
    for (const t of ticks(xScale.domain)) {
      const x = xScale(t);
      this.line(x, box.bottom, x, box.bottom + 4, "#222");
      this.text(x - 10, box.bottom + 15, fmt(t));
    }
    for (const t of ticks(yScale.domain)) {
      const y = yScale(t);
      this.line(box.left - 4, y, box.left, y, "#222");
      this.text(box.left - 46, y + 3, fmt(t));
    }
    this.text((box.left + box.right) / 2 - 20, box.bottom + 30, xLabel);
    this.text(box.left - 46, box.top - 8, yLabel);
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">`,
      `<rect x="0" y="0" width="${this.width}" height="${this.height}" fill="#ffffff"/>`,
      ...this.parts,
      "</svg>",
    ].join("\n");
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Shared colormap for heatmaps and bar grids: white through blue. */
export function blueShade(fraction: number): string {
  const f = Math.max(0, Math.min(1, fraction));
  const level = Math.round(255 - f * 200);
  const hex = level.toString(16).padStart(2, "0");
  return `#${hex}${hex}ff`;
}
