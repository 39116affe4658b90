/**
 * Minimal deterministic SVG chart scaffolding: linear/log scales from
 * d3-scale, axes with ticks, polylines and markers.  No timestamps, no
 * randomness; the same scene always serializes to the same bytes.
 */

import { scaleLinear, scaleLog, ScaleContinuousNumeric } from "d3-scale";

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { top: 40, right: 40, bottom: 56, left: 72 };

export const PALETTE: Record<string, string> = {
  akr: "#1f77b4",
  "akr+qaa": "#d62728",
  controlled: "#2ca02c",
  fit: "#7f7f7f",
};

export type Scale = ScaleContinuousNumeric<number, number>;

export function makeScale(
  kind: "linear" | "log",
  domain: [number, number],
  range: [number, number],
): Scale {
  if (kind === "log") {
    // pad instead of nice(): log-nice rounds out to whole decades
    return scaleLog().domain([domain[0] * 0.8, domain[1] * 1.25]).range(range);
  }
  return scaleLinear().domain(domain).range(range).nice();
}

function fmt(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 10000 || abs < 0.001) return value.toExponential(0);
  return String(Number(value.toPrecision(6)));
}

/** Default ticks: d3's, thinned on log scales to mantissa 1, 2 or 5. */
function niceTicks(scale: Scale): number[] {
  const all = scale.ticks(6);
  const span = scale.domain()[1] / Math.max(scale.domain()[0], 1e-300);
  if (all.length <= 8 || !(span > 0)) return all;
  const round = all.filter((t) => {
    const mantissa = t / Math.pow(10, Math.floor(Math.log10(Math.abs(t))));
    return [1, 2, 5].some((m) => Math.abs(mantissa - m) < 1e-9);
  });
  return round.length >= 3 ? round : all;
}

export function coord(value: number): string {
  return String(Number(value.toFixed(2)));
}

export class Scene {
  private parts: string[] = [];

  add(part: string): void {
    this.parts.push(part);
  }

  polyline(xs: number[], ys: number[], stroke: string, dash = ""): void {
    const points = xs.map((x, i) => `${coord(x)},${coord(ys[i])}`).join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.add(
      `<polyline fill="none" stroke="${stroke}" stroke-width="1.5"${dashAttr} points="${points}"/>`,
    );
  }

  circle(x: number, y: number, fill: string, r = 3): void {
    this.add(`<circle cx="${coord(x)}" cy="${coord(y)}" r="${r}" fill="${fill}"/>`);
  }

  text(x: number, y: number, content: string, attrs = ""): void {
    this.add(`<text x="${coord(x)}" y="${coord(y)}" ${attrs}>${content}</text>`);
  }

  xAxis(scale: Scale, label: string, ticks?: number[]): void {
    const y0 = HEIGHT - MARGIN.bottom;
    const [x0, x1] = scale.range();
    this.add(`<line x1="${coord(x0)}" y1="${y0}" x2="${coord(x1)}" y2="${y0}" stroke="black"/>`);
    for (const tick of ticks ?? niceTicks(scale)) {
      const x = scale(tick);
      this.add(`<line x1="${coord(x)}" y1="${y0}" x2="${coord(x)}" y2="${y0 + 5}" stroke="black"/>`);
      this.text(x, y0 + 20, fmt(tick), 'text-anchor="middle" font-size="11"');
    }
    this.text((x0 + x1) / 2, HEIGHT - 14, label, 'text-anchor="middle" font-size="13"');
  }

  yAxis(scale: Scale, label: string, ticks?: number[]): void {
    const x0 = MARGIN.left;
    const [y0, y1] = scale.range();
    this.add(`<line x1="${x0}" y1="${coord(y0)}" x2="${x0}" y2="${coord(y1)}" stroke="black"/>`);
    for (const tick of ticks ?? niceTicks(scale)) {
      const y = scale(tick);
      this.add(`<line x1="${x0 - 5}" y1="${coord(y)}" x2="${x0}" y2="${coord(y)}" stroke="black"/>`);
      this.text(x0 - 8, y + 4, fmt(tick), 'text-anchor="end" font-size="11"');
    }
    this.text(
      18,
      (y0 + y1) / 2,
      label,
      `text-anchor="middle" font-size="13" transform="rotate(-90 18 ${coord((y0 + y1) / 2)})"`,
    );
  }

  title(content: string): void {
    this.text(WIDTH / 2, 24, content, 'text-anchor="middle" font-size="15"');
  }

  legend(entries: Array<[string, string]>, dashed: Set<string> = new Set()): void {
    let y = MARGIN.top + 8;
    for (const [name, color] of entries) {
      const x = WIDTH - MARGIN.right - 150;
      const dash = dashed.has(name) ? ' stroke-dasharray="6 3"' : "";
      this.add(`<line x1="${x}" y1="${y}" x2="${x + 24}" y2="${y}" stroke="${color}" stroke-width="2"${dash}/>`);
      this.text(x + 30, y + 4, name, 'font-size="12"');
      y += 18;
    }
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      ...this.parts,
      "</svg>",
      "",
    ].join("\n");
  }
}

export function plotRange(): { x: [number, number]; y: [number, number] } {
  return {
    x: [MARGIN.left, WIDTH - MARGIN.right],
    y: [HEIGHT - MARGIN.bottom, MARGIN.top],
  };
}
