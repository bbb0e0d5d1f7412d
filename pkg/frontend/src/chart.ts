/** Pure chart geometry: data in, SVG path strings / cell lists out.
 *
 * Everything here is a deterministic transform of posterior or
 * candidate values, so tests assert on the returned data (band widths,
 * cell values) rather than rendered pixels.
 */

export interface ViewBox {
  width: number;
  height: number;
  margin: number;
}

export interface Scale {
  x: (v: number) => number;
  y: (v: number) => number;
}

export function makeScale(
  xDomain: [number, number],
  yDomain: [number, number],
  view: ViewBox,
): Scale {
  const spanX = xDomain[1] - xDomain[0] || 1;
  const spanY = yDomain[1] - yDomain[0] || 1;
  const inner = {
    w: view.width - 2 * view.margin,
    h: view.height - 2 * view.margin,
  };
  return {
    x: (v) => view.margin + ((v - xDomain[0]) / spanX) * inner.w,
    y: (v) => view.height - view.margin - ((v - yDomain[0]) / spanY) * inner.h,
  };
}

function pt(x: number, y: number): string {
  return `${x.toFixed(2)},${y.toFixed(2)}`;
}

export function linePath(xs: number[], ys: number[], scale: Scale): string {
  return xs
    .map((x, i) => `${i === 0 ? "M" : "L"}${pt(scale.x(x), scale.y(ys[i]))}`)
    .join("");
}

/** Closed polygon tracing hi left-to-right then lo right-to-left. */
export function bandPath(
  xs: number[],
  lo: number[],
  hi: number[],
  scale: Scale,
): string {
  const top = xs.map((x, i) => `${i === 0 ? "M" : "L"}${pt(scale.x(x), scale.y(hi[i]))}`);
  const bottom = [...xs.keys()]
    .reverse()
    .map((i) => `L${pt(scale.x(xs[i]), scale.y(lo[i]))}`);
  return top.join("") + bottom.join("") + "Z";
}

export interface PosteriorChart {
  xs: number[];
  meanPath: string;
  bandPath: string;
  /** Band widths in data units, aligned with xs. */
  bandWidths: number[];
  markers: { x: number; y: number; index: number }[];
}

/** 1-d posterior chart: mean line, 95% band, candidate markers. */
export function posteriorChart1d(
  grid: number[][],
  mean: number[],
  lo: number[],
  hi: number[],
  candidates: { index: number; action: number[]; mean: number }[],
  view: ViewBox,
): PosteriorChart {
  const xs = grid.map((g) => g[0]);
  const xDomain: [number, number] = [Math.min(...xs), Math.max(...xs)];
  const yDomain: [number, number] = [Math.min(...lo), Math.max(...hi)];
  const scale = makeScale(xDomain, yDomain, view);
  return {
    xs,
    meanPath: linePath(xs, mean, scale),
    bandPath: bandPath(xs, lo, hi, scale),
    bandWidths: hi.map((h, i) => h - lo[i]),
    markers: candidates.map((c) => ({
      x: scale.x(c.action[0]),
      y: scale.y(c.mean),
      index: c.index,
    })),
  };
}

export interface HeatCell {
  x: number;
  y: number;
  w: number;
  h: number;
  value: number;
  /** 0..1 shade, linear in value over the observed range. */
  shade: number;
}

/** 2-d grids render as a shaded cell matrix with candidate markers. */
export function heatmapCells(
  grid: number[][],
  values: number[],
  view: ViewBox,
): HeatCell[] {
  const xs = [...new Set(grid.map((g) => g[0]))].sort((a, b) => a - b);
  const ys = [...new Set(grid.map((g) => g[1]))].sort((a, b) => a - b);
  const cellW = (view.width - 2 * view.margin) / xs.length;
  const cellH = (view.height - 2 * view.margin) / ys.length;
  const xPos = new Map(xs.map((v, i) => [v, i]));
  const yPos = new Map(ys.map((v, i) => [v, i]));
  const vMin = Math.min(...values);
  const span = Math.max(...values) - vMin || 1;
  return grid.map((g, i) => ({
    x: view.margin + xPos.get(g[0])! * cellW,
    y: view.margin + (ys.length - 1 - yPos.get(g[1])!) * cellH,
    w: cellW,
    h: cellH,
    value: values[i],
    shade: (values[i] - vMin) / span,
  }));
}

export interface ChecklistItem {
  item: number;
  included: boolean;
}

/** Bit-vector actions render as item checklists. */
export function checklistItems(action: number[]): ChecklistItem[] {
  return action.map((bit, i) => ({ item: i, included: bit >= 0.5 }));
}
