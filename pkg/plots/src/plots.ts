import { Mark, Scene, linearScale } from "./scene";
import { HistogramRow, RewardStepRow, SearchRecord, Style } from "./types";

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!isFinite(lo)) return [0, 1];
  if (lo === hi) return [lo - 1, hi + 1];
  return [lo, hi];
}

function colorFor(style: Style, key: string): string {
  return style.colors[key] ?? style.colors.other;
}

/**
 * Scatter grid of consecutive coordinate pairs (a_i, a_i+1), one panel per
 * pair, points coloured by verdict.  Records must share one weight length.
 */
export function projectionGrid(records: SearchRecord[], style: Style): Scene {
  const size = style.panelSize;
  const margin = style.margin;
  const dims = records.length ? records[0].weights.length : 0;
  for (const rec of records) {
    if (rec.weights.length !== dims) {
      throw new Error(`wrong dimension: expected ${dims} weights, got ${rec.weights.length}`);
    }
  }
  if (records.length > 0 && dims < 2) {
    throw new Error(`wrong dimension: need at least 2 weights, got ${dims}`);
  }
  const panels = records.length ? dims - 1 : 1;
  const width = margin + panels * (size + margin);
  const height = size + 2 * margin;
  const marks: Mark[] = [];
  for (let i = 0; i < panels; i++) {
    const x0 = margin + i * (size + margin);
    const y0 = margin;
    const children: Mark[] = [
      { kind: "frame", x: x0, y: y0, w: size, h: size, stroke: style.axis },
    ];
    if (records.length) {
      const xs = records.map((r) => r.weights[i]);
      const ys = records.map((r) => r.weights[i + 1]);
      const sx = linearScale(...extent(xs), x0 + 4, x0 + size - 4);
      const sy = linearScale(...extent(ys), y0 + size - 4, y0 + 4);
      for (const rec of records) {
        children.push({
          kind: "square",
          x: sx(rec.weights[i]),
          y: sy(rec.weights[i + 1]),
          size: style.pointSize,
          fill: colorFor(style, rec.verdict),
        });
      }
      children.push(
        label(x0 + size / 2, y0 + size + 16, `a${i + 1}`, style),
        label(x0 - 8, y0 + size / 2, `a${i + 2}`, style)
      );
    } else {
      children.push(label(x0 + size / 2, y0 + size / 2, "no data", style));
    }
    marks.push({ kind: "group", cls: "panel", children });
  }
  return { width, height, background: style.background, marks };
}

function label(x: number, y: number, text: string, style: Style): Mark {
  return { kind: "text", x, y, text, size: 11, fill: style.axis, anchor: "middle" };
}

/** (degree, cumulative count) pairs for the records matching a verdict. */
export function cumulativeSeries(records: SearchRecord[], verdict: string): [number, number][] {
  const degrees = records
    .filter((r) => r.verdict === verdict)
    .map((r) => r.degree)
    .sort((a, b) => a - b);
  const out: [number, number][] = [];
  for (const [i, d] of degrees.entries()) {
    if (out.length && out[out.length - 1][0] === d) {
      out[out.length - 1][1] = i + 1;
    } else {
      out.push([d, i + 1]);
    }
  }
  return out;
}

/** Cumulative number of terminal families against degree, one curve per class. */
export function cumulativeByDegree(records: SearchRecord[], style: Style): Scene {
  const size = style.panelSize * 2;
  const margin = style.margin + 8;
  const width = size + 2 * margin;
  const height = style.panelSize + 2 * margin;
  const series: [string, [number, number][]][] = [
    ["terminal_qs", cumulativeSeries(records, "terminal_qs")],
    ["terminal_nonqs", cumulativeSeries(records, "terminal_nonqs")],
  ];
  const allDeg = series.flatMap(([, pts]) => pts.map(([d]) => d));
  const maxCount = Math.max(1, ...series.flatMap(([, pts]) => pts.map(([, c]) => c)));
  const [dLo, dHi] = extent(allDeg.length ? allDeg : [0, 1]);
  const sx = linearScale(dLo, dHi, margin, margin + size);
  const sy = linearScale(0, maxCount, height - margin, margin);
  const marks: Mark[] = [
    { kind: "frame", x: margin, y: margin, w: size, h: height - 2 * margin, stroke: style.axis },
  ];
  for (const [verdict, pts] of series) {
    if (!pts.length) continue;
    const steps: [number, number][] = [];
    let prev = 0;
    for (const [d, c] of pts) {
      steps.push([sx(d), sy(prev)]);
      steps.push([sx(d), sy(c)]);
      prev = c;
    }
    steps.push([sx(dHi), sy(prev)]);
    marks.push({ kind: "polyline", points: steps, stroke: colorFor(style, verdict) });
  }
  marks.push(
    label(width / 2, height - 8, "degree", style),
    legend(margin + 10, margin + 14, series.map(([v]) => v), style)
  );
  return { width, height, background: style.background, marks };
}

function legend(x: number, y: number, keys: string[], style: Style): Mark {
  const children: Mark[] = [];
  keys.forEach((key, i) => {
    children.push(
      { kind: "rect", x, y: y + i * 16 - 8, w: 10, h: 10, fill: colorFor(style, key) },
      { kind: "text", x: x + 16, y: y + i * 16, text: key, size: 11, fill: style.axis, anchor: "start" }
    );
  });
  return { kind: "group", cls: "legend", children };
}

/** Bar chart of nearest-neighbour distances. */
export function distanceHistogram(rows: HistogramRow[], style: Style): Scene {
  const size = style.panelSize * 2;
  const margin = style.margin + 8;
  const width = size + 2 * margin;
  const height = style.panelSize + 2 * margin;
  const marks: Mark[] = [
    { kind: "frame", x: margin, y: margin, w: size, h: height - 2 * margin, stroke: style.axis },
  ];
  if (rows.length) {
    const [dLo, dHi] = extent(rows.map((r) => r.distance));
    const maxCount = Math.max(...rows.map((r) => r.count), 1);
    const slots = dHi - dLo + 1;
    const barWidth = Math.min(28, (size - 8) / slots);
    const sx = linearScale(dLo, dHi + 1, margin + 4, margin + 4 + slots * barWidth);
    const sy = linearScale(0, maxCount, height - margin, margin + 6);
    for (const row of rows) {
      const top = sy(row.count);
      marks.push({
        kind: "rect",
        x: sx(row.distance) + 1,
        y: top,
        w: barWidth - 2,
        h: height - margin - top,
        fill: style.colors.bar,
      });
      marks.push(label(sx(row.distance) + barWidth / 2, height - margin + 14, String(row.distance), style));
    }
  }
  marks.push(label(width / 2, height - 8, "distance", style));
  return { width, height, background: style.background, marks };
}

/** Cumulative reward counts against steps, one curve per engine, shared axes. */
export function rewardVsSteps(rows: RewardStepRow[], style: Style): Scene {
  const size = style.panelSize * 2;
  const margin = style.margin + 8;
  const width = size + 2 * margin;
  const height = style.panelSize + 2 * margin;
  const engines = [...new Set(rows.map((r) => r.engine))].sort();
  const [sLo, sHi] = extent(rows.map((r) => r.step));
  const maxCum = Math.max(...rows.map((r) => r.cumulative), 1);
  const sx = linearScale(Math.min(0, sLo), sHi, margin, margin + size);
  const sy = linearScale(0, maxCum, height - margin, margin);
  const marks: Mark[] = [
    { kind: "frame", x: margin, y: margin, w: size, h: height - 2 * margin, stroke: style.axis },
  ];
  for (const engine of engines) {
    const pts = rows
      .filter((r) => r.engine === engine)
      .sort((a, b) => a.step - b.step)
      .map((r) => [sx(r.step), sy(r.cumulative)] as [number, number]);
    if (pts.length) {
      marks.push({ kind: "polyline", points: pts, stroke: colorFor(style, engine) });
    }
  }
  marks.push(label(width / 2, height - 8, "steps", style), legend(margin + 10, margin + 14, engines, style));
  return { width, height, background: style.background, marks };
}
