/** Dependency-free SVG charts: metric-vs-budget lines and the
 * correct/incorrect uncertainty histogram panel.  Pure string builders,
 * unit-testable without a DOM.
 */

import type { HistogramPair, RoundRecord } from "./types.js";

export function scaleLinear(
  d0: number,
  d1: number,
  r0: number,
  r1: number,
): (v: number) => number {
  const span = d1 - d0;
  if (span === 0) return () => (r0 + r1) / 2;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function polylinePoints(
  xs: number[],
  ys: number[],
  sx: (v: number) => number,
  sy: (v: number) => number,
): string {
  return xs.map((x, i) => `${sx(x).toFixed(2)},${sy(ys[i]).toFixed(2)}`).join(" ");
}

const STRATEGY_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

const MARGIN = { top: 16, right: 12, bottom: 34, left: 44 };

function groupByStrategy(records: RoundRecord[]): Map<string, RoundRecord[]> {
  const groups = new Map<string, RoundRecord[]>();
  for (const r of records) {
    const bucket = groups.get(r.strategy) ?? [];
    bucket.push(r);
    groups.set(r.strategy, bucket);
  }
  return groups;
}

function meanByFraction(rows: RoundRecord[], metric: "accuracy" | "weighted_f1") {
  const byFraction = new Map<number, number[]>();
  for (const r of rows) {
    const bucket = byFraction.get(r.labels_fraction) ?? [];
    bucket.push(r[metric]);
    byFraction.set(r.labels_fraction, bucket);
  }
  const fractions = [...byFraction.keys()].sort((a, b) => a - b);
  return {
    fractions,
    means: fractions.map((f) => {
      const vals = byFraction.get(f)!;
      return vals.reduce((a, b) => a + b, 0) / vals.length;
    }),
  };
}

/** Accuracy (solid) and weighted F1 (dashed) vs labels fraction, one
 * color per strategy.  Multi-seed histories are averaged per fraction. */
export function historyChartSvg(records: RoundRecord[], width = 520, height = 300): string {
  if (records.length === 0) {
    return (
      `<svg viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">` +
      `<text x="${width / 2}" y="${height / 2}" text-anchor="middle" class="placeholder">` +
      `no rounds completed yet</text></svg>`
    );
  }
  const groups = groupByStrategy(records);
  const allFractions = records.map((r) => r.labels_fraction);
  const allValues = records.flatMap((r) => [r.accuracy, r.weighted_f1]);
  const xMax = Math.max(...allFractions);
  const yMin = Math.max(0, Math.min(...allValues) - 0.05);
  const sx = scaleLinear(0, xMax, MARGIN.left, width - MARGIN.right);
  const sy = scaleLinear(yMin, 1, height - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [
    `<svg viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">`,
  ];
  // axes
  parts.push(
    `<line class="axis" x1="${MARGIN.left}" y1="${height - MARGIN.bottom}" ` +
      `x2="${width - MARGIN.right}" y2="${height - MARGIN.bottom}"/>`,
    `<line class="axis" x1="${MARGIN.left}" y1="${MARGIN.top}" ` +
      `x2="${MARGIN.left}" y2="${height - MARGIN.bottom}"/>`,
  );
  const uniqueFractions = [...new Set(allFractions)].sort((a, b) => a - b);
  for (const f of uniqueFractions) {
    parts.push(
      `<text class="tick" x="${sx(f).toFixed(2)}" y="${height - MARGIN.bottom + 16}" ` +
        `text-anchor="middle">${(100 * f).toFixed(0)}%</text>`,
    );
  }
  for (let i = 0; i <= 4; i++) {
    const v = yMin + ((1 - yMin) * i) / 4;
    parts.push(
      `<text class="tick" x="${MARGIN.left - 6}" y="${(sy(v) + 4).toFixed(2)}" ` +
        `text-anchor="end">${v.toFixed(2)}</text>`,
    );
  }

  let colorIndex = 0;
  for (const [strategy, rows] of groups) {
    const color = STRATEGY_COLORS[colorIndex % STRATEGY_COLORS.length];
    const acc = meanByFraction(rows, "accuracy");
    const f1 = meanByFraction(rows, "weighted_f1");
    parts.push(
      `<polyline class="series-accuracy" fill="none" stroke="${color}" stroke-width="2" ` +
        `points="${polylinePoints(acc.fractions, acc.means, sx, sy)}"/>`,
      `<polyline class="series-f1" fill="none" stroke="${color}" stroke-width="1.5" ` +
        `stroke-dasharray="5 4" points="${polylinePoints(f1.fractions, f1.means, sx, sy)}"/>`,
    );
    for (let i = 0; i < acc.fractions.length; i++) {
      parts.push(
        `<circle class="pt" cx="${sx(acc.fractions[i]).toFixed(2)}" ` +
          `cy="${sy(acc.means[i]).toFixed(2)}" r="3" fill="${color}"/>`,
      );
    }
    parts.push(
      `<text class="legend" x="${width - MARGIN.right}" y="${MARGIN.top + colorIndex * 16}" ` +
        `text-anchor="end" fill="${color}">${strategy}</text>`,
    );
    colorIndex += 1;
  }
  parts.push("</svg>");
  return parts.join("");
}

/** Side-by-side bars per uncertainty bin: correct vs incorrect counts. */
export function histogramSvg(pair: HistogramPair, width = 520, height = 220): string {
  const bins = pair.counts_correct.length;
  const maxCount = Math.max(1, ...pair.counts_correct, ...pair.counts_incorrect);
  const sx = scaleLinear(0, 1, MARGIN.left, width - MARGIN.right);
  const sy = scaleLinear(0, maxCount, height - MARGIN.bottom, MARGIN.top);
  const base = height - MARGIN.bottom;

  const parts: string[] = [
    `<svg viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg">`,
    `<line class="axis" x1="${MARGIN.left}" y1="${base}" x2="${width - MARGIN.right}" y2="${base}"/>`,
  ];
  for (let i = 0; i < bins; i++) {
    const x0 = sx(pair.bin_edges[i]);
    const x1 = sx(pair.bin_edges[i + 1]);
    const w = (x1 - x0) / 2 - 0.5;
    const hc = base - sy(pair.counts_correct[i]);
    const hi = base - sy(pair.counts_incorrect[i]);
    parts.push(
      `<rect class="bar-correct" x="${x0.toFixed(2)}" y="${(base - hc).toFixed(2)}" ` +
        `width="${w.toFixed(2)}" height="${hc.toFixed(2)}" fill="#2ca02c"/>`,
      `<rect class="bar-incorrect" x="${(x0 + w + 1).toFixed(2)}" y="${(base - hi).toFixed(2)}" ` +
        `width="${w.toFixed(2)}" height="${hi.toFixed(2)}" fill="#d62728"/>`,
    );
  }
  for (const v of [0, 0.25, 0.5, 0.75, 1]) {
    parts.push(
      `<text class="tick" x="${sx(v).toFixed(2)}" y="${base + 16}" text-anchor="middle">` +
        `${v.toFixed(2)}</text>`,
    );
  }
  parts.push(
    `<text class="legend" x="${width - MARGIN.right}" y="${MARGIN.top}" text-anchor="end" ` +
      `fill="#2ca02c">correct</text>`,
    `<text class="legend" x="${width - MARGIN.right}" y="${MARGIN.top + 16}" text-anchor="end" ` +
      `fill="#d62728">incorrect</text>`,
    "</svg>",
  );
  return parts.join("");
}
