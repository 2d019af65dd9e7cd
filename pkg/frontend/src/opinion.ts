/** View-model math for one sample's opinion: belief bars plus an
 * uncertainty gauge that together account for all probability mass.
 */

export interface OpinionView {
  /** Bar widths in percent, one per class. */
  beliefPercents: number[];
  /** Gauge fill in percent (uncertainty mass). */
  gaugePercent: number;
  /** Whether gauge + bars add to one within display rounding. */
  consistent: boolean;
}

const DISPLAY_TOLERANCE = 1e-6;

export function opinionView(item: { belief: number[]; uncertainty: number }): OpinionView {
  const gauge = Math.min(1, Math.max(0, item.uncertainty));
  const total = item.belief.reduce((acc, b) => acc + b, 0) + item.uncertainty;
  return {
    beliefPercents: item.belief.map((b) => 100 * Math.min(1, Math.max(0, b))),
    gaugePercent: 100 * gauge,
    consistent: Math.abs(total - 1) <= DISPLAY_TOLERANCE,
  };
}

export function formatPercent(fraction: number, digits = 0): string {
  return `${(100 * fraction).toFixed(digits)}%`;
}

export function formatUncertainty(u: number): string {
  return u.toFixed(3);
}
