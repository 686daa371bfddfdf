/**
 * Color assignments shared by the views: the sequential red ramp that maps
 * node runtime to fill color, the hover/selection highlight blues, and a
 * fixed categorical color per operator kind.
 */

import type {NodeKind} from './report';

/** Hovered elements get a semi-transparent blue wash. */
export const HOVER_HIGHLIGHT = 'rgba(49, 112, 181, 0.35)';

/** Selected elements get the full, opaque blue. */
export const SELECT_HIGHLIGHT = '#3170b5';

/** Fill for dimmed (not-evaluated-in-this-pulse) dataflow nodes. */
export const DIMMED_FILL = '#e8e8e8';

/** Light-to-dark red stops, evenly spaced over [0, 1]. */
const RED_RAMP: ReadonlyArray<readonly [number, number, number]> = [
  [255, 245, 240],
  [254, 224, 210],
  [252, 187, 161],
  [252, 146, 114],
  [251, 106, 74],
  [239, 59, 44],
  [203, 24, 29],
  [165, 15, 21],
  [103, 0, 13],
];

/**
 * Map a runtime share t in [0, 1] onto the sequential red ramp
 * (piecewise-linear between stops; out-of-range values clamp).
 */
export function runtimeColor(t: number): string {
  const clamped = Math.min(1, Math.max(0, t));
  const scaled = clamped * (RED_RAMP.length - 1);
  const low = Math.min(RED_RAMP.length - 2, Math.floor(scaled));
  const frac = scaled - low;
  const a = RED_RAMP[low]!;
  const b = RED_RAMP[low + 1]!;
  const channel = (i: 0 | 1 | 2): number => Math.round(a[i] + (b[i] - a[i]) * frac);
  return `rgb(${channel(0)}, ${channel(1)}, ${channel(2)})`;
}

/**
 * Fill for one dataflow node given its self time in a pulse and the largest
 * self time in that pulse. Zero everywhere degrades to the lightest stop.
 */
export function runtimeFill(durationNs: number, maxDurationNs: number): string {
  return runtimeColor(maxDurationNs > 0 ? durationNs / maxDurationNs : 0);
}

const KIND_COLORS: Readonly<Record<NodeKind, string>> = {
  Source: '#4e79a7',
  Copy: '#a0cbe8',
  Filter: '#f28e2b',
  Formula: '#ffbe7d',
  Extent: '#59a14f',
  Bin: '#8cd17d',
  Aggregate: '#b6992d',
  Collect: '#f1ce63',
  Signal: '#e15759',
  ScaleDomain: '#ff9d9a',
  Scale: '#d37295',
  Encode: '#86bcb6',
  AxisTicks: '#b07aa1',
  Render: '#9467bd',
};

/** Fixed categorical color for an operator kind. */
export function kindColor(kind: NodeKind): string {
  return KIND_COLORS[kind];
}

/** Fill for icicle rows above the operator leaves. */
export const ICICLE_LEVEL_FILLS: Readonly<Record<string, string>> = {
  root: '#c6dbef',
  block: '#9ecae1',
  node: '#fdae6b',
  overhead: '#d9d9d9',
};
