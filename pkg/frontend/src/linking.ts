/**
 * Brushing-and-linking resolution across the three coordinated views.
 *
 * Any hover or selection target — a spec path in the editor, a node in the
 * dataflow graph, or a cell in the icicle graph — is a `Ref`. Resolving a
 * ref yields the full set of elements all views must highlight together:
 * source spans, dataflow node ids, and icicle cell addresses. The resolution
 * uses only the report's own mapping tables, so it is checkable headlessly.
 */

import type {DataDelta, IcicleNode, Pulse, ReportIndex, Span, SpecPath, TableRow, Trigger} from './report';

/** Address of a cell in one pulse's icicle tree: child indexes from the root. */
export type IcicleAddress = ReadonlyArray<number>;

export type Ref =
  | {readonly kind: 'path'; readonly path: SpecPath}
  | {readonly kind: 'node'; readonly node: number}
  | {readonly kind: 'icicle'; readonly pulse: number; readonly address: IcicleAddress};

export interface SpanRef {
  readonly path: SpecPath;
  readonly span: Span;
}

/** What every view highlights for one ref. */
export interface LinkedElements {
  readonly spans: ReadonlyArray<SpanRef>;
  readonly nodes: ReadonlyArray<number>;
  readonly icicle: ReadonlyArray<IcicleAddress>;
}

const EMPTY: LinkedElements = {spans: [], nodes: [], icicle: []};

/** Follow a child-index address down an icicle tree. */
export function icicleNodeAt(root: IcicleNode, address: IcicleAddress): IcicleNode | undefined {
  let current: IcicleNode | undefined = root;
  for (const index of address) {
    current = current?.children[index];
  }
  return current;
}

function collectLeafCells(
  node: IcicleNode,
  address: IcicleAddress,
  out: Array<{address: IcicleAddress; node: number}>,
): void {
  if (node.kind === 'node' && node.node !== undefined) {
    out.push({address, node: node.node});
    return;
  }
  node.children.forEach((child, i) => collectLeafCells(child, [...address, i], out));
}

/** All operator leaves under an icicle subtree, in drawing order. */
export function leafCells(
  root: IcicleNode,
  base: IcicleAddress = [],
): Array<{address: IcicleAddress; node: number}> {
  const start = icicleNodeAt(root, base);
  if (start === undefined) {
    return [];
  }
  const out: Array<{address: IcicleAddress; node: number}> = [];
  collectLeafCells(start, base, out);
  return out;
}

function spanListFor(index: ReportIndex, path: SpecPath): SpanRef[] {
  const found = index.enclosingSpanOf(path);
  return found === undefined ? [] : [found];
}

function leavesForNodes(
  index: ReportIndex,
  pulseId: number,
  nodes: ReadonlySet<number>,
): IcicleAddress[] {
  const pulse = index.pulse(pulseId);
  if (pulse === undefined) {
    return [];
  }
  return leafCells(pulse.icicle)
    .filter((cell) => nodes.has(cell.node))
    .map((cell) => cell.address);
}

/**
 * Resolve a hover/selection ref into the consistent sets every view shows.
 *
 * - A path ref expands through the forward mapping, descendants included,
 *   to node ids, and from those to their icicle leaves in the active pulse.
 * - A node ref expands through the backward mapping to its one origin span
 *   and its one leaf in the active pulse (none if it was not evaluated).
 * - An icicle ref names a cell in one pulse's tree: an operator leaf links
 *   like a node ref; a block (or the root) links its whole subtree's leaves,
 *   their node ids, and the block's own span.
 *
 * A ref that does not exist in the report resolves to empty sets.
 */
export function resolveLinkedElements(
  index: ReportIndex,
  ref: Ref,
  activePulse = 0,
): LinkedElements {
  switch (ref.kind) {
    case 'path': {
      const span = index.spanOf(ref.path);
      const nodes = index.nodesUnderPath(ref.path);
      if (span === undefined && nodes.length === 0) {
        return EMPTY;
      }
      return {
        spans: span === undefined ? [] : [{path: ref.path, span}],
        nodes,
        icicle: leavesForNodes(index, activePulse, new Set(nodes)),
      };
    }
    case 'node': {
      const path = index.pathOfNode(ref.node);
      if (path === undefined) {
        return EMPTY;
      }
      return {
        spans: spanListFor(index, path),
        nodes: [ref.node],
        icicle: leavesForNodes(index, activePulse, new Set([ref.node])),
      };
    }
    case 'icicle': {
      const pulse = index.pulse(ref.pulse);
      if (pulse === undefined) {
        return EMPTY;
      }
      const cell = icicleNodeAt(pulse.icicle, ref.address);
      if (cell === undefined) {
        return EMPTY;
      }
      if (cell.kind === 'node' && cell.node !== undefined) {
        return {
          spans: spanListFor(index, index.pathOfNode(cell.node) ?? []),
          nodes: [cell.node],
          icicle: [ref.address],
        };
      }
      if (cell.kind === 'overhead') {
        // The overhead cell aggregates time spent outside any operator; it
        // corresponds to no source span and no dataflow node.
        return {spans: [], nodes: [], icicle: [ref.address]};
      }
      const leaves = leafCells(pulse.icicle, ref.address);
      const nodes = [...new Set(leaves.map((cell) => cell.node))].sort((a, b) => a - b);
      return {
        spans: cell.path === undefined ? [] : spanListFor(index, cell.path),
        nodes,
        icicle: leaves.map((cell) => cell.address),
      };
    }
  }
}

/** True when a ref names something present in the report. */
export function refExists(index: ReportIndex, ref: Ref): boolean {
  switch (ref.kind) {
    case 'path':
      return index.spanOf(ref.path) !== undefined || index.nodesUnderPath(ref.path).length > 0;
    case 'node':
      return index.pathOfNode(ref.node) !== undefined;
    case 'icicle': {
      const pulse = index.pulse(ref.pulse);
      return pulse !== undefined && icicleNodeAt(pulse.icicle, ref.address) !== undefined;
    }
  }
}

/** Everything the views need to show one pulse. */
export interface PulseView {
  readonly pulseId: number;
  readonly trigger: Trigger;
  readonly wallTotal: number;
  readonly icicle: IcicleNode;
  readonly evaluated: ReadonlySet<number>;
  /** Dataflow node ids outside the evaluated set, ascending. */
  readonly dimmed: ReadonlyArray<number>;
  readonly deltaByNode: ReadonlyMap<number, DataDelta>;
  readonly table: ReadonlyArray<TableRow>;
}

/**
 * Switch the views to one pulse: its icicle tree, its wall-clock total for
 * the banner, its per-node data deltas for tooltips, and the dimmed set —
 * exactly the complement of the nodes the pulse evaluated. An unknown pulse
 * id returns undefined so the caller keeps the current view.
 */
export function selectPulse(index: ReportIndex, pulseId: number): PulseView | undefined {
  const pulse: Pulse | undefined = index.pulse(pulseId);
  if (pulse === undefined) {
    return undefined;
  }
  const evaluated = new Set(pulse.evaluated);
  return {
    pulseId: pulse.pulse_id,
    trigger: pulse.trigger,
    wallTotal: pulse.wall_total,
    icicle: pulse.icicle,
    evaluated,
    dimmed: index.allNodeIds().filter((id) => !evaluated.has(id)),
    deltaByNode: new Map(pulse.data_deltas.map((d) => [d.node, d])),
    table: pulse.node_table,
  };
}

/** The client's whole interaction state; everything else derives from the report. */
export interface SelectionState {
  readonly hovered?: Ref | undefined;
  readonly selected?: Ref | undefined;
  readonly activePulse: number;
}

/** Fresh state: nothing hovered or selected, initial-render pulse shown. */
export const INITIAL_SELECTION: SelectionState = {activePulse: 0};

/** Set the hovered ref, clearing it when the ref does not exist. */
export function withHovered(
  index: ReportIndex,
  state: SelectionState,
  ref: Ref | undefined,
): SelectionState {
  const hovered = ref !== undefined && refExists(index, ref) ? ref : undefined;
  return {...state, hovered};
}

/** Set the selected ref, clearing it when the ref does not exist. */
export function withSelected(
  index: ReportIndex,
  state: SelectionState,
  ref: Ref | undefined,
): SelectionState {
  const selected = ref !== undefined && refExists(index, ref) ? ref : undefined;
  return {...state, selected};
}

/** Switch pulses; an unknown pulse id leaves the state unchanged. */
export function withActivePulse(
  index: ReportIndex,
  state: SelectionState,
  pulseId: number,
): SelectionState {
  if (index.pulse(pulseId) === undefined) {
    return state;
  }
  return {...state, activePulse: pulseId};
}
