/**
 * Geometry for the dataflow graph: a layered left-to-right layout of the
 * operator DAG. A node's layer is the length of the longest edge path
 * reaching it, so every edge points strictly rightward; within a layer,
 * nodes stack top-to-bottom by ascending id. Pure geometry, no rendering.
 */

export interface DataflowEdge {
  readonly from: number;
  readonly to: number;
}

export interface DataflowBox {
  readonly node: number;
  readonly layer: number;
  readonly row: number;
  readonly x: number;
  readonly y: number;
  readonly width: number;
  readonly height: number;
}

export interface DataflowLayout {
  readonly boxes: ReadonlyArray<DataflowBox>;
  readonly edges: ReadonlyArray<DataflowEdge>;
  readonly width: number;
  readonly height: number;
}

export interface DataflowLayoutOptions {
  readonly nodeWidth?: number;
  readonly nodeHeight?: number;
  readonly gapX?: number;
  readonly gapY?: number;
}

const DEFAULTS = {nodeWidth: 112, nodeHeight: 26, gapX: 48, gapY: 10};

/** Longest-path layer per node; sources (no incoming edges) sit in layer 0. */
export function layerByNode(
  nodeIds: ReadonlyArray<number>,
  edges: ReadonlyArray<readonly [number, number]>,
): Map<number, number> {
  const layer = new Map<number, number>();
  const indegree = new Map<number, number>();
  const successors = new Map<number, number[]>();
  for (const id of nodeIds) {
    layer.set(id, 0);
    indegree.set(id, 0);
    successors.set(id, []);
  }
  for (const [from, to] of edges) {
    indegree.set(to, (indegree.get(to) ?? 0) + 1);
    successors.get(from)?.push(to);
  }
  const ready = nodeIds.filter((id) => indegree.get(id) === 0).sort((a, b) => a - b);
  while (ready.length > 0) {
    const id = ready.shift()!;
    const depth = layer.get(id) ?? 0;
    for (const next of successors.get(id) ?? []) {
      layer.set(next, Math.max(layer.get(next) ?? 0, depth + 1));
      const remaining = (indegree.get(next) ?? 0) - 1;
      indegree.set(next, remaining);
      if (remaining === 0) {
        ready.push(next);
      }
    }
  }
  return layer;
}

/** Deterministic layered layout of the operator DAG. */
export function layoutDataflow(
  nodeIds: ReadonlyArray<number>,
  edges: ReadonlyArray<readonly [number, number]>,
  options: DataflowLayoutOptions = {},
): DataflowLayout {
  const {nodeWidth, nodeHeight, gapX, gapY} = {...DEFAULTS, ...options};
  const layers = layerByNode(nodeIds, edges);

  const byLayer = new Map<number, number[]>();
  for (const id of [...nodeIds].sort((a, b) => a - b)) {
    const l = layers.get(id) ?? 0;
    const bucket = byLayer.get(l);
    if (bucket === undefined) {
      byLayer.set(l, [id]);
    } else {
      bucket.push(id);
    }
  }

  const boxes: DataflowBox[] = [];
  let maxLayer = 0;
  let maxRows = 0;
  for (const [l, ids] of [...byLayer.entries()].sort((a, b) => a[0] - b[0])) {
    maxLayer = Math.max(maxLayer, l);
    maxRows = Math.max(maxRows, ids.length);
    ids.forEach((id, row) => {
      boxes.push({
        node: id,
        layer: l,
        row,
        x: l * (nodeWidth + gapX),
        y: row * (nodeHeight + gapY),
        width: nodeWidth,
        height: nodeHeight,
      });
    });
  }

  return {
    boxes,
    edges: edges.map(([from, to]) => ({from, to})),
    width: boxes.length === 0 ? 0 : (maxLayer + 1) * nodeWidth + maxLayer * gapX,
    height: boxes.length === 0 ? 0 : maxRows * nodeHeight + (maxRows - 1) * gapY,
  };
}

/**
 * The nodes connected to one node: itself plus everything upstream and
 * downstream of it. Used to focus the graph on a selection.
 */
export function connectedSubgraph(
  edges: ReadonlyArray<readonly [number, number]>,
  node: number,
): Set<number> {
  const up = new Map<number, number[]>();
  const down = new Map<number, number[]>();
  for (const [from, to] of edges) {
    (down.get(from) ?? down.set(from, []).get(from)!).push(to);
    (up.get(to) ?? up.set(to, []).get(to)!).push(from);
  }
  const seen = new Set<number>([node]);
  const walk = (start: number, next: Map<number, number[]>): void => {
    const queue = [start];
    while (queue.length > 0) {
      const current = queue.shift()!;
      for (const neighbor of next.get(current) ?? []) {
        if (!seen.has(neighbor)) {
          seen.add(neighbor);
          queue.push(neighbor);
        }
      }
    }
  };
  walk(node, up);
  walk(node, down);
  return seen;
}
