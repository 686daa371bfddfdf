import {describe, expect, it} from 'vitest';

import {connectedSubgraph, layerByNode, layoutDataflow} from '../src/dataflow';
import {FIXTURE_NAMES, fixtureIndex} from './helpers';

describe('layerByNode', () => {
  it('puts sources in layer 0 and every edge target strictly deeper', () => {
    for (const name of FIXTURE_NAMES) {
      const report = fixtureIndex(name).report;
      const ids = report.nodes.map((n) => n.id);
      const layers = layerByNode(ids, report.edges);
      const targets = new Set(report.edges.map(([, to]) => to));
      for (const id of ids) {
        if (!targets.has(id)) {
          expect(layers.get(id)).toBe(0);
        }
      }
      for (const [from, to] of report.edges) {
        expect(layers.get(to)!).toBeGreaterThan(layers.get(from)!);
      }
    }
  });

  it('assigns the longest-path depth', () => {
    // 0 -> 1 -> 3 and 0 -> 3: the long way around wins.
    const layers = layerByNode([0, 1, 3], [[0, 1], [1, 3], [0, 3]]);
    expect(layers.get(0)).toBe(0);
    expect(layers.get(1)).toBe(1);
    expect(layers.get(3)).toBe(2);
  });
});

describe('layoutDataflow', () => {
  it.each(FIXTURE_NAMES)('lays %s out left-to-right with no overlaps', (name) => {
    const report = fixtureIndex(name).report;
    const ids = report.nodes.map((n) => n.id);
    const layout = layoutDataflow(ids, report.edges);
    expect(layout.boxes).toHaveLength(ids.length);

    const boxByNode = new Map(layout.boxes.map((box) => [box.node, box]));
    for (const [from, to] of report.edges) {
      expect(boxByNode.get(to)!.x).toBeGreaterThan(boxByNode.get(from)!.x);
    }

    const slots = new Set<string>();
    for (const box of layout.boxes) {
      const slot = `${box.layer}:${box.row}`;
      expect(slots.has(slot)).toBe(false);
      slots.add(slot);
      expect(box.x).toBeLessThanOrEqual(layout.width - box.width);
      expect(box.y).toBeLessThanOrEqual(layout.height - box.height);
    }
  });

  it('stacks nodes within a layer by ascending id', () => {
    const report = fixtureIndex('filter_signal').report;
    const ids = report.nodes.map((n) => n.id);
    const layout = layoutDataflow(ids, report.edges);
    const byLayer = new Map<number, number[]>();
    for (const box of layout.boxes) {
      if (!byLayer.has(box.layer)) {
        byLayer.set(box.layer, []);
      }
      byLayer.get(box.layer)![box.row] = box.node;
    }
    for (const idsInLayer of byLayer.values()) {
      expect(idsInLayer).toEqual([...idsInLayer].sort((a, b) => a - b));
    }
  });

  it('is deterministic', () => {
    const report = fixtureIndex('fig4').report;
    const ids = report.nodes.map((n) => n.id);
    expect(layoutDataflow(ids, report.edges)).toEqual(layoutDataflow(ids, report.edges));
  });

  it('handles an empty graph', () => {
    const layout = layoutDataflow([], []);
    expect(layout.boxes).toEqual([]);
    expect(layout.width).toBe(0);
    expect(layout.height).toBe(0);
  });
});

describe('connectedSubgraph', () => {
  it('returns the node plus everything upstream and downstream', () => {
    const edges: Array<[number, number]> = [[0, 1], [1, 2], [3, 2], [4, 5]];
    expect(connectedSubgraph(edges, 1)).toEqual(new Set([0, 1, 2]));
    expect(connectedSubgraph(edges, 2)).toEqual(new Set([0, 1, 2, 3]));
    expect(connectedSubgraph(edges, 4)).toEqual(new Set([4, 5]));
  });

  it('keeps an isolated node by itself', () => {
    expect(connectedSubgraph([], 7)).toEqual(new Set([7]));
  });

  it('includes the chain a fixture signal actually drives', () => {
    const index = fixtureIndex('filter_signal');
    const signal = index.report.nodes.find((n) => n.kind === 'Signal')!;
    const reachable = connectedSubgraph(index.report.edges, signal.id);
    for (const id of index.pulse(1)!.evaluated) {
      expect(reachable.has(id)).toBe(true);
    }
  });
});
