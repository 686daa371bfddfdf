/**
 * Geometry for the icicle graph: a space-filling layout where each row is
 * one abstraction level and each cell's width is proportional to its
 * aggregated time. The layout is pure; rendering happens in views.ts.
 */

import type {IcicleAddress} from './linking';
import {icicleNodeAt} from './linking';
import type {IcicleNode, SpecPath} from './report';

export interface IcicleRect {
  readonly x: number;
  readonly width: number;
  /** Row index: distance from the tree root, regardless of zoom. */
  readonly depth: number;
  readonly label: string;
  readonly kind: IcicleNode['kind'];
  readonly valueNs: number;
  readonly address: IcicleAddress;
  readonly path?: SpecPath | undefined;
  readonly node?: number | undefined;
}

function place(
  node: IcicleNode,
  address: IcicleAddress,
  x: number,
  depth: number,
  scale: number,
  out: IcicleRect[],
): void {
  const width = node.value_ns * scale;
  out.push({
    x,
    width,
    depth,
    label: node.label,
    kind: node.kind,
    valueNs: node.value_ns,
    address,
    path: node.path,
    node: node.node,
  });
  let childX = x;
  node.children.forEach((child, i) => {
    place(child, [...address, i], childX, depth + 1, scale, out);
    childX += child.value_ns * scale;
  });
}

/**
 * Lay out one pulse's icicle tree into rectangles covering [0, width].
 *
 * With a zoom address, the zoomed subtree is rescaled to span the full
 * width and each of its ancestors becomes a full-width breadcrumb row, so
 * selecting a cell enlarges it without losing the path back to the root.
 * A zoom address that no longer exists falls back to the unzoomed layout.
 *
 * Cells are emitted in drawing order (parent before children, siblings left
 * to right); a parent's children tile its horizontal extent exactly.
 */
export function layoutIcicle(
  root: IcicleNode,
  width: number,
  zoom?: IcicleAddress,
): IcicleRect[] {
  const target = zoom === undefined ? root : icicleNodeAt(root, zoom);
  if (zoom === undefined || target === undefined || target === root) {
    const scale = root.value_ns > 0 ? width / root.value_ns : 0;
    const out: IcicleRect[] = [];
    place(root, [], 0, 0, scale, out);
    return out;
  }

  const out: IcicleRect[] = [];
  for (let depth = 0; depth < zoom.length; depth++) {
    const ancestor = icicleNodeAt(root, zoom.slice(0, depth));
    if (ancestor === undefined) {
      break;
    }
    out.push({
      x: 0,
      width,
      depth,
      label: ancestor.label,
      kind: ancestor.kind,
      valueNs: ancestor.value_ns,
      address: zoom.slice(0, depth),
      path: ancestor.path,
      node: ancestor.node,
    });
  }
  const scale = target.value_ns > 0 ? width / target.value_ns : 0;
  place(target, zoom, 0, zoom.length, scale, out);
  return out;
}
