/**
 * Pure builders for everything the client draws: editor highlight segments,
 * the icicle and dataflow SVGs, and the node/pulse tables. Each builder maps
 * plain data to an HTML/SVG string, so the views are testable without a DOM
 * and a given report always renders to identical markup.
 */

import {DIMMED_FILL, HOVER_HIGHLIGHT, ICICLE_LEVEL_FILLS, SELECT_HIGHLIGHT} from './colors';
import type {DataflowLayout} from './dataflow';
import type {IcicleRect} from './icicle';
import type {IcicleAddress} from './linking';
import type {Span, SpecPath, TableRow, Trigger} from './report';

export function escapeHtml(text: string): string {
  return text
    .replaceAll('&', '&amp;')
    .replaceAll('<', '&lt;')
    .replaceAll('>', '&gt;')
    .replaceAll('"', '&quot;');
}

/** Human label for a spec path, e.g. data[1].transform[0]. */
export function pathLabel(path: SpecPath): string {
  if (path.length === 0) {
    return '(root)';
  }
  let out = '';
  for (const part of path) {
    out += typeof part === 'number' ? `[${part}]` : out === '' ? String(part) : `.${part}`;
  }
  return out;
}

/** Human label for a pulse trigger. */
export function triggerLabel(trigger: Trigger): string {
  if (trigger === 'init') {
    return 'init';
  }
  return `${trigger.name} = ${JSON.stringify(trigger.value)}`;
}

/** Nanoseconds formatted at a readable magnitude. */
export function formatNs(ns: number): string {
  if (ns < 1_000) {
    return `${ns} ns`;
  }
  if (ns < 1_000_000) {
    return `${(ns / 1_000).toFixed(2)} µs`;
  }
  if (ns < 1_000_000_000) {
    return `${(ns / 1_000_000).toFixed(2)} ms`;
  }
  return `${(ns / 1_000_000_000).toFixed(2)} s`;
}

/** Stable string key for an icicle cell address. */
export function addressKey(address: IcicleAddress): string {
  return address.join('.');
}

export interface EditorHighlight {
  readonly span: Span;
  readonly className: string;
}

export interface EditorSegment {
  readonly byteStart: number;
  readonly byteEnd: number;
  readonly text: string;
  readonly classNames: ReadonlyArray<string>;
}

/**
 * Split spec text into contiguous segments carrying the highlight classes
 * active over each. Spans address UTF-8 bytes (as recorded by the parser),
 * so the text is segmented on its encoded form; overlapping and nested
 * highlights simply stack their class names.
 */
export function editorSegments(
  specText: string,
  highlights: ReadonlyArray<EditorHighlight>,
): EditorSegment[] {
  const bytes = new TextEncoder().encode(specText);
  const decoder = new TextDecoder();
  const bounds = new Set<number>([0, bytes.length]);
  for (const h of highlights) {
    bounds.add(Math.min(h.span.byte_start, bytes.length));
    bounds.add(Math.min(h.span.byte_end, bytes.length));
  }
  const sorted = [...bounds].sort((a, b) => a - b);
  const out: EditorSegment[] = [];
  for (let i = 0; i + 1 < sorted.length; i++) {
    const byteStart = sorted[i]!;
    const byteEnd = sorted[i + 1]!;
    const classNames = highlights
      .filter((h) => h.span.byte_start <= byteStart && byteEnd <= h.span.byte_end)
      .map((h) => h.className);
    out.push({
      byteStart,
      byteEnd,
      text: decoder.decode(bytes.subarray(byteStart, byteEnd)),
      classNames: [...new Set(classNames)],
    });
  }
  return out;
}

/** The editor pane: spec text with highlight spans, inside a <pre>. */
export function renderSpecEditorHtml(
  specText: string,
  highlights: ReadonlyArray<EditorHighlight>,
): string {
  const parts = editorSegments(specText, highlights).map((segment) => {
    const text = escapeHtml(segment.text);
    if (segment.classNames.length === 0) {
      return text;
    }
    return `<span class="${segment.classNames.join(' ')}">${text}</span>`;
  });
  return `<pre class="spec-editor">${parts.join('')}</pre>`;
}

export interface IcicleRenderOptions {
  readonly rowHeight?: number;
  readonly highlighted?: ReadonlySet<string>;
  readonly selected?: ReadonlySet<string>;
  /** Hide labels on cells narrower than this many pixels. */
  readonly minLabelWidth?: number;
}

/** The icicle pane: one SVG rect per laid-out cell, row per depth. */
export function renderIcicleSvg(rects: ReadonlyArray<IcicleRect>, width: number, options: IcicleRenderOptions = {}): string {
  const rowHeight = options.rowHeight ?? 22;
  const minLabelWidth = options.minLabelWidth ?? 40;
  const depth = rects.reduce((d, r) => Math.max(d, r.depth), 0);
  const height = (depth + 1) * rowHeight;
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" class="icicle" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
  ];
  for (const rect of rects) {
    if (rect.width <= 0) {
      continue;
    }
    const key = addressKey(rect.address);
    const fill = options.selected?.has(key)
      ? SELECT_HIGHLIGHT
      : options.highlighted?.has(key)
        ? HOVER_HIGHLIGHT
        : (ICICLE_LEVEL_FILLS[rect.kind] ?? '#cccccc');
    const x = rect.x.toFixed(2);
    const w = rect.width.toFixed(2);
    const y = rect.depth * rowHeight;
    const title = `${rect.label} — ${formatNs(rect.valueNs)}`;
    parts.push(
      `<g class="icicle-cell" data-address="${key}">` +
        `<rect x="${x}" y="${y}" width="${w}" height="${rowHeight - 1}" fill="${fill}" stroke="#ffffff">` +
        `<title>${escapeHtml(title)}</title></rect>` +
        (rect.width >= minLabelWidth
          ? `<text x="${(rect.x + 3).toFixed(2)}" y="${y + rowHeight - 7}" font-size="11">${escapeHtml(rect.label)}</text>`
          : '') +
        `</g>`,
    );
  }
  parts.push('</svg>');
  return parts.join('');
}

export interface DataflowRenderOptions {
  readonly labels: ReadonlyMap<number, string>;
  readonly fills: ReadonlyMap<number, string>;
  readonly dimmed?: ReadonlySet<number>;
  readonly highlighted?: ReadonlySet<number>;
  readonly selected?: ReadonlySet<number>;
  /** When set, draw only this subgraph (focus mode). */
  readonly visible?: ReadonlySet<number>;
}

/** The dataflow pane: layered boxes joined by edges, left to right. */
export function renderDataflowSvg(layout: DataflowLayout, options: DataflowRenderOptions): string {
  const pad = 8;
  const width = layout.width + 2 * pad;
  const height = layout.height + 2 * pad;
  const boxByNode = new Map(layout.boxes.map((box) => [box.node, box]));
  const shown = (node: number): boolean => options.visible === undefined || options.visible.has(node);

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" class="dataflow" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
  ];
  for (const edge of layout.edges) {
    const from = boxByNode.get(edge.from);
    const to = boxByNode.get(edge.to);
    if (from === undefined || to === undefined || !shown(edge.from) || !shown(edge.to)) {
      continue;
    }
    const x1 = (pad + from.x + from.width).toFixed(2);
    const y1 = (pad + from.y + from.height / 2).toFixed(2);
    const x2 = (pad + to.x).toFixed(2);
    const y2 = (pad + to.y + to.height / 2).toFixed(2);
    parts.push(
      `<line class="flow-edge" x1="${x1}" y1="${y1}" x2="${x2}" y2="${y2}" stroke="#999999"/>`,
    );
  }
  for (const box of layout.boxes) {
    if (!shown(box.node)) {
      continue;
    }
    const dimmed = options.dimmed?.has(box.node) ?? false;
    const fill = dimmed ? DIMMED_FILL : (options.fills.get(box.node) ?? '#ffffff');
    const stroke = options.selected?.has(box.node)
      ? SELECT_HIGHLIGHT
      : options.highlighted?.has(box.node)
        ? HOVER_HIGHLIGHT
        : '#555555';
    const strokeWidth = options.selected?.has(box.node) || options.highlighted?.has(box.node) ? 3 : 1;
    const label = options.labels.get(box.node) ?? String(box.node);
    const classes = dimmed ? 'flow-node dimmed' : 'flow-node';
    parts.push(
      `<g class="${classes}" data-node="${box.node}" opacity="${dimmed ? '0.45' : '1'}">` +
        `<rect x="${pad + box.x}" y="${pad + box.y}" width="${box.width}" height="${box.height}" rx="4"` +
        ` fill="${fill}" stroke="${stroke}" stroke-width="${strokeWidth}"/>` +
        `<text x="${pad + box.x + 6}" y="${pad + box.y + box.height - 8}" font-size="11">${escapeHtml(label)}</text>` +
        `</g>`,
    );
  }
  parts.push('</svg>');
  return parts.join('');
}

export interface NodeTableRenderOptions {
  readonly dimmed?: ReadonlySet<number>;
  readonly highlighted?: ReadonlySet<number>;
  readonly selected?: ReadonlySet<number>;
  readonly tooltips?: ReadonlyMap<number, string>;
}

/**
 * The node table: one row per evaluated operator, in the report's order
 * (slowest first), with each node's share of the pulse's operator time.
 */
export function renderNodeTableHtml(rows: ReadonlyArray<TableRow>, options: NodeTableRenderOptions = {}): string {
  const parts: string[] = [
    '<table class="node-table"><thead><tr>' +
      '<th>node</th><th>kind</th><th>origin</th><th>self time</th><th>share</th>' +
      '</tr></thead><tbody>',
  ];
  for (const row of rows) {
    const classes: string[] = [];
    if (options.selected?.has(row.node)) {
      classes.push('selected');
    } else if (options.highlighted?.has(row.node)) {
      classes.push('highlighted');
    }
    if (options.dimmed?.has(row.node)) {
      classes.push('dimmed');
    }
    const classAttr = classes.length > 0 ? ` class="${classes.join(' ')}"` : '';
    const tooltip = options.tooltips?.get(row.node);
    const titleAttr = tooltip === undefined ? '' : ` title="${escapeHtml(tooltip)}"`;
    parts.push(
      `<tr data-node="${row.node}"${classAttr}${titleAttr}>` +
        `<td>${row.node}</td>` +
        `<td>${escapeHtml(row.kind)}</td>` +
        `<td>${escapeHtml(pathLabel(row.path))}</td>` +
        `<td>${formatNs(row.duration_ns)}</td>` +
        `<td>${(row.share * 100).toFixed(1)}%</td>` +
        `</tr>`,
    );
  }
  parts.push('</tbody></table>');
  return parts.join('');
}

export interface PulseSummary {
  readonly pulseId: number;
  readonly trigger: Trigger;
  readonly wallTotal: number;
  readonly evaluatedCount: number;
}

/** The pulse table: one row per recorded pulse; the active row is marked. */
export function renderPulseTableHtml(pulses: ReadonlyArray<PulseSummary>, activePulse: number): string {
  const parts: string[] = [
    '<table class="pulse-table"><thead><tr>' +
      '<th>pulse</th><th>trigger</th><th>wall total</th><th>nodes</th>' +
      '</tr></thead><tbody>',
  ];
  for (const pulse of pulses) {
    const active = pulse.pulseId === activePulse ? ' class="active"' : '';
    parts.push(
      `<tr data-pulse="${pulse.pulseId}"${active}>` +
        `<td>${pulse.pulseId}</td>` +
        `<td>${escapeHtml(triggerLabel(pulse.trigger))}</td>` +
        `<td>${formatNs(pulse.wallTotal)}</td>` +
        `<td>${pulse.evaluatedCount}</td>` +
        `</tr>`,
    );
  }
  parts.push('</tbody></table>');
  return parts.join('');
}
