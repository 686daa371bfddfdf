/**
 * Browser entry point: wires the coordinated views to the profiling server.
 *
 * The client is stateless with respect to the backend — every render derives
 * from the last GET /report snapshot plus a small SelectionState. Hovering
 * or selecting in any view routes through resolveLinkedElements, so the
 * editor, icicle, and dataflow panes always highlight consistent sets.
 */

import {kindColor, runtimeFill} from './colors';
import {connectedSubgraph, layoutDataflow} from './dataflow';
import {layoutIcicle} from './icicle';
import type {Ref, SelectionState} from './linking';
import {
  INITIAL_SELECTION,
  resolveLinkedElements,
  selectPulse,
  withActivePulse,
  withHovered,
  withSelected,
} from './linking';
import {ReportIndex} from './report';
import type {EditorHighlight, PulseSummary} from './views';
import {
  addressKey,
  formatNs,
  renderDataflowSvg,
  renderIcicleSvg,
  renderNodeTableHtml,
  renderPulseTableHtml,
  renderSpecEditorHtml,
  triggerLabel,
} from './views';

const ICICLE_WIDTH = 640;

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (found === null) {
    throw new Error(`missing #${id}`);
  }
  return found as T;
}

let index: ReportIndex | undefined;
let state: SelectionState = INITIAL_SELECTION;
let mutationInFlight = false;

function setStatus(message: string, isError = false): void {
  const status = element<HTMLElement>('status');
  status.textContent = message;
  status.className = isError ? 'error' : '';
}

async function loadReport(): Promise<void> {
  const response = await fetch('/report');
  if (!response.ok) {
    setStatus(`GET /report failed: ${response.status}`, true);
    return;
  }
  index = ReportIndex.fromText(await response.text());
  const last = index.report.pulses.at(-1);
  state = {...INITIAL_SELECTION, activePulse: last === undefined ? 0 : last.pulse_id};
  element<HTMLTextAreaElement>('editor-input').value = index.report.spec_text;
  renderAll();
}

function highlightSets(idx: ReportIndex): {
  editor: EditorHighlight[];
  nodes: {hovered: Set<number>; selected: Set<number>};
  cells: {hovered: Set<string>; selected: Set<string>};
} {
  const editor: EditorHighlight[] = [];
  const nodes = {hovered: new Set<number>(), selected: new Set<number>()};
  const cells = {hovered: new Set<string>(), selected: new Set<string>()};
  const apply = (ref: Ref | undefined, cls: 'hovered' | 'selected'): void => {
    if (ref === undefined) {
      return;
    }
    const linked = resolveLinkedElements(idx, ref, state.activePulse);
    for (const spanRef of linked.spans) {
      editor.push({span: spanRef.span, className: `hl-${cls}`});
    }
    for (const id of linked.nodes) {
      nodes[cls].add(id);
    }
    for (const address of linked.icicle) {
      cells[cls].add(addressKey(address));
    }
  };
  apply(state.selected, 'selected');
  apply(state.hovered, 'hovered');
  return {editor, nodes, cells};
}

function renderAll(): void {
  if (index === undefined) {
    return;
  }
  const idx = index;
  const view = selectPulse(idx, state.activePulse);
  if (view === undefined) {
    return;
  }
  const marks = highlightSets(idx);

  element<HTMLElement>('banner').textContent =
    `pulse ${view.pulseId} (${triggerLabel(view.trigger)}) — total ${formatNs(view.wallTotal)}`;

  element<HTMLElement>('editor-view').innerHTML = renderSpecEditorHtml(
    idx.report.spec_text,
    marks.editor,
  );

  const zoom = state.selected?.kind === 'icicle' ? state.selected.address : undefined;
  element<HTMLElement>('icicle-pane').innerHTML = renderIcicleSvg(
    layoutIcicle(view.icicle, ICICLE_WIDTH, zoom),
    ICICLE_WIDTH,
    {highlighted: marks.cells.hovered, selected: marks.cells.selected},
  );

  const timings = idx.timingsByNode(view.pulseId);
  const maxTiming = Math.max(0, ...timings.values());
  const fills = new Map<number, string>();
  const labels = new Map<number, string>();
  for (const node of idx.report.nodes) {
    fills.set(node.id, runtimeFill(timings.get(node.id) ?? 0, maxTiming));
    labels.set(node.id, `${node.kind}#${node.id}`);
  }
  const focus =
    state.selected?.kind === 'node'
      ? connectedSubgraph(idx.report.edges, state.selected.node)
      : undefined;
  element<HTMLElement>('dataflow-pane').innerHTML = renderDataflowSvg(
    layoutDataflow(idx.allNodeIds(), idx.report.edges),
    {
      labels,
      fills,
      dimmed: new Set(view.dimmed),
      highlighted: marks.nodes.hovered,
      selected: marks.nodes.selected,
      visible: focus,
    },
  );

  const tooltips = new Map<number, string>();
  for (const [id, delta] of view.deltaByNode) {
    tooltips.set(id, `rows in ${delta.rows_in}, out ${delta.rows_out}${delta.changed ? '' : ' (unchanged)'}`);
  }
  element<HTMLElement>('node-table-pane').innerHTML = renderNodeTableHtml(view.table, {
    highlighted: marks.nodes.hovered,
    selected: marks.nodes.selected,
    tooltips,
  });

  const summaries: PulseSummary[] = idx.report.pulses.map((pulse) => ({
    pulseId: pulse.pulse_id,
    trigger: pulse.trigger,
    wallTotal: pulse.wall_total,
    evaluatedCount: pulse.evaluated.length,
  }));
  element<HTMLElement>('pulse-table-pane').innerHTML = renderPulseTableHtml(
    summaries,
    state.activePulse,
  );

  element<HTMLElement>('scene-pane').innerHTML = idx.report.scene_svg;
  element<HTMLElement>('legend-pane').innerHTML = idx.report.nodes
    .map((n) => n.kind)
    .filter((kind, i, all) => all.indexOf(kind) === i)
    .map((kind) => `<span class="chip" style="background:${kindColor(kind)}">${kind}</span>`)
    .join(' ');
}

function refFromEventTarget(target: EventTarget | null): Ref | undefined {
  if (!(target instanceof Element)) {
    return undefined;
  }
  const nodeEl = target.closest('[data-node]');
  if (nodeEl !== null) {
    return {kind: 'node', node: Number(nodeEl.getAttribute('data-node'))};
  }
  const cellEl = target.closest('[data-address]');
  if (cellEl !== null) {
    const raw = cellEl.getAttribute('data-address') ?? '';
    const address = raw === '' ? [] : raw.split('.').map(Number);
    return {kind: 'icicle', pulse: state.activePulse, address};
  }
  return undefined;
}

function wireLinkedPane(id: string): void {
  const pane = element<HTMLElement>(id);
  pane.addEventListener('mouseover', (event) => {
    if (index === undefined) {
      return;
    }
    const ref = refFromEventTarget(event.target);
    if (ref !== undefined) {
      state = withHovered(index, state, ref);
      renderAll();
    }
  });
  pane.addEventListener('mouseleave', () => {
    if (index !== undefined && state.hovered !== undefined) {
      state = withHovered(index, state, undefined);
      renderAll();
    }
  });
  pane.addEventListener('click', (event) => {
    if (index === undefined) {
      return;
    }
    const ref = refFromEventTarget(event.target);
    state = withSelected(index, state, ref);
    renderAll();
  });
}

function wirePulseTable(): void {
  element<HTMLElement>('pulse-table-pane').addEventListener('click', (event) => {
    if (index === undefined || !(event.target instanceof Element)) {
      return;
    }
    const row = event.target.closest('[data-pulse]');
    if (row !== null) {
      state = withActivePulse(index, state, Number(row.getAttribute('data-pulse')));
      renderAll();
    }
  });
}

async function postAndReload(url: string, body: string, contentType: string): Promise<void> {
  if (mutationInFlight) {
    setStatus('a change is already in flight', true);
    return;
  }
  mutationInFlight = true;
  try {
    const response = await fetch(url, {
      method: 'POST',
      headers: {'Content-Type': contentType},
      body,
    });
    if (response.status === 409) {
      setStatus('server is busy evaluating; try again', true);
      return;
    }
    if (!response.ok) {
      const detail = await response.text();
      setStatus(`POST ${url} failed (${response.status}): ${detail}`, true);
      return;
    }
    setStatus('');
    await loadReport();
  } finally {
    mutationInFlight = false;
  }
}

function wireForms(): void {
  element<HTMLFormElement>('signal-form').addEventListener('submit', (event) => {
    event.preventDefault();
    const name = element<HTMLInputElement>('signal-name').value.trim();
    const raw = element<HTMLInputElement>('signal-value').value;
    let value: unknown;
    try {
      value = JSON.parse(raw);
    } catch {
      setStatus(`signal value must be JSON: ${raw}`, true);
      return;
    }
    void postAndReload('/signal', JSON.stringify({name, value}), 'application/json');
  });
  element<HTMLButtonElement>('profile-btn').addEventListener('click', () => {
    void postAndReload('/spec', element<HTMLTextAreaElement>('editor-input').value, 'application/json');
  });
}

function main(): void {
  wireLinkedPane('icicle-pane');
  wireLinkedPane('dataflow-pane');
  wireLinkedPane('node-table-pane');
  wirePulseTable();
  wireForms();
  void loadReport();
}

main();
