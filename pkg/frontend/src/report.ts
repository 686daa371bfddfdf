/**
 * Parsing and indexing of flowlens profile reports.
 *
 * A report is the single JSON document served by GET /report. Everything the
 * client shows derives from it: the client never recomputes timings or data.
 * The zod schema below mirrors the server's published report schema
 * (docs/report-schema.md in the backend package); `parseReport` rejects
 * anything that does not match it exactly.
 */

import {z} from 'zod';

/** A key-path into the chart spec: object keys and array indexes from the root. */
export type SpecPath = ReadonlyArray<string | number>;

export const NODE_KINDS = [
  'Source', 'Copy', 'Filter', 'Formula', 'Extent', 'Bin', 'Aggregate',
  'Collect', 'Signal', 'ScaleDomain', 'Scale', 'Encode', 'AxisTicks',
  'Render',
] as const;

export type NodeKind = (typeof NODE_KINDS)[number];

const nonNegative = z.number().int().min(0);

const PATH_SCHEMA = z.array(z.union([z.string(), z.number().int()]));

const SPAN_SCHEMA = z.strictObject({
  start_line: z.number().int().min(1),
  start_col: z.number().int().min(1),
  end_line: z.number().int().min(1),
  end_col: z.number().int().min(1),
  byte_start: nonNegative,
  byte_end: nonNegative,
});

const SPAN_ENTRY_SCHEMA = z.strictObject({
  path: PATH_SCHEMA,
  span: SPAN_SCHEMA,
});

const NODE_SCHEMA = z.strictObject({
  id: nonNegative,
  kind: z.enum(NODE_KINDS),
  origin: PATH_SCHEMA,
  params: z.record(z.string(), z.json()),
});

const EDGE_SCHEMA = z.tuple([nonNegative, nonNegative]);

const FORWARD_ENTRY_SCHEMA = z.strictObject({
  path: PATH_SCHEMA,
  nodes: z.array(nonNegative),
});

const BACKWARD_ENTRY_SCHEMA = z.strictObject({
  node: nonNegative,
  path: PATH_SCHEMA,
});

const TRIGGER_SCHEMA = z.union([
  z.literal('init'),
  z.strictObject({name: z.string(), value: z.json()}),
]);

const TIMING_SCHEMA = z.strictObject({
  node: nonNegative,
  duration_ns: nonNegative,
  seq: nonNegative,
});

const DELTA_SCHEMA = z.strictObject({
  node: nonNegative,
  rows_in: nonNegative,
  rows_out: nonNegative,
  changed: z.boolean(),
});

export interface IcicleNode {
  readonly label: string;
  readonly kind: 'root' | 'block' | 'node' | 'overhead';
  readonly value_ns: number;
  readonly path?: SpecPath | undefined;
  readonly node?: number | undefined;
  readonly children: ReadonlyArray<IcicleNode>;
}

const ICICLE_SCHEMA: z.ZodType<IcicleNode> = z.lazy(() =>
  z.strictObject({
    label: z.string(),
    kind: z.enum(['root', 'block', 'node', 'overhead']),
    value_ns: nonNegative,
    path: PATH_SCHEMA.optional(),
    node: nonNegative.optional(),
    children: z.array(ICICLE_SCHEMA),
  }),
);

const TABLE_ROW_SCHEMA = z.strictObject({
  node: nonNegative,
  kind: z.enum(NODE_KINDS),
  path: PATH_SCHEMA,
  duration_ns: nonNegative,
  share: z.number().min(0),
});

const PULSE_SCHEMA = z.strictObject({
  pulse_id: nonNegative,
  trigger: TRIGGER_SCHEMA,
  wall_total: nonNegative,
  evaluated: z.array(nonNegative),
  timings: z.array(TIMING_SCHEMA),
  data_deltas: z.array(DELTA_SCHEMA),
  icicle: ICICLE_SCHEMA,
  node_table: z.array(TABLE_ROW_SCHEMA),
});

export const PROFILE_REPORT_SCHEMA = z.strictObject({
  version: z.literal(1),
  spec_text: z.string(),
  spans: z.array(SPAN_ENTRY_SCHEMA),
  nodes: z.array(NODE_SCHEMA),
  edges: z.array(EDGE_SCHEMA),
  forward: z.array(FORWARD_ENTRY_SCHEMA),
  backward: z.array(BACKWARD_ENTRY_SCHEMA),
  pulses: z.array(PULSE_SCHEMA),
  scene_svg: z.string(),
});

export type Span = z.infer<typeof SPAN_SCHEMA>;
export type NodeDesc = z.infer<typeof NODE_SCHEMA>;
export type Trigger = z.infer<typeof TRIGGER_SCHEMA>;
export type TimingRecord = z.infer<typeof TIMING_SCHEMA>;
export type DataDelta = z.infer<typeof DELTA_SCHEMA>;
export type TableRow = z.infer<typeof TABLE_ROW_SCHEMA>;
export type Pulse = z.infer<typeof PULSE_SCHEMA>;
export type ProfileReport = z.infer<typeof PROFILE_REPORT_SCHEMA>;

/** Parse report JSON text, throwing if it does not match the schema. */
export function parseReport(text: string): ProfileReport {
  return PROFILE_REPORT_SCHEMA.parse(JSON.parse(text));
}

/** Stable map key for a spec path. */
export function pathKey(path: SpecPath): string {
  return JSON.stringify(path);
}

/** True when `prefix` is a (non-strict) prefix of `path`. */
export function isPathPrefix(prefix: SpecPath, path: SpecPath): boolean {
  if (prefix.length > path.length) {
    return false;
  }
  return prefix.every((part, i) => part === path[i]);
}

/**
 * A parsed report plus the lookup tables every view needs: spans by path,
 * the bidirectional path<->node mapping, and pulses by id. Indexes are built
 * once; all accessors are reads.
 */
export class ReportIndex {
  readonly report: ProfileReport;

  private readonly spanByPath = new Map<string, Span>();
  private readonly forwardByPath = new Map<string, ReadonlyArray<number>>();
  private readonly pathByNode = new Map<number, SpecPath>();
  private readonly nodeById = new Map<number, NodeDesc>();
  private readonly pulseById = new Map<number, Pulse>();

  constructor(report: ProfileReport) {
    this.report = report;
    for (const entry of report.spans) {
      this.spanByPath.set(pathKey(entry.path), entry.span);
    }
    for (const entry of report.forward) {
      this.forwardByPath.set(pathKey(entry.path), entry.nodes);
    }
    for (const entry of report.backward) {
      this.pathByNode.set(entry.node, entry.path);
    }
    for (const node of report.nodes) {
      this.nodeById.set(node.id, node);
    }
    for (const pulse of report.pulses) {
      this.pulseById.set(pulse.pulse_id, pulse);
    }
  }

  static fromText(text: string): ReportIndex {
    return new ReportIndex(parseReport(text));
  }

  /** The source span recorded for exactly this path, if any. */
  spanOf(path: SpecPath): Span | undefined {
    return this.spanByPath.get(pathKey(path));
  }

  /**
   * The span for a path, falling back to the nearest enclosing path that has
   * one. The root path [] spans the whole document, so any path that exists
   * in the spec resolves to something.
   */
  enclosingSpanOf(path: SpecPath): {path: SpecPath; span: Span} | undefined {
    for (let n = path.length; n >= 0; n--) {
      const prefix = path.slice(0, n);
      const span = this.spanOf(prefix);
      if (span !== undefined) {
        return {path: prefix, span};
      }
    }
    return undefined;
  }

  /** Node ids mapped to exactly this path (no descendants). */
  nodesAtPath(path: SpecPath): ReadonlyArray<number> {
    return this.forwardByPath.get(pathKey(path)) ?? [];
  }

  /**
   * Node ids mapped to this path or any descendant of it, ascending.
   * The empty path therefore covers every node.
   */
  nodesUnderPath(path: SpecPath): number[] {
    const out = new Set<number>();
    for (const entry of this.report.forward) {
      if (isPathPrefix(path, entry.path)) {
        for (const id of entry.nodes) {
          out.add(id);
        }
      }
    }
    return [...out].sort((a, b) => a - b);
  }

  /** The origin path of a node, or undefined for an unknown id. */
  pathOfNode(node: number): SpecPath | undefined {
    return this.pathByNode.get(node);
  }

  node(id: number): NodeDesc | undefined {
    return this.nodeById.get(id);
  }

  pulse(id: number): Pulse | undefined {
    return this.pulseById.get(id);
  }

  /** Every dataflow node id, ascending. */
  allNodeIds(): number[] {
    return this.report.nodes.map((n) => n.id).sort((a, b) => a - b);
  }

  /** Every path that maps to at least one node. */
  mappedPaths(): SpecPath[] {
    return this.report.forward.map((entry) => entry.path);
  }

  /** Every path that has a recorded source span. */
  spannedPaths(): SpecPath[] {
    return this.report.spans.map((entry) => entry.path);
  }

  /** Per-node self time for one pulse. */
  timingsByNode(pulseId: number): Map<number, number> {
    const out = new Map<number, number>();
    const pulse = this.pulseById.get(pulseId);
    if (pulse !== undefined) {
      for (const t of pulse.timings) {
        out.set(t.node, t.duration_ns);
      }
    }
    return out;
  }
}
