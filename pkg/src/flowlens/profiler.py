"""Profile aggregation and the report file.

The icicle tree rolls per-operator timings up the spec's block hierarchy:
each timing record becomes a leaf under the deepest block whose path is a
prefix of the operator's origin, every internal value is exactly the sum
of its children, and the root is the measured wall time of the pulse with
an explicit overhead leaf absorbing the difference.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from .chart import BlockNode
from .document import SpecDocument
from .errors import SchemaError, UnknownNode, UnknownPulse
from .lowering import DataflowDesc, ProfilingMap, path_for_node
from .report_schema import validate_report
from .runtime import Pulse, Runtime, SignalUpdate

SpecPath = Tuple[Union[str, int], ...]


@dataclass(frozen=True)
class IcicleNode:
    label: str
    kind: str  # root | block | node | overhead
    value_ns: int
    children: Tuple["IcicleNode", ...] = ()
    path: Optional[SpecPath] = None
    node_id: Optional[int] = None

    def to_json(self) -> dict:
        out = {"label": self.label, "kind": self.kind, "value_ns": self.value_ns}
        if self.path is not None:
            out["path"] = list(self.path)
        if self.node_id is not None:
            out["node"] = self.node_id
        out["children"] = [c.to_json() for c in self.children]
        return out


def build_icicle(pulse: Pulse, desc: DataflowDesc, mapping: ProfilingMap,
                 blocks: BlockNode) -> IcicleNode:
    """Aggregate one pulse's timings over the block hierarchy."""
    block_paths = set()

    def collect(block: BlockNode) -> None:
        block_paths.add(tuple(block.path))
        for child in block.children:
            collect(child)

    collect(blocks)

    by_block: Dict[SpecPath, List] = {}
    for rec in pulse.timings:
        origin = tuple(path_for_node(mapping, rec.node_id))
        spot = origin
        while spot not in block_paths:
            spot = spot[:-1]
        by_block.setdefault(spot, []).append(rec)

    kinds = {n.id: n.kind for n in desc.nodes}

    def leaves(block_path: SpecPath) -> List[IcicleNode]:
        out = []
        for rec in sorted(by_block.get(block_path, ()), key=lambda r: r.seq):
            origin = tuple(path_for_node(mapping, rec.node_id))
            out.append(IcicleNode(
                label=f"{kinds[rec.node_id]}#{rec.node_id}", kind="node",
                value_ns=rec.duration_ns, path=origin, node_id=rec.node_id))
        return out

    def build(block: BlockNode) -> Optional[IcicleNode]:
        children = leaves(tuple(block.path))
        for sub in block.children:
            built = build(sub)
            if built is not None:
                children.append(built)
        if not children:
            return None
        return IcicleNode(label=block.label, kind="block",
                          value_ns=sum(c.value_ns for c in children),
                          children=tuple(children), path=tuple(block.path))

    top = leaves(())
    for sub in blocks.children:
        built = build(sub)
        if built is not None:
            top.append(built)
    measured = sum(c.value_ns for c in top)
    top.append(IcicleNode(label="overhead", kind="overhead",
                          value_ns=pulse.wall_total - measured))
    return IcicleNode(label="total", kind="root", value_ns=pulse.wall_total,
                      children=tuple(top), path=())


def node_table(pulse: Pulse, desc: DataflowDesc,
               mapping: ProfilingMap) -> List[dict]:
    """Flat per-operator rows, slowest first (ties broken by node id)."""
    rows = []
    kinds = {n.id: n.kind for n in desc.nodes}
    for rec in pulse.timings:
        share = rec.duration_ns / pulse.wall_total if pulse.wall_total else 0.0
        rows.append({
            "node": rec.node_id,
            "kind": kinds[rec.node_id],
            "path": list(path_for_node(mapping, rec.node_id)),
            "duration_ns": rec.duration_ns,
            "share": share,
        })
    rows.sort(key=lambda r: (-r["duration_ns"], r["node"]))
    return rows


@dataclass(frozen=True)
class ProfileReport:
    """The report exactly as serialized: all fields are JSON-shaped."""

    version: int
    spec_text: str
    spans: List[dict]
    nodes: List[dict]
    edges: List[List[int]]
    forward: List[dict]
    backward: List[dict]
    pulses: List[dict]
    scene_svg: str

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "spec_text": self.spec_text,
            "spans": self.spans,
            "nodes": self.nodes,
            "edges": self.edges,
            "forward": self.forward,
            "backward": self.backward,
            "pulses": self.pulses,
            "scene_svg": self.scene_svg,
        }

    def pulse(self, pulse_id: int) -> dict:
        for p in self.pulses:
            if p["pulse_id"] == pulse_id:
                return p
        raise UnknownPulse(f"no pulse {pulse_id}")

    def origin_of(self, node_id: int) -> List:
        for entry in self.backward:
            if entry["node"] == node_id:
                return entry["path"]
        raise UnknownNode(f"no such node: {node_id}")


def timings_for_path(report: ProfileReport, pulse_id: int,
                     path) -> Tuple[int, List[int]]:
    """Total time in one pulse attributable to a spec path (its subtree),
    plus the contributing node ids."""
    pulse = report.pulse(pulse_id)
    prefix = tuple(path)
    origins = {e["node"]: tuple(e["path"]) for e in report.backward}
    total = 0
    nodes = []
    for rec in pulse["timings"]:
        origin = origins[rec["node"]]
        if origin[:len(prefix)] == prefix:
            total += rec["duration_ns"]
            nodes.append(rec["node"])
    return total, sorted(nodes)


def _jsonify(value):
    if isinstance(value, tuple):
        return [_jsonify(v) for v in value]
    if isinstance(value, list):
        return [_jsonify(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    return value


def _node_params(node) -> dict:
    params = dict(node.params)
    if node.kind == "Source" and "values" in params:
        # inline rows would bloat the report; keep just the row count
        return {"name": params["name"], "row_count": len(params["values"])}
    return _jsonify(params)


def _trigger_json(trigger) -> Union[str, dict]:
    if isinstance(trigger, SignalUpdate):
        return {"name": trigger.name, "value": trigger.value}
    return trigger


def _pulse_json(pulse: Pulse, desc: DataflowDesc, mapping: ProfilingMap,
                blocks: BlockNode) -> dict:
    return {
        "pulse_id": pulse.pulse_id,
        "trigger": _trigger_json(pulse.trigger),
        "wall_total": pulse.wall_total,
        "evaluated": sorted(pulse.evaluated),
        "timings": [{"node": t.node_id, "duration_ns": t.duration_ns,
                     "seq": t.seq} for t in pulse.timings],
        "data_deltas": [{"node": nid, "rows_in": d.rows_in,
                         "rows_out": d.rows_out, "changed": d.changed}
                        for nid, d in sorted(pulse.data_deltas.items())],
        "icicle": build_icicle(pulse, desc, mapping, blocks).to_json(),
        "node_table": node_table(pulse, desc, mapping),
    }


def build_report(document: SpecDocument, desc: DataflowDesc,
                 mapping: ProfilingMap, blocks: BlockNode,
                 runtime: Runtime, scene_svg: str) -> ProfileReport:
    spans = [{"path": list(path), "span": node.span.to_json()}
             for path, node in document.walk()]
    nodes = [{"id": n.id, "kind": n.kind, "origin": list(n.origin),
              "params": _node_params(n)} for n in desc.nodes]
    edges = [[s, d] for s, d in desc.edges]
    forward = [{"path": list(path), "nodes": list(ids)}
               for path, ids in mapping.forward.items()]
    backward = [{"node": nid, "path": list(path)}
                for nid, path in sorted(mapping.backward.items())]
    pulses = [_pulse_json(p, desc, mapping, blocks) for p in runtime.pulses]
    return ProfileReport(version=1, spec_text=document.source_text,
                         spans=spans, nodes=nodes, edges=edges,
                         forward=forward, backward=backward, pulses=pulses,
                         scene_svg=scene_svg)


def serialize_report(report: ProfileReport) -> str:
    data = report.to_dict()
    validate_report(data)
    return json.dumps(data, indent=2) + "\n"


def deserialize_report(text: str) -> ProfileReport:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"report is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError("report must be a JSON object")
    validate_report(data)
    return ProfileReport(**data)
