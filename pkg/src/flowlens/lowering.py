"""First lowering phase: chart spec to dataflow description.

Every node created here is annotated with the spec path of the component
that instantiated it, and the same information is recorded in a
bidirectional profiling map (path -> node ids, node id -> path). Node ids
are dense and follow the visit order: datasets (with their transforms),
signals, scales, marks, axes.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .chart import ChartSpec, DataRef
from .document import SpecPath, as_path
from .errors import ExpressionError, LoweringError, UnknownNode
from .expressions import expression_names, parse_expression

NODE_KINDS = ("Source", "Copy", "Filter", "Formula", "Extent", "Bin", "Aggregate",
              "Collect", "Signal", "ScaleDomain", "Scale", "Encode", "AxisTicks",
              "Render")

_TRANSFORM_NODE_KIND = {"filter": "Filter", "formula": "Formula", "extent": "Extent",
                        "bin": "Bin", "aggregate": "Aggregate", "collect": "Collect"}


@dataclass(frozen=True)
class NodeDesc:
    id: int
    kind: str
    params: dict
    origin: SpecPath


@dataclass(frozen=True)
class DataflowDesc:
    nodes: Tuple[NodeDesc, ...]
    edges: Tuple[Tuple[int, int], ...]

    def node(self, node_id: int) -> NodeDesc:
        return self.nodes[node_id]

    def successors(self) -> Dict[int, List[int]]:
        adj: Dict[int, List[int]] = {n.id: [] for n in self.nodes}
        for src, dst in self.edges:
            adj[src].append(dst)
        return adj


@dataclass
class ProfilingMap:
    """Bidirectional index between spec paths and the dataflow nodes they
    instantiated."""

    forward: Dict[SpecPath, List[int]] = field(default_factory=dict)
    backward: Dict[int, SpecPath] = field(default_factory=dict)

    def record(self, path: SpecPath, node_id: int):
        self.forward.setdefault(path, []).append(node_id)
        self.backward[node_id] = path


def nodes_for_path(mapping: ProfilingMap, path: Sequence,
                   include_descendants: bool = False) -> List[int]:
    """Node ids instantiated by ``path`` (and, optionally, by anything
    nested under it). Unknown paths yield an empty list."""
    path = as_path(path)
    if not include_descendants:
        return list(mapping.forward.get(path, []))
    depth = len(path)
    ids = {n for p, nodes in mapping.forward.items()
           if p[:depth] == path for n in nodes}
    return sorted(ids)


def path_for_node(mapping: ProfilingMap, node_id: int) -> SpecPath:
    """Spec path of the component that instantiated ``node_id``."""
    if node_id not in mapping.backward:
        raise UnknownNode(f"no such node: {node_id}")
    return mapping.backward[node_id]


def topological_sort(desc: DataflowDesc) -> List[int]:
    """Topological order, smallest-ready-id first; fails if the graph has
    a cycle (possible via extent-signal references across datasets)."""
    indegree = {n.id: 0 for n in desc.nodes}
    adj = desc.successors()
    for _, dst in desc.edges:
        indegree[dst] += 1
    ready = [nid for nid, deg in sorted(indegree.items()) if deg == 0]
    heapq.heapify(ready)
    order: List[int] = []
    while ready:
        nid = heapq.heappop(ready)
        order.append(nid)
        for nxt in adj[nid]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                heapq.heappush(ready, nxt)
    if len(order) != len(desc.nodes):
        raise LoweringError("dataflow graph has a cycle")
    return order


class _Builder:
    def __init__(self, chart: ChartSpec):
        self.chart = chart
        self.nodes: List[NodeDesc] = []
        self.edges: List[Tuple[int, int]] = []
        self._edge_seen = set()
        self.mapping = ProfilingMap()
        # names usable inside expressions / {"signal": ...} refs
        self.name_producers: Dict[str, int] = {}
        self.scale_nodes: Dict[str, int] = {}
        self.dataset_direct_output: Dict[str, Optional[int]] = {}
        # wiring deferred until all nodes exist (sources and signals may be
        # declared after their consumers)
        self.pending: List[Tuple[int, str, str, Optional[SpecPath]]] = []

    def add_node(self, kind: str, params: dict, origin: SpecPath) -> int:
        node_id = len(self.nodes)
        self.nodes.append(NodeDesc(id=node_id, kind=kind, params=params, origin=origin))
        self.mapping.record(origin, node_id)
        return node_id

    def add_edge(self, src: int, dst: int):
        if (src, dst) not in self._edge_seen:
            self._edge_seen.add((src, dst))
            self.edges.append((src, dst))

    def defer(self, consumer: int, kind: str, key: str, path: Optional[SpecPath] = None):
        self.pending.append((consumer, kind, key, path))


def lower(chart: ChartSpec) -> Tuple[DataflowDesc, ProfilingMap]:
    """Lower a validated chart into a dataflow description, recording the
    profiling map as nodes are created."""
    b = _Builder(chart)
    _lower_datasets(b)
    _lower_signals(b)
    _lower_scales(b)
    _lower_marks(b)
    _lower_axes(b)
    _wire_deferred(b)
    desc = DataflowDesc(nodes=tuple(b.nodes), edges=tuple(b.edges))
    topological_sort(desc)  # cycle check; raises LoweringError
    return desc, b.mapping


def _lower_datasets(b: _Builder):
    for d in b.chart.datasets:
        prev: Optional[int] = None
        if d.values is not None:
            prev = b.add_node("Source", {"name": d.name, "values": [dict(r) for r in d.values]},
                              d.origin)
        elif d.url is not None:
            prev = b.add_node("Source", {"name": d.name, "url": d.url}, d.origin)
        elif d.transforms:
            # a source-referencing dataset with transforms mutates rows, so
            # the upstream data gets copied before the chain runs
            prev = b.add_node("Copy", {"dataset": d.name, "source": d.source}, d.origin)
            b.defer(prev, "dataset", d.source)

        for t in d.transforms:
            node = b.add_node(_TRANSFORM_NODE_KIND[t.kind], dict(t.params), t.origin)
            b.add_edge(prev, node)
            if t.kind in ("filter", "formula"):
                expr_path = t.origin + ("expr",)
                ast = parse_expression(t.params["expr"], path=expr_path)
                for name in sorted(expression_names(ast)):
                    b.defer(node, "name", name, expr_path)
            elif t.kind == "bin":
                for key in ("step", "extent"):
                    ref = t.params.get(key)
                    if isinstance(ref, dict):
                        b.defer(node, "name", ref["signal"], t.origin + (key,))
            elif t.kind == "extent":
                b.name_producers[t.params["signal"]] = node
            if t.kind != "extent":
                # extent publishes a [min, max] pair instead of rows, so the
                # row chain continues from the node before it
                prev = node
        # None means the dataset is a pure alias of its source
        b.dataset_direct_output[d.name] = prev


def _lower_signals(b: _Builder):
    for s in b.chart.signals:
        node = b.add_node("Signal", {"name": s.name, "init": s.value}, s.origin)
        b.name_producers[s.name] = node


def _lower_scales(b: _Builder):
    for s in b.chart.scales:
        rng = _resolve_range(b.chart, s.range)
        if isinstance(s.domain, DataRef):
            sd = b.add_node("ScaleDomain",
                            {"scale": s.name, "type": s.type,
                             "data": s.domain.data, "field": s.domain.field},
                            s.origin)
            b.defer(sd, "dataset", s.domain.data)
            sc = b.add_node("Scale", {"name": s.name, "type": s.type, "range": rng,
                                      "domain": None}, s.origin)
            b.add_edge(sd, sc)
        else:
            sc = b.add_node("Scale", {"name": s.name, "type": s.type, "range": rng,
                                      "domain": list(s.domain)}, s.origin)
        b.scale_nodes[s.name] = sc


def _resolve_range(chart: ChartSpec, rng) -> list:
    if rng == "width":
        return [0, chart.width]
    if rng == "height":
        # pixel y grows downward; "height" ranges flip so larger values plot higher
        return [chart.height, 0]
    return list(rng)


def _lower_marks(b: _Builder):
    for m in b.chart.marks:
        channels = {}
        for ch, cdef in m.encode.items():
            entry: dict = {}
            if cdef.scale is not None:
                entry["scale"] = cdef.scale
            if cdef.field is not None:
                entry["field"] = cdef.field
            elif cdef.signal is not None:
                entry["signal"] = cdef.signal
            elif cdef.band is not None:
                entry["band"] = cdef.band
            else:
                entry["value"] = cdef.value
            channels[ch] = entry
        enc = b.add_node("Encode", {"mark": m.type, "from": m.from_,
                                    "channels": channels}, m.origin)
        b.defer(enc, "dataset", m.from_)
        for ch, cdef in m.encode.items():
            if cdef.scale is not None:
                b.defer(enc, "scale", cdef.scale)
            if cdef.signal is not None:
                b.defer(enc, "name", cdef.signal, cdef.origin)
        render = b.add_node("Render", {"target": "mark", "mark": m.type,
                                       "width": b.chart.width, "height": b.chart.height},
                            m.origin)
        b.add_edge(enc, render)


def _lower_axes(b: _Builder):
    for a in b.chart.axes:
        ticks = b.add_node("AxisTicks", {"scale": a.scale}, a.origin)
        b.defer(ticks, "scale", a.scale)
        render = b.add_node("Render", {"target": "axis", "orient": a.orient,
                                       "scale": a.scale, "width": b.chart.width,
                                       "height": b.chart.height}, a.origin)
        b.add_edge(ticks, render)


def _wire_deferred(b: _Builder):
    for consumer, kind, key, path in b.pending:
        if kind == "dataset":
            b.add_edge(_dataset_output(b, key), consumer)
        elif kind == "scale":
            b.add_edge(b.scale_nodes[key], consumer)
        else:  # signal or extent-published name
            producer = b.name_producers.get(key)
            if producer is None:
                raise ExpressionError(f"unknown name {key!r}", path=path)
            b.add_edge(producer, consumer)


def _dataset_output(b: _Builder, name: str) -> int:
    """Node whose output is the dataset's final rows; follows pure-alias
    chains (source reference without transforms)."""
    out = b.dataset_direct_output[name]
    if out is not None:
        return out
    return _dataset_output(b, b.chart.dataset(name).source)
