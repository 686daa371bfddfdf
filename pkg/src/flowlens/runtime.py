"""Dataflow runtime: operator instantiation and timed pulse evaluation.

``instantiate`` turns a DataflowDesc into operator instances (loading any
url datasets once, up front). ``Runtime.run_initial`` evaluates every node
as pulse 0; ``Runtime.apply_signal`` updates one signal and re-evaluates
exactly the nodes reachable from it. Every operator evaluation is timed
with ``time.perf_counter_ns`` and recorded on the pulse.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

from . import renderer
from .chart import ChartSpec
from .errors import DataLoadError, EvalError, UnknownSignal
from .expressions import evaluate, parse_expression
from .lowering import DataflowDesc, NodeDesc, topological_sort
from .scales import ScaleValue, nice_bin_step

Row = Dict[str, object]

# Kinds whose output is a list of data rows; transforms take exactly one
# such input, everything else they consume arrives through the signal env.
ROW_KINDS = frozenset({
    "Source", "Copy", "Filter", "Formula", "Bin", "Aggregate", "Collect",
})


@dataclass(frozen=True)
class SignalUpdate:
    name: str
    value: object


@dataclass(frozen=True)
class TimingRecord:
    node_id: int
    duration_ns: int
    seq: int


@dataclass(frozen=True)
class DataDelta:
    rows_in: int
    rows_out: int
    changed: bool


@dataclass(frozen=True)
class Pulse:
    pulse_id: int
    trigger: Union[str, SignalUpdate]  # "init" or the signal update
    evaluated: FrozenSet[int]
    timings: Tuple[TimingRecord, ...]
    wall_total: int
    data_deltas: Dict[int, DataDelta]


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _coerce_csv(text: str):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    if text == "true":
        return True
    if text == "false":
        return False
    return text


def _load_rows(url: str, data_dir: Path, origin: Tuple) -> List[Row]:
    path = data_dir / url
    err_path = origin + ("url",)
    if not path.is_file():
        raise DataLoadError(f"data file not found: {path}", path=err_path)
    try:
        if url.endswith(".csv"):
            with open(path, newline="", encoding="utf-8") as fh:
                reader = csv.DictReader(fh)
                return [{k: _coerce_csv(v) for k, v in row.items()} for row in reader]
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, UnicodeDecodeError, csv.Error, json.JSONDecodeError) as exc:
        raise DataLoadError(f"cannot read {path}: {exc}", path=err_path) from exc
    if not isinstance(data, list) or any(not isinstance(r, dict) for r in data):
        raise DataLoadError(f"{path} must hold an array of objects", path=err_path)
    return data


class Operator:
    """One instantiated dataflow node: compiled params plus an output slot."""

    __slots__ = ("node", "inputs", "expr", "data")

    def __init__(self, node: NodeDesc, inputs: List[int]):
        self.node = node
        self.inputs = inputs
        self.expr = None  # compiled expression for Filter/Formula
        self.data: Optional[List[Row]] = None  # preloaded rows for Source


class Runtime:
    def __init__(self, desc: DataflowDesc, chart: ChartSpec, data_dir: Path):
        self.desc = desc
        self.chart = chart
        self.data_dir = data_dir
        self.operators: Dict[int, Operator] = {}
        self.order: List[int] = []
        self.successors: Dict[int, List[int]] = {}
        self.signals: Dict[str, object] = {}
        self.env: Dict[str, object] = {}  # signal values + published extents
        self.cache: Dict[int, object] = {}
        self.pulses: List[Pulse] = []
        self.scale_nodes: Dict[str, int] = {}

    # -- evaluation ------------------------------------------------------

    def run_initial(self) -> Pulse:
        if self.pulses:
            raise RuntimeError("initial pulse already ran")
        return self._evaluate("init", set(self.operators))

    def apply_signal(self, update: SignalUpdate) -> Pulse:
        if not self.pulses:
            raise RuntimeError("run_initial must run before signal updates")
        if update.name not in self.signals:
            raise UnknownSignal(f"unknown signal {update.name!r}")
        self.signals[update.name] = update.value
        self.env[update.name] = update.value
        signal_node = next(
            n.id for n in self.desc.nodes
            if n.kind == "Signal" and n.params["name"] == update.name)
        return self._evaluate(update, self.reachable_from(signal_node))

    def reachable_from(self, node_id: int) -> set:
        seen = {node_id}
        stack = [node_id]
        while stack:
            for succ in self.successors.get(stack.pop(), ()):
                if succ not in seen:
                    seen.add(succ)
                    stack.append(succ)
        return seen

    def _evaluate(self, trigger, dirty: set) -> Pulse:
        timings: List[TimingRecord] = []
        deltas: Dict[int, DataDelta] = {}
        seq = 0
        wall0 = time.perf_counter_ns()
        for nid in self.order:
            if nid not in dirty:
                continue
            op = self.operators[nid]
            inputs = [self.cache.get(i) for i in op.inputs]
            t0 = time.perf_counter_ns()
            try:
                out = self._eval_operator(op, inputs)
            except EvalError as exc:
                raise EvalError(exc.message, node_id=nid,
                                path=tuple(op.node.origin)) from exc
            t1 = time.perf_counter_ns()
            timings.append(TimingRecord(nid, t1 - t0, seq))
            seq += 1
            changed = nid not in self.cache or self.cache[nid] != out
            rows_in = sum(len(v) for v in inputs if isinstance(v, list))
            rows_out = len(out) if isinstance(out, list) else 0
            deltas[nid] = DataDelta(rows_in, rows_out, changed)
            self.cache[nid] = out
            if op.node.kind == "Extent":
                self.env[op.node.params["signal"]] = out
        wall1 = time.perf_counter_ns()
        pulse = Pulse(len(self.pulses), trigger, frozenset(dirty),
                      tuple(timings), wall1 - wall0, deltas)
        self.pulses.append(pulse)
        return pulse

    # -- operator semantics ----------------------------------------------

    def _eval_operator(self, op: Operator, inputs: List[object]):
        kind = op.node.kind
        params = op.node.params
        if kind == "Source":
            return op.data
        if kind == "Signal":
            return self.signals[params["name"]]
        rows = next((v for i, v in zip(op.inputs, inputs)
                     if self.operators[i].node.kind in ROW_KINDS), None)
        if kind == "Copy":
            return [dict(r) for r in rows]
        if kind == "Filter":
            return [r for r in rows if evaluate(op.expr, r, self.env)]
        if kind == "Formula":
            out_field = params["as"]
            return [{**r, out_field: evaluate(op.expr, r, self.env)} for r in rows]
        if kind == "Extent":
            return _extent(rows, params["field"])
        if kind == "Bin":
            return self._eval_bin(params, rows)
        if kind == "Aggregate":
            return _aggregate(rows, params)
        if kind == "Collect":
            return _collect(rows, params)
        if kind == "ScaleDomain":
            if params["type"] == "linear":
                return _extent(rows, params["field"])
            seen = dict.fromkeys(r.get(params["field"]) for r in rows)
            return tuple(seen)
        if kind == "Scale":
            domain = params["domain"]
            if domain is None:
                domain = inputs[0]
            return ScaleValue(type=params["type"], domain=tuple(domain),
                              range=tuple(params["range"]))
        if kind == "Encode":
            return self._eval_encode(params, rows)
        if kind == "AxisTicks":
            scale = inputs[0]
            return {"ticks": scale.ticks(), "range": list(scale.range)}
        if kind == "Render":
            if params["target"] == "axis":
                return renderer.render_axis_items(
                    inputs[0], params["orient"], params["width"], params["height"])
            return renderer.render_mark_items(params["mark"], inputs[0])
        raise EvalError(f"no evaluator for kind {kind!r}")

    def _eval_bin(self, params: dict, rows: List[Row]) -> List[Row]:
        field_name = params["field"]
        extent = params.get("extent")
        if isinstance(extent, dict):
            extent = self.env[extent["signal"]]
        if extent is None:
            extent = _extent(rows, field_name)
        lo, hi = extent
        step = params.get("step")
        if isinstance(step, dict):
            step = self.env[step["signal"]]
        if step is None:
            if lo is None:
                step = 1.0
            else:
                step = nice_bin_step(hi - lo, params["maxbins"])
        if not _is_number(step) or step <= 0:
            raise EvalError(f"bin step must be a positive number, got {step!r}")
        out = []
        for r in rows:
            v = r.get(field_name)
            if _is_number(v) and lo is not None:
                idx = math.floor((v - lo) / step)
                start = lo + idx * step
                out.append({**r, "bin_start": start, "bin_end": start + step})
            else:
                out.append({**r, "bin_start": None, "bin_end": None})
        return out

    def _eval_encode(self, params: dict, rows: List[Row]) -> List[dict]:
        resolvers = []
        for channel, cdef in params["channels"].items():
            scale = None
            if cdef.get("scale") is not None:
                scale = self.cache[self.scale_nodes[cdef["scale"]]]
            resolvers.append((channel, _channel_resolver(cdef, scale, self.env)))
        items = []
        for idx, row in enumerate(rows):
            item = {"row": idx}
            for channel, fn in resolvers:
                item[channel] = fn(row)
            items.append(item)
        return items


def _channel_resolver(cdef: dict, scale: Optional[ScaleValue], env: dict):
    if cdef.get("field") is not None:
        field_name = cdef["field"]
        if scale is not None:
            return lambda row: scale.apply(row.get(field_name))
        return lambda row: row.get(field_name)
    if cdef.get("signal") is not None:
        value = env[cdef["signal"]]
        if scale is not None:
            mapped = scale.apply(value)
            return lambda row: mapped
        return lambda row: value
    if cdef.get("band") is not None:
        fraction = cdef["band"]
        width = scale.bandwidth() * fraction
        return lambda row: width
    value = cdef["value"]
    if scale is not None:
        mapped = scale.apply(value)
        return lambda row: mapped
    return lambda row: value


def _extent(rows: List[Row], field_name: str) -> Tuple:
    lo = hi = None
    for r in rows:
        v = r.get(field_name)
        if v is None:
            continue
        if not _is_number(v):
            raise EvalError(f"extent of {field_name!r} hit non-numeric {v!r}")
        if lo is None or v < lo:
            lo = v
        if hi is None or v > hi:
            hi = v
    return (lo, hi)


def _aggregate(rows: List[Row], params: dict) -> List[Row]:
    groupby = params["groupby"]
    groups: Dict[Tuple, List[Row]] = {}
    for r in rows:
        groups.setdefault(tuple(r.get(g) for g in groupby), []).append(r)
    out = []
    for key, members in groups.items():
        agg: Row = dict(zip(groupby, key))
        for op_name, field_name, as_name in zip(
                params["ops"], params["fields"], params["as"]):
            if op_name == "count":
                agg[as_name] = len(members)
                continue
            values = [m.get(field_name) for m in members]
            nums = [v for v in values if _is_number(v)]
            bad = next((v for v in values if v is not None and not _is_number(v)), None)
            if bad is not None:
                raise EvalError(f"{op_name} of {field_name!r} hit non-numeric {bad!r}")
            if op_name == "sum":
                agg[as_name] = sum(nums)
            elif not nums:
                agg[as_name] = None
            elif op_name == "mean":
                agg[as_name] = sum(nums) / len(nums)
            elif op_name == "min":
                agg[as_name] = min(nums)
            else:
                agg[as_name] = max(nums)
        out.append(agg)
    return out


def _collect(rows: List[Row], params: dict) -> List[Row]:
    out = list(rows)
    # stable per-key passes from the last key to the first; nulls sort last
    for field_name, order in reversed(list(zip(params["sort_fields"],
                                               params["sort_orders"]))):
        descending = order == "descending"
        try:
            out.sort(key=lambda r: ((0, r.get(field_name))
                                    if r.get(field_name) is not None else (1, 0)),
                     reverse=descending)
        except TypeError as exc:
            raise EvalError(f"cannot sort on {field_name!r}: {exc}") from exc
    return out


def instantiate(desc: DataflowDesc, chart: ChartSpec,
                data_dir: Union[str, Path] = ".") -> Runtime:
    """Build operator instances, preload url data, compile expressions."""
    rt = Runtime(desc, chart, Path(data_dir))
    inputs: Dict[int, List[int]] = {n.id: [] for n in desc.nodes}
    for src, dst in desc.edges:
        inputs[dst].append(src)
        rt.successors.setdefault(src, []).append(dst)
    for node in desc.nodes:
        op = Operator(node, inputs[node.id])
        if node.kind == "Source":
            if "values" in node.params:
                op.data = [dict(r) for r in node.params["values"]]
            else:
                op.data = _load_rows(node.params["url"], rt.data_dir,
                                     tuple(node.origin))
        elif node.kind in ("Filter", "Formula"):
            op.expr = parse_expression(node.params["expr"])
        elif node.kind == "Signal":
            rt.signals[node.params["name"]] = node.params["init"]
        elif node.kind == "Scale":
            rt.scale_nodes[node.params["name"]] = node.id
        rt.operators[node.id] = op
    rt.env = dict(rt.signals)
    rt.order = topological_sort(desc)
    return rt
