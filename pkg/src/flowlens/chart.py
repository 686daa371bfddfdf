"""Schema validation of parsed specifications.

Validation is structural: shapes, closed enums, and name references are
checked here, while filter/formula expression strings are left to the
lowering stage. Every definition remembers the document path it came
from so later stages (and error messages) can point back at the source.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .document import SpecDocument, SpecNode, SpecPath
from .errors import ValidationError

TRANSFORM_KINDS = ("filter", "formula", "extent", "bin", "aggregate", "collect")
SCALE_TYPES = ("linear", "band", "ordinal")
MARK_TYPES = ("symbol", "rect", "line", "text")
AXIS_ORIENTS = ("bottom", "left", "top", "right")
AGGREGATE_OPS = ("count", "sum", "mean", "min", "max")
ENCODE_CHANNELS = ("x", "y", "x2", "y2", "width", "height", "size",
                   "fill", "stroke", "opacity", "text")

DEFAULT_WIDTH = 400
DEFAULT_HEIGHT = 300

Scalar = Union[int, float, str, bool, None]


@dataclass(frozen=True)
class TransformDef:
    kind: str
    params: dict
    origin: SpecPath


@dataclass(frozen=True)
class DatasetDef:
    name: str
    origin: SpecPath
    values: Optional[Tuple[dict, ...]] = None
    url: Optional[str] = None
    source: Optional[str] = None
    transforms: Tuple[TransformDef, ...] = ()


@dataclass(frozen=True)
class SignalDef:
    name: str
    value: Scalar
    origin: SpecPath


@dataclass(frozen=True)
class DataRef:
    """Data-driven scale domain: distinct/extent of one dataset field."""

    data: str
    field: str


@dataclass(frozen=True)
class ScaleDef:
    name: str
    type: str
    domain: Union[DataRef, Tuple[Scalar, ...]]
    range: Union[str, Tuple[Scalar, ...]]  # "width" | "height" | explicit
    origin: SpecPath


@dataclass(frozen=True)
class ChannelDef:
    """One encode channel: exactly one of field/value/signal/band, with an
    optional scale applied to it."""

    origin: SpecPath
    scale: Optional[str] = None
    field: Optional[str] = None
    value: Scalar = None
    signal: Optional[str] = None
    band: Optional[float] = None

    def source_kind(self) -> str:
        if self.field is not None:
            return "field"
        if self.signal is not None:
            return "signal"
        if self.band is not None:
            return "band"
        return "value"


@dataclass(frozen=True)
class MarkDef:
    type: str
    from_: str
    encode: Dict[str, ChannelDef]
    origin: SpecPath


@dataclass(frozen=True)
class AxisDef:
    scale: str
    orient: str
    origin: SpecPath


@dataclass(frozen=True)
class ChartSpec:
    width: int
    height: int
    datasets: Tuple[DatasetDef, ...] = ()
    signals: Tuple[SignalDef, ...] = ()
    scales: Tuple[ScaleDef, ...] = ()
    marks: Tuple[MarkDef, ...] = ()
    axes: Tuple[AxisDef, ...] = ()

    def dataset(self, name: str) -> DatasetDef:
        for d in self.datasets:
            if d.name == name:
                return d
        raise KeyError(name)

    def scale(self, name: str) -> ScaleDef:
        for s in self.scales:
            if s.name == name:
                return s
        raise KeyError(name)


@dataclass
class BlockNode:
    """One node of the spec block hierarchy used by the icicle's upper
    levels and by editor highlighting."""

    path: SpecPath
    label: str
    children: List["BlockNode"] = field(default_factory=list)


def _err(message: str, node: SpecNode, path: SpecPath):
    raise ValidationError(message, path=path, span=node.span)


def _check_keys(node: SpecNode, allowed: Sequence[str], path: SpecPath):
    for key in node.entries:
        if key not in allowed:
            _err(f"unknown key {key!r}", node.entries[key], path + (key,))


def _expect(node: SpecNode, kind: str, path: SpecPath, what: str) -> SpecNode:
    if node.kind != kind:
        _err(f"{what} must be a {kind}, got {node.kind}", node, path)
    return node


def _require(obj: SpecNode, key: str, path: SpecPath) -> SpecNode:
    if key not in obj.entries:
        _err(f"missing required key {key!r}", obj, path)
    return obj.entries[key]


def _string(obj: SpecNode, key: str, path: SpecPath) -> str:
    node = _require(obj, key, path)
    _expect(node, "string", path + (key,), key)
    return node.value


def _scalar(node: SpecNode, path: SpecPath, what: str) -> Scalar:
    if node.kind in ("object", "array"):
        _err(f"{what} must be a scalar", node, path)
    return node.value


def validate(doc: SpecDocument) -> ChartSpec:
    """Check the parsed document against the chart schema and resolve all
    name references; returns the typed ChartSpec."""
    root = doc.root
    if root.kind != "object":
        _err("specification root must be an object", root, ())
    _check_keys(root, ("width", "height", "data", "signals", "scales", "marks", "axes"), ())

    width = _dimension(root, "width", DEFAULT_WIDTH)
    height = _dimension(root, "height", DEFAULT_HEIGHT)

    datasets = _validate_datasets(root)
    signals = _validate_signals(root)
    # names an expression or {"signal": ...} reference may use
    signal_names = [s.name for s in signals]
    extent_names = [t.params["signal"] for d in datasets for t in d.transforms
                    if t.kind == "extent"]
    for d in datasets:
        for t in d.transforms:
            if t.kind == "bin":
                _check_signal_refs(doc, t, signal_names + extent_names)
    scales = _validate_scales(root, datasets)
    marks = _validate_marks(root, datasets, scales, signal_names + extent_names)
    axes = _validate_axes(root, scales)

    return ChartSpec(width=width, height=height, datasets=tuple(datasets),
                     signals=tuple(signals), scales=tuple(scales),
                     marks=tuple(marks), axes=tuple(axes))


def _dimension(root: SpecNode, key: str, default: int) -> int:
    if key not in root.entries:
        return default
    node = root.entries[key]
    _expect(node, "number", (key,), key)
    if node.value <= 0:
        _err(f"{key} must be positive", node, (key,))
    return node.value


def _validate_datasets(root: SpecNode) -> List[DatasetDef]:
    if "data" not in root.entries:
        return []
    arr = _expect(root.entries["data"], "array", ("data",), "data")
    out: List[DatasetDef] = []
    names = set()
    for i, entry in enumerate(arr.entries):
        path = ("data", i)
        _expect(entry, "object", path, "dataset")
        _check_keys(entry, ("name", "values", "url", "source", "transform"), path)
        name = _string(entry, "name", path)
        if name in names:
            _err(f"duplicate dataset name {name!r}", entry.entries["name"], path + ("name",))
        names.add(name)

        origins = [k for k in ("values", "url", "source") if k in entry.entries]
        if len(origins) != 1:
            _err("dataset needs exactly one of values, url, source", entry, path)

        values = url = source = None
        if "values" in entry.entries:
            values = tuple(_validate_rows(entry.entries["values"], path + ("values",)))
        elif "url" in entry.entries:
            url = _string(entry, "url", path)
            if not (url.endswith(".csv") or url.endswith(".json")):
                _err("url must end in .csv or .json", entry.entries["url"], path + ("url",))
        else:
            source = _string(entry, "source", path)

        transforms = []
        if "transform" in entry.entries:
            tarr = _expect(entry.entries["transform"], "array", path + ("transform",), "transform")
            for j, tnode in enumerate(tarr.entries):
                transforms.append(_validate_transform(tnode, path + ("transform", j)))
        out.append(DatasetDef(name=name, origin=path, values=values, url=url,
                              source=source, transforms=tuple(transforms)))

    by_name = {d.name: d for d in out}
    for d in out:
        if d.source is not None and d.source not in by_name:
            raise ValidationError(f"unknown source dataset {d.source!r}",
                                  path=d.origin + ("source",))
    _check_source_cycles(out)
    return out


def _check_source_cycles(datasets: List[DatasetDef]):
    by_name = {d.name: d for d in datasets}
    state: Dict[str, int] = {}  # 1 = in progress, 2 = done

    def visit(name: str):
        if state.get(name) == 2:
            return
        if state.get(name) == 1:
            raise ValidationError("cyclic dataset sources",
                                  path=by_name[name].origin + ("source",))
        state[name] = 1
        src = by_name[name].source
        if src is not None:
            visit(src)
        state[name] = 2

    for d in datasets:
        visit(d.name)


def _validate_rows(node: SpecNode, path: SpecPath) -> List[dict]:
    _expect(node, "array", path, "values")
    rows = []
    for i, row in enumerate(node.entries):
        _expect(row, "object", path + (i,), "row")
        record = {}
        for key, cell in row.entries.items():
            record[key] = _scalar(cell, path + (i, key), "row field")
        rows.append(record)
    return rows


def _validate_transform(node: SpecNode, path: SpecPath) -> TransformDef:
    _expect(node, "object", path, "transform")
    kind = _string(node, "type", path)
    if kind not in TRANSFORM_KINDS:
        _err(f"unknown transform type {kind!r}", node.entries["type"], path + ("type",))
    if kind == "filter":
        _check_keys(node, ("type", "expr"), path)
        return TransformDef(kind, {"expr": _string(node, "expr", path)}, path)
    if kind == "formula":
        _check_keys(node, ("type", "expr", "as"), path)
        return TransformDef(kind, {"expr": _string(node, "expr", path),
                                   "as": _string(node, "as", path)}, path)
    if kind == "extent":
        _check_keys(node, ("type", "field", "signal"), path)
        return TransformDef(kind, {"field": _string(node, "field", path),
                                   "signal": _string(node, "signal", path)}, path)
    if kind == "bin":
        return _validate_bin(node, path)
    if kind == "aggregate":
        return _validate_aggregate(node, path)
    return _validate_collect(node, path)


def _validate_bin(node: SpecNode, path: SpecPath) -> TransformDef:
    _check_keys(node, ("type", "field", "step", "maxbins", "extent"), path)
    params: dict = {"field": _string(node, "field", path),
                    "step": None, "maxbins": None, "extent": None}
    if "step" in node.entries and "maxbins" in node.entries:
        _err("bin takes step or maxbins, not both", node, path)
    if "step" in node.entries:
        params["step"] = _number_or_signal_ref(node.entries["step"], path + ("step",))
    elif "maxbins" in node.entries:
        mb = node.entries["maxbins"]
        _expect(mb, "number", path + ("maxbins",), "maxbins")
        if not isinstance(mb.value, int) or mb.value < 1:
            _err("maxbins must be a positive integer", mb, path + ("maxbins",))
        params["maxbins"] = mb.value
    else:
        params["maxbins"] = 10
    if "extent" in node.entries:
        ext = node.entries["extent"]
        if ext.kind == "array":
            if len(ext.entries) != 2 or any(e.kind != "number" for e in ext.entries):
                _err("extent must be [min, max]", ext, path + ("extent",))
            params["extent"] = [ext.entries[0].value, ext.entries[1].value]
        elif ext.kind == "object":
            params["extent"] = _signal_ref(ext, path + ("extent",))
        else:
            _err("extent must be [min, max] or {\"signal\": name}", ext, path + ("extent",))
    return TransformDef("bin", params, path)


def _number_or_signal_ref(node: SpecNode, path: SpecPath):
    if node.kind == "number":
        if node.value <= 0:
            _err("step must be positive", node, path)
        return node.value
    if node.kind == "object":
        return _signal_ref(node, path)
    _err("expected a number or {\"signal\": name}", node, path)


def _signal_ref(node: SpecNode, path: SpecPath) -> dict:
    _check_keys(node, ("signal",), path)
    return {"signal": _string(node, "signal", path)}


def _check_signal_refs(doc: SpecDocument, transform: TransformDef, known: List[str]):
    for key in ("step", "extent"):
        ref = transform.params.get(key)
        if isinstance(ref, dict) and ref["signal"] not in known:
            raise ValidationError(
                f"unknown signal {ref['signal']!r}",
                path=transform.origin + (key,),
                span=doc.resolve(transform.origin + (key,)).span)


def _validate_aggregate(node: SpecNode, path: SpecPath) -> TransformDef:
    _check_keys(node, ("type", "groupby", "ops", "fields", "as"), path)
    groupby: List[str] = []
    if "groupby" in node.entries:
        arr = _expect(node.entries["groupby"], "array", path + ("groupby",), "groupby")
        groupby = [_expect(e, "string", path + ("groupby", i), "groupby entry").value
                   for i, e in enumerate(arr.entries)]

    ops, fields = ["count"], [None]
    if "ops" in node.entries:
        arr = _expect(node.entries["ops"], "array", path + ("ops",), "ops")
        ops = []
        for i, e in enumerate(arr.entries):
            _expect(e, "string", path + ("ops", i), "op")
            if e.value not in AGGREGATE_OPS:
                _err(f"unknown aggregate op {e.value!r}", e, path + ("ops", i))
            ops.append(e.value)
        fields = [None] * len(ops)
    if "fields" in node.entries:
        arr = _expect(node.entries["fields"], "array", path + ("fields",), "fields")
        if len(arr.entries) != len(ops):
            _err("fields must match ops in length", arr, path + ("fields",))
        fields = []
        for i, e in enumerate(arr.entries):
            if e.kind == "null":
                fields.append(None)
            else:
                fields.append(_expect(e, "string", path + ("fields", i), "field").value)
    for op, fld, i in zip(ops, fields, range(len(ops))):
        if op != "count" and fld is None:
            _err(f"op {op!r} requires a field", node, path + ("ops", i))

    names = [("count" if op == "count" else f"{op}_{fld}") for op, fld in zip(ops, fields)]
    if "as" in node.entries:
        arr = _expect(node.entries["as"], "array", path + ("as",), "as")
        if len(arr.entries) != len(ops):
            _err("as must match ops in length", arr, path + ("as",))
        names = [_expect(e, "string", path + ("as", i), "as entry").value
                 for i, e in enumerate(arr.entries)]
    return TransformDef("aggregate", {"groupby": groupby, "ops": ops,
                                      "fields": fields, "as": names}, path)


def _validate_collect(node: SpecNode, path: SpecPath) -> TransformDef:
    _check_keys(node, ("type", "sort"), path)
    sort = _require(node, "sort", path)
    _expect(sort, "object", path + ("sort",), "sort")
    _check_keys(sort, ("field", "order"), path + ("sort",))
    fnode = _require(sort, "field", path + ("sort",))
    if fnode.kind == "string":
        fields = [fnode.value]
    elif fnode.kind == "array":
        fields = [_expect(e, "string", path + ("sort", "field", i), "sort field").value
                  for i, e in enumerate(fnode.entries)]
    else:
        _err("sort field must be a string or array of strings", fnode,
             path + ("sort", "field"))
    orders = ["ascending"] * len(fields)
    if "order" in sort.entries:
        onode = sort.entries["order"]
        raw = [onode] if onode.kind == "string" else onode.entries
        if onode.kind not in ("string", "array") or len(raw) != len(fields):
            _err("order must match sort fields", onode, path + ("sort", "order"))
        orders = []
        for i, e in enumerate(raw):
            if e.kind != "string" or e.value not in ("ascending", "descending"):
                _err("order entries must be 'ascending' or 'descending'", e,
                     path + ("sort", "order", i))
            orders.append(e.value)
    return TransformDef("collect", {"sort_fields": fields, "sort_orders": orders}, path)


def _validate_signals(root: SpecNode) -> List[SignalDef]:
    if "signals" not in root.entries:
        return []
    arr = _expect(root.entries["signals"], "array", ("signals",), "signals")
    out: List[SignalDef] = []
    seen = set()
    for i, entry in enumerate(arr.entries):
        path = ("signals", i)
        _expect(entry, "object", path, "signal")
        _check_keys(entry, ("name", "value"), path)
        name = _string(entry, "name", path)
        if name in seen:
            _err(f"duplicate signal name {name!r}", entry.entries["name"], path + ("name",))
        seen.add(name)
        vnode = _require(entry, "value", path)
        out.append(SignalDef(name=name, value=_scalar(vnode, path + ("value",), "value"),
                             origin=path))
    return out


def _validate_scales(root: SpecNode, datasets: List[DatasetDef]) -> List[ScaleDef]:
    if "scales" not in root.entries:
        return []
    arr = _expect(root.entries["scales"], "array", ("scales",), "scales")
    dataset_names = {d.name for d in datasets}
    out: List[ScaleDef] = []
    seen = set()
    for i, entry in enumerate(arr.entries):
        path = ("scales", i)
        _expect(entry, "object", path, "scale")
        _check_keys(entry, ("name", "type", "domain", "range"), path)
        name = _string(entry, "name", path)
        if name in seen:
            _err(f"duplicate scale name {name!r}", entry.entries["name"], path + ("name",))
        seen.add(name)
        stype = _string(entry, "type", path)
        if stype not in SCALE_TYPES:
            _err(f"unknown scale type {stype!r}", entry.entries["type"], path + ("type",))

        dnode = _require(entry, "domain", path)
        domain: Union[DataRef, Tuple[Scalar, ...]]
        if dnode.kind == "object":
            _check_keys(dnode, ("data", "field"), path + ("domain",))
            dname = _string(dnode, "data", path + ("domain",))
            if dname not in dataset_names:
                _err(f"unknown dataset {dname!r}", dnode.entries["data"],
                     path + ("domain", "data"))
            domain = DataRef(data=dname, field=_string(dnode, "field", path + ("domain",)))
        elif dnode.kind == "array":
            vals = tuple(_scalar(e, path + ("domain", j), "domain entry")
                         for j, e in enumerate(dnode.entries))
            if stype == "linear" and (len(vals) != 2 or not all(
                    isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals)):
                _err("linear domain must be [min, max]", dnode, path + ("domain",))
            domain = vals
        else:
            _err("domain must be an array or {data, field}", dnode, path + ("domain",))

        rnode = _require(entry, "range", path)
        rng: Union[str, Tuple[Scalar, ...]]
        if rnode.kind == "string":
            if rnode.value not in ("width", "height"):
                _err("range keyword must be 'width' or 'height'", rnode, path + ("range",))
            rng = rnode.value
        elif rnode.kind == "array":
            vals = tuple(_scalar(e, path + ("range", j), "range entry")
                         for j, e in enumerate(rnode.entries))
            if stype in ("linear", "band"):
                if len(vals) != 2 or not all(
                        isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
                    _err(f"{stype} range must be [start, stop]", rnode, path + ("range",))
            elif not vals:
                _err("ordinal range must not be empty", rnode, path + ("range",))
            rng = vals
        else:
            _err("range must be an array or a keyword", rnode, path + ("range",))
        out.append(ScaleDef(name=name, type=stype, domain=domain, range=rng, origin=path))
    return out


def _validate_marks(root: SpecNode, datasets: List[DatasetDef],
                    scales: List[ScaleDef], signal_names: List[str]) -> List[MarkDef]:
    if "marks" not in root.entries:
        return []
    arr = _expect(root.entries["marks"], "array", ("marks",), "marks")
    dataset_names = {d.name for d in datasets}
    scale_by_name = {s.name: s for s in scales}
    out: List[MarkDef] = []
    for i, entry in enumerate(arr.entries):
        path = ("marks", i)
        _expect(entry, "object", path, "mark")
        _check_keys(entry, ("type", "from", "encode"), path)
        mtype = _string(entry, "type", path)
        if mtype not in MARK_TYPES:
            _err(f"unknown mark type {mtype!r}", entry.entries["type"], path + ("type",))
        from_ = _string(entry, "from", path)
        if from_ not in dataset_names:
            _err(f"unknown dataset {from_!r}", entry.entries["from"], path + ("from",))

        encode: Dict[str, ChannelDef] = {}
        if "encode" in entry.entries:
            enode = _expect(entry.entries["encode"], "object", path + ("encode",), "encode")
            for channel, cnode in enode.entries.items():
                cpath = path + ("encode", channel)
                if channel not in ENCODE_CHANNELS:
                    _err(f"unknown channel {channel!r}", cnode, cpath)
                encode[channel] = _validate_channel(cnode, cpath, scale_by_name, signal_names)
        out.append(MarkDef(type=mtype, from_=from_, encode=encode, origin=path))
    return out


def _validate_channel(node: SpecNode, path: SpecPath,
                      scales: Dict[str, ScaleDef], signal_names: List[str]) -> ChannelDef:
    _expect(node, "object", path, "channel")
    _check_keys(node, ("scale", "field", "value", "signal", "band"), path)
    sources = [k for k in ("field", "value", "signal", "band") if k in node.entries]
    if len(sources) != 1:
        _err("channel needs exactly one of field, value, signal, band", node, path)

    scale = None
    if "scale" in node.entries:
        scale = _expect(node.entries["scale"], "string", path + ("scale",), "scale").value
        if scale not in scales:
            _err(f"unknown scale {scale!r}", node.entries["scale"], path + ("scale",))

    kwargs: dict = {"origin": path, "scale": scale}
    if "field" in node.entries:
        kwargs["field"] = _expect(node.entries["field"], "string",
                                  path + ("field",), "field").value
    elif "signal" in node.entries:
        sig = _expect(node.entries["signal"], "string", path + ("signal",), "signal").value
        if sig not in signal_names:
            _err(f"unknown signal {sig!r}", node.entries["signal"], path + ("signal",))
        kwargs["signal"] = sig
    elif "band" in node.entries:
        bnode = _expect(node.entries["band"], "number", path + ("band",), "band")
        if scale is None or scales[scale].type != "band":
            _err("band requires a band-type scale", node, path)
        kwargs["band"] = bnode.value
    else:
        kwargs["value"] = _scalar(node.entries["value"], path + ("value",), "value")
    return ChannelDef(**kwargs)


def _validate_axes(root: SpecNode, scales: List[ScaleDef]) -> List[AxisDef]:
    if "axes" not in root.entries:
        return []
    arr = _expect(root.entries["axes"], "array", ("axes",), "axes")
    scale_by_name = {s.name: s for s in scales}
    out: List[AxisDef] = []
    for i, entry in enumerate(arr.entries):
        path = ("axes", i)
        _expect(entry, "object", path, "axis")
        _check_keys(entry, ("scale", "orient"), path)
        sname = _string(entry, "scale", path)
        if sname not in scale_by_name:
            _err(f"unknown scale {sname!r}", entry.entries["scale"], path + ("scale",))
        if scale_by_name[sname].type == "ordinal":
            _err("axes require a positional (linear or band) scale",
                 entry.entries["scale"], path + ("scale",))
        orient = _string(entry, "orient", path)
        if orient not in AXIS_ORIENTS:
            _err(f"unknown orient {orient!r}", entry.entries["orient"], path + ("orient",))
        out.append(AxisDef(scale=sname, orient=orient, origin=path))
    return out


def block_hierarchy(doc: SpecDocument, chart: ChartSpec) -> BlockNode:
    """Build the block tree: top-level sections, their entries, and the
    transform/encode sub-blocks. Absent or empty sections are omitted."""
    root = BlockNode(path=(), label="spec")
    for key in doc.root.entries:
        if key == "data" and chart.datasets:
            section = BlockNode(path=("data",), label="data")
            for d in chart.datasets:
                block = BlockNode(path=d.origin, label=f"data:{d.name}")
                for j, t in enumerate(d.transforms):
                    block.children.append(
                        BlockNode(path=t.origin, label=f"transform[{j}]:{t.kind}"))
                section.children.append(block)
            root.children.append(section)
        elif key == "signals" and chart.signals:
            section = BlockNode(path=("signals",), label="signals")
            section.children = [BlockNode(path=s.origin, label=f"signals:{s.name}")
                                for s in chart.signals]
            root.children.append(section)
        elif key == "scales" and chart.scales:
            section = BlockNode(path=("scales",), label="scales")
            section.children = [BlockNode(path=s.origin, label=f"scales:{s.name}")
                                for s in chart.scales]
            root.children.append(section)
        elif key == "marks" and chart.marks:
            section = BlockNode(path=("marks",), label="marks")
            for i, m in enumerate(chart.marks):
                block = BlockNode(path=m.origin, label=f"marks[{i}]:{m.type}")
                if m.encode:
                    block.children.append(
                        BlockNode(path=m.origin + ("encode",), label="encode"))
                section.children.append(block)
            root.children.append(section)
        elif key == "axes" and chart.axes:
            section = BlockNode(path=("axes",), label="axes")
            section.children = [BlockNode(path=a.origin, label=f"axes[{i}]:{a.orient}")
                                for i, a in enumerate(chart.axes)]
            root.children.append(section)
    return root
