"""flowlens: a profiled dataflow runtime for a small declarative chart DSL.

Specs lower to a dataflow graph with a bidirectional map between spec
paths and graph nodes; every pulse records per-operator timings that roll
up into icicle trees over the spec's own structure.
"""

from .chart import BlockNode, ChartSpec, block_hierarchy, validate
from .document import SpecDocument, SpecNode, SpecSpan, parse_spec, span_of
from .errors import (
    DataLoadError,
    EvalError,
    ExpressionError,
    FlowlensError,
    LoweringError,
    PathNotFound,
    SchemaError,
    SpecSyntaxError,
    UnknownNode,
    UnknownPulse,
    UnknownSignal,
    ValidationError,
)
from .expressions import evaluate, expression_names, parse_expression
from .lowering import (
    DataflowDesc,
    NodeDesc,
    ProfilingMap,
    lower,
    nodes_for_path,
    path_for_node,
    topological_sort,
)
from .pipeline import Session
from .profiler import (
    IcicleNode,
    ProfileReport,
    build_icicle,
    build_report,
    deserialize_report,
    node_table,
    serialize_report,
    timings_for_path,
)
from .renderer import SceneGraph, SceneItem, SceneLayer, assemble_scene, scene_to_svg
from .report_schema import REPORT_SCHEMA, validate_report
from .runtime import (
    DataDelta,
    Pulse,
    Runtime,
    SignalUpdate,
    TimingRecord,
    instantiate,
)
from .scales import ScaleValue, nice_bin_step, nice_ticks

__version__ = "0.1.0"

__all__ = [
    "BlockNode", "ChartSpec", "block_hierarchy", "validate",
    "SpecDocument", "SpecNode", "SpecSpan", "parse_spec", "span_of",
    "DataLoadError", "EvalError", "ExpressionError", "FlowlensError",
    "LoweringError", "PathNotFound", "SchemaError", "SpecSyntaxError",
    "UnknownNode", "UnknownPulse", "UnknownSignal", "ValidationError",
    "evaluate", "expression_names", "parse_expression",
    "DataflowDesc", "NodeDesc", "ProfilingMap", "lower", "nodes_for_path",
    "path_for_node", "topological_sort",
    "Session",
    "IcicleNode", "ProfileReport", "build_icicle", "build_report",
    "deserialize_report", "node_table", "serialize_report", "timings_for_path",
    "SceneGraph", "SceneItem", "SceneLayer", "assemble_scene", "scene_to_svg",
    "REPORT_SCHEMA", "validate_report",
    "DataDelta", "Pulse", "Runtime", "SignalUpdate", "TimingRecord",
    "instantiate",
    "ScaleValue", "nice_bin_step", "nice_ticks",
    "__version__",
]
