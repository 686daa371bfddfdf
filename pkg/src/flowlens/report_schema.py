"""JSON Schema for the profile report file.

The canonical definition lives here as ``REPORT_SCHEMA``; the same
structure is documented for humans in docs/report-schema.md. Anything the
web client consumes must validate against this schema.
"""

from __future__ import annotations

import jsonschema

from .errors import SchemaError

NODE_KINDS = [
    "Source", "Copy", "Filter", "Formula", "Extent", "Bin", "Aggregate",
    "Collect", "Signal", "ScaleDomain", "Scale", "Encode", "AxisTicks",
    "Render",
]

_NON_NEGATIVE = {"type": "integer", "minimum": 0}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "flowlens profile report",
    "type": "object",
    "additionalProperties": False,
    "required": ["version", "spec_text", "spans", "nodes", "edges",
                 "forward", "backward", "pulses", "scene_svg"],
    "properties": {
        "version": {"const": 1},
        "spec_text": {"type": "string"},
        "spans": {"type": "array", "items": {"$ref": "#/$defs/spanEntry"}},
        "nodes": {"type": "array", "items": {"$ref": "#/$defs/node"}},
        "edges": {"type": "array", "items": {"$ref": "#/$defs/edge"}},
        "forward": {"type": "array", "items": {"$ref": "#/$defs/forwardEntry"}},
        "backward": {"type": "array", "items": {"$ref": "#/$defs/backwardEntry"}},
        "pulses": {"type": "array", "items": {"$ref": "#/$defs/pulse"}},
        "scene_svg": {"type": "string"},
    },
    "$defs": {
        "path": {
            "type": "array",
            "items": {"type": ["string", "integer"]},
        },
        "span": {
            "type": "object",
            "additionalProperties": False,
            "required": ["start_line", "start_col", "end_line", "end_col",
                         "byte_start", "byte_end"],
            "properties": {
                "start_line": {"type": "integer", "minimum": 1},
                "start_col": {"type": "integer", "minimum": 1},
                "end_line": {"type": "integer", "minimum": 1},
                "end_col": {"type": "integer", "minimum": 1},
                "byte_start": _NON_NEGATIVE,
                "byte_end": _NON_NEGATIVE,
            },
        },
        "spanEntry": {
            "type": "object",
            "additionalProperties": False,
            "required": ["path", "span"],
            "properties": {
                "path": {"$ref": "#/$defs/path"},
                "span": {"$ref": "#/$defs/span"},
            },
        },
        "node": {
            "type": "object",
            "additionalProperties": False,
            "required": ["id", "kind", "origin", "params"],
            "properties": {
                "id": _NON_NEGATIVE,
                "kind": {"enum": NODE_KINDS},
                "origin": {"$ref": "#/$defs/path"},
                "params": {"type": "object"},
            },
        },
        "edge": {
            "type": "array",
            "prefixItems": [_NON_NEGATIVE, _NON_NEGATIVE],
            "items": False,
            "minItems": 2,
            "maxItems": 2,
        },
        "forwardEntry": {
            "type": "object",
            "additionalProperties": False,
            "required": ["path", "nodes"],
            "properties": {
                "path": {"$ref": "#/$defs/path"},
                "nodes": {"type": "array", "items": _NON_NEGATIVE},
            },
        },
        "backwardEntry": {
            "type": "object",
            "additionalProperties": False,
            "required": ["node", "path"],
            "properties": {
                "node": _NON_NEGATIVE,
                "path": {"$ref": "#/$defs/path"},
            },
        },
        "trigger": {
            "oneOf": [
                {"const": "init"},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["name", "value"],
                    "properties": {"name": {"type": "string"}, "value": True},
                },
            ],
        },
        "timing": {
            "type": "object",
            "additionalProperties": False,
            "required": ["node", "duration_ns", "seq"],
            "properties": {
                "node": _NON_NEGATIVE,
                "duration_ns": _NON_NEGATIVE,
                "seq": _NON_NEGATIVE,
            },
        },
        "delta": {
            "type": "object",
            "additionalProperties": False,
            "required": ["node", "rows_in", "rows_out", "changed"],
            "properties": {
                "node": _NON_NEGATIVE,
                "rows_in": _NON_NEGATIVE,
                "rows_out": _NON_NEGATIVE,
                "changed": {"type": "boolean"},
            },
        },
        "icicle": {
            "type": "object",
            "additionalProperties": False,
            "required": ["label", "kind", "value_ns", "children"],
            "properties": {
                "label": {"type": "string"},
                "kind": {"enum": ["root", "block", "node", "overhead"]},
                "value_ns": _NON_NEGATIVE,
                "path": {"$ref": "#/$defs/path"},
                "node": _NON_NEGATIVE,
                "children": {"type": "array", "items": {"$ref": "#/$defs/icicle"}},
            },
        },
        "tableRow": {
            "type": "object",
            "additionalProperties": False,
            "required": ["node", "kind", "path", "duration_ns", "share"],
            "properties": {
                "node": _NON_NEGATIVE,
                "kind": {"enum": NODE_KINDS},
                "path": {"$ref": "#/$defs/path"},
                "duration_ns": _NON_NEGATIVE,
                "share": {"type": "number", "minimum": 0},
            },
        },
        "pulse": {
            "type": "object",
            "additionalProperties": False,
            "required": ["pulse_id", "trigger", "wall_total", "evaluated",
                         "timings", "data_deltas", "icicle", "node_table"],
            "properties": {
                "pulse_id": _NON_NEGATIVE,
                "trigger": {"$ref": "#/$defs/trigger"},
                "wall_total": _NON_NEGATIVE,
                "evaluated": {"type": "array", "items": _NON_NEGATIVE},
                "timings": {"type": "array", "items": {"$ref": "#/$defs/timing"}},
                "data_deltas": {"type": "array", "items": {"$ref": "#/$defs/delta"}},
                "icicle": {"$ref": "#/$defs/icicle"},
                "node_table": {"type": "array", "items": {"$ref": "#/$defs/tableRow"}},
            },
        },
    },
}


def validate_report(data: dict) -> None:
    """Raise SchemaError (with a JSON-path location) if data does not
    match REPORT_SCHEMA."""
    validator = jsonschema.Draft202012Validator(REPORT_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        raise SchemaError(best.message, location=best.json_path)
