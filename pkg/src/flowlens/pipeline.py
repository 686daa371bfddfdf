"""End-to-end session: spec text in, pulses and reports out."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Union

from .chart import BlockNode, ChartSpec, block_hierarchy, validate
from .document import SpecDocument, parse_spec
from .lowering import DataflowDesc, ProfilingMap, lower
from .profiler import ProfileReport, build_report
from .renderer import assemble_scene, scene_to_svg
from .runtime import Pulse, Runtime, SignalUpdate, instantiate


@dataclass
class Session:
    document: SpecDocument
    chart: ChartSpec
    blocks: BlockNode
    desc: DataflowDesc
    mapping: ProfilingMap
    runtime: Runtime

    @classmethod
    def from_text(cls, text: str, data_dir: Union[str, Path] = ".") -> "Session":
        document = parse_spec(text)
        chart = validate(document)
        blocks = block_hierarchy(document, chart)
        desc, mapping = lower(chart)
        runtime = instantiate(desc, chart, data_dir)
        return cls(document, chart, blocks, desc, mapping, runtime)

    def run_initial(self) -> Pulse:
        return self.runtime.run_initial()

    def apply_event(self, name: str, value) -> Pulse:
        return self.runtime.apply_signal(SignalUpdate(name, value))

    def run_events(self, events: Iterable[dict]) -> List[Pulse]:
        return [self.apply_event(e["signal"], e["value"]) for e in events]

    def scene_svg(self) -> str:
        return scene_to_svg(assemble_scene(self.desc, self.runtime.cache))

    def report(self) -> ProfileReport:
        return build_report(self.document, self.desc, self.mapping,
                            self.blocks, self.runtime, self.scene_svg())
