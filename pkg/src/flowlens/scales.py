"""Scale functions and tick generation.

A ScaleValue is the runtime output of a Scale operator: an immutable
domain+range record that can be applied to data values. Numeric defaults
(band padding 0.1, ~10 linear ticks on a 1/2/5 ladder) are fixed so two
runs over the same data produce identical geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import EvalError

BAND_PADDING = 0.1


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


@dataclass(frozen=True)
class ScaleValue:
    """Resolved scale: maps domain values into the pixel/value range."""

    type: str  # linear | band | ordinal
    domain: Tuple
    range: Tuple

    def apply(self, v):
        if self.type == "linear":
            return self._apply_linear(v)
        if self.type == "band":
            return self._band_layout()[0].get(self._key(v, "band"))
        # ordinal: cycle through the range values
        try:
            idx = self.domain.index(v)
        except ValueError:
            raise EvalError(f"value {v!r} not in ordinal domain") from None
        return self.range[idx % len(self.range)]

    def _apply_linear(self, v):
        if not _is_number(v):
            raise EvalError(f"linear scale needs a number, got {v!r}")
        d0, d1 = self.domain
        if d0 is None or d1 is None:
            raise EvalError("linear scale has an empty domain")
        r0, r1 = self.range
        if d1 == d0:
            return (r0 + r1) / 2
        return r0 + (v - d0) * (r1 - r0) / (d1 - d0)

    def _key(self, v, kind: str):
        if v not in self.domain:
            raise EvalError(f"value {v!r} not in {kind} domain")
        return v

    def _band_layout(self):
        """d3-style band layout: returns ({category: start}, bandwidth)."""
        n = len(self.domain)
        r0, r1 = self.range
        reverse = r1 < r0
        start, stop = (r1, r0) if reverse else (r0, r1)
        p = BAND_PADDING
        step = (stop - start) / max(1, n - p + 2 * p)
        start += (stop - start - step * (n - p)) * 0.5
        positions = [start + step * i for i in range(n)]
        if reverse:
            positions.reverse()
        return dict(zip(self.domain, positions)), step * (1 - p)

    def bandwidth(self) -> float:
        if self.type != "band":
            return 0.0
        if not self.domain:
            return 0.0
        return self._band_layout()[1]

    def ticks(self, count: int = 10) -> List[dict]:
        """Tick descriptors: value, pixel position, label."""
        if self.type == "linear":
            d0, d1 = self.domain
            if d0 is None or d1 is None:
                return []
            return [{"value": v, "position": self._apply_linear(v), "label": _label(v)}
                    for v in nice_ticks(d0, d1, count)]
        if self.type == "band":
            starts, bw = self._band_layout()
            return [{"value": c, "position": starts[c] + bw / 2, "label": _label(c)}
                    for c in self.domain]
        return [{"value": c, "position": i, "label": _label(c)}
                for i, c in enumerate(self.domain)]


def _label(v) -> str:
    if _is_number(v):
        if isinstance(v, float) and v.is_integer():
            return str(int(v))
        return f"{v:.10g}" if isinstance(v, float) else str(v)
    return str(v)


def nice_ticks(start: float, stop: float, count: int = 10) -> List[float]:
    """Roughly ``count`` round values covering [start, stop] (1/2/5 ladder)."""
    if start == stop:
        return [start]
    if start > stop:
        return list(reversed(nice_ticks(stop, start, count)))
    step = _tick_increment(start, stop, count)
    if step > 0:
        lo = math.ceil(start / step)
        hi = math.floor(stop / step)
        return [(lo + i) * step for i in range(int(hi - lo) + 1)]
    inv = -step
    lo = math.ceil(start * inv)
    hi = math.floor(stop * inv)
    return [(lo + i) / inv for i in range(int(hi - lo) + 1)]


def _tick_increment(start: float, stop: float, count: int) -> float:
    e10, e5, e2 = math.sqrt(50), math.sqrt(10), math.sqrt(2)
    step = (stop - start) / max(1, count)
    power = math.floor(math.log10(step))
    error = step / 10 ** power
    if error >= e10:
        factor = 10
    elif error >= e5:
        factor = 5
    elif error >= e2:
        factor = 2
    else:
        factor = 1
    if power >= 0:
        return factor * 10 ** power
    return -(10 ** -power) / factor


def nice_bin_step(span: float, maxbins: int) -> float:
    """Smallest 1/2/5-ladder step that covers ``span`` with at most
    ``maxbins`` bins."""
    if span <= 0:
        return 1.0
    raw = span / maxbins
    power = math.floor(math.log10(raw))
    for exp in range(power, power + 4):
        for factor in (1, 2, 5):
            step = factor * 10.0 ** exp
            if math.ceil(span / step - 1e-12) <= maxbins:
                return step
    return 10.0 ** (power + 4)  # unreachable in practice
