"""Box-counting reports and inequality verdicts.

Lower and upper box values stand in for Hausdorff and packing dimension.
They coincide with those dimensions only for homogeneous presets such as
Cantor sets and digit sets, which is why every report carries a caveat flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dyadic import EMPTY, DyadicSet, Explicit, box_count, coarsen
from .errors import ConfigError

DEFAULT_SLACK = 0.05
MIN_LEVELS = 4


@dataclass(frozen=True)
class DimReport:
    levels: tuple[tuple[int, float], ...]
    window: tuple[int, int]
    lower_box: float
    upper_box: float
    regression_slope: float
    exact: bool
    empty: bool = False
    proxy_caveat: bool = True
    n: int = 1

    @property
    def backing_note(self) -> str:
        return "exact" if self.exact else "approximate (line-union counter)"

    def ratios(self) -> list[float]:
        return [c / j for j, c in self.levels]

    def to_csv(self) -> str:
        rows = ["j,log2N,ratio"]
        for j, c in self.levels:
            rows.append(f"{j},{c!r},{c / j!r}")
        return "\n".join(rows) + "\n"

    def summary(self) -> str:
        return "\n".join([
            "levels: " + " ".join(f"{j}:{c:.6g}" for j, c in self.levels),
            f"window: [{self.window[0]}, {self.window[1]}]",
            f"lower_box: {self.lower_box!r}",
            f"upper_box: {self.upper_box!r}",
            f"regression_slope: {self.regression_slope!r}",
            f"backing_note: {self.backing_note}",
        ]) + "\n"


def default_window(resolution: int) -> tuple[int, int]:
    return max(1, math.ceil(resolution / 10)), resolution


def log_counts(s: DyadicSet, levels) -> list[tuple[int, float]]:
    """``(j, log2 N_j)`` pairs; explicit sets are coarsened finest-first."""
    levels = sorted(set(int(j) for j in levels))
    if not levels:
        return []
    if levels[-1] > s.level:
        raise ConfigError(f"level {levels[-1]} exceeds the set resolution {s.level}")
    if not isinstance(s.backing, Explicit):
        return [(j, box_count(s, j)) for j in levels]
    out = []
    cur = s
    for j in reversed(levels):
        cur = coarsen(cur, j)
        n = cur.backing.keys.size
        out.append((j, EMPTY if n == 0 else math.log2(n)))
    return out[::-1]


def dim_report(s: DyadicSet, window: tuple[int, int] | None = None, levels=None) -> DimReport:
    """Counts over a window of levels (or an explicit level list) and their summaries."""
    if levels is None:
        j0, j1 = default_window(s.level) if window is None else window
        if j0 < 1:
            raise ConfigError("window must start at level 1 or later")
        levels = range(j0, j1 + 1)
    levels = sorted(set(int(j) for j in levels))
    if len(levels) < MIN_LEVELS:
        raise ConfigError(f"need at least {MIN_LEVELS} levels, got {len(levels)}")
    counts = log_counts(s, levels)
    win = (levels[0], levels[-1])
    if any(c == EMPTY for _, c in counts):
        return DimReport(tuple(counts), win, 0.0, 0.0, 0.0, s.exact, empty=True, n=s.n)
    ratios = [c / j for j, c in counts]
    xs = np.array([j for j, _ in counts], dtype=float)
    ys = np.array([c for _, c in counts], dtype=float)
    slope = float(np.polyfit(xs, ys, 1)[0])
    return DimReport(tuple(counts), win, min(ratios), max(ratios), slope, s.exact, n=s.n)


@dataclass(frozen=True)
class Verdict:
    status: str  # PASS, FAIL or VACUOUS
    margin: float
    label: str = ""
    slack: float = DEFAULT_SLACK
    operands: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status != "FAIL"

    def to_text(self) -> str:
        head = f"{self.status} {self.label} margin={self.margin:+.6f} slack={self.slack}"
        if self.status != "FAIL":
            return head
        dump = [f"  {k} = {_describe(v)}" for k, v in self.operands.items()]
        return "\n".join([head, *dump])


def _describe(v) -> str:
    if isinstance(v, DimReport):
        return f"DimReport(lower={v.lower_box:.6f}, upper={v.upper_box:.6f}, slope={v.regression_slope:.6f}, window={v.window})"
    return repr(v)


def inequality_verdict(lhs, rhs, slack: float = DEFAULT_SLACK, label: str = "",
                       operands: dict | None = None) -> Verdict:
    """Check ``lhs <= rhs`` up to ``slack``; the margin is ``rhs - lhs``.

    Any empty report among the operands, or a missing side, makes the
    verdict vacuous.
    """
    operands = dict(operands or {})
    for side, v in (("lhs", lhs), ("rhs", rhs)):
        if isinstance(v, DimReport):
            operands.setdefault(side, v)
            if not v.empty:
                raise ConfigError(f"{side} is a report; pass its lower_box or upper_box")
    if lhs is None or rhs is None or any(isinstance(v, DimReport) and v.empty for v in operands.values()):
        return Verdict("VACUOUS", 0.0, label, slack, operands)
    margin = float(rhs) - float(lhs)
    if math.isnan(margin):
        return Verdict("VACUOUS", 0.0, label, slack, operands)
    return Verdict("PASS" if margin >= -slack else "FAIL", margin, label, slack, operands)
