"""Evolutionarily rational (ER) option classification and critical attention.

The option whose fitness has the larger geometric mean (equivalently the larger
expected log fitness) is the ER option; its fixation state is the stochastically
stable one. The critical attention degree ``w*`` is where the two geometric
means coincide.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .lottery import (
    FitnessParams,
    Lottery,
    log_fitness_grid,
    log_fitness_mean,
    mean,
    payoff_geometric_mean,
)

DEFAULT_TOLERANCE = 1e-12
DEFAULT_GRID = 1024
W_MIN = 1e-9
W_MAX = 1.0 - 1e-9
BISECTION_WIDTH = 1e-12
ROOT_RESIDUAL = 1e-10


class Verdict(str, enum.Enum):
    OPTION_A = "OptionA"
    OPTION_B = "OptionB"
    BOTH = "Both"


@dataclass(frozen=True)
class ERVerdict:
    tag: Verdict
    gap: float

    def to_dict(self) -> dict:
        return {"tag": self.tag.value, "gap": self.gap}


def _verdict(gap: float, tolerance: float) -> ERVerdict:
    if gap > tolerance:
        return ERVerdict(Verdict.OPTION_A, gap)
    if gap < -tolerance:
        return ERVerdict(Verdict.OPTION_B, gap)
    return ERVerdict(Verdict.BOTH, gap)


def growth_gap(lot_a: Lottery, lot_b: Lottery, params: FitnessParams) -> float:
    """``<log pi_A> - <log pi_B>``; positive means A-choosers take over."""
    return log_fitness_mean(lot_a, params) - log_fitness_mean(lot_b, params)


def classify(
    lot_a: Lottery,
    lot_b: Lottery,
    params: FitnessParams,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ERVerdict:
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    return _verdict(growth_gap(lot_a, lot_b, params), tolerance)


def _relative_verdict(x: float, y: float, tolerance: float) -> ERVerdict:
    # Ties are judged relative to the magnitude of the compared quantities.
    scale = max(1.0, abs(x), abs(y))
    v = _verdict((x - y) / scale, tolerance)
    return ERVerdict(v.tag, x - y)


def classify_small_w_limit(
    lot_a: Lottery, lot_b: Lottery, tolerance: float = DEFAULT_TOLERANCE
) -> ERVerdict:
    """Verdict as ``w -> 0``: the larger arithmetic mean payoff wins."""
    return _relative_verdict(mean(lot_a), mean(lot_b), tolerance)


def classify_large_w_limit(
    lot_a: Lottery, lot_b: Lottery, tolerance: float = DEFAULT_TOLERANCE
) -> ERVerdict:
    """Verdict as ``w -> 1``: the larger geometric mean payoff wins.

    A lottery with any zero payoff has geometric mean 0.
    """
    return _relative_verdict(payoff_geometric_mean(lot_a), payoff_geometric_mean(lot_b), tolerance)


@dataclass(frozen=True)
class WstarResult:
    """Roots of the growth gap in ``w`` at a fixed endowment.

    ``degenerate`` is set when the gap vanishes on the whole bracketing grid
    (e.g. identical lotteries), in which case there is no threshold.
    """

    roots: tuple[float, ...]
    bracket_grid_size: int
    residuals: tuple[float, ...]
    degenerate: bool = False


def gap_grid(lot_a: Lottery, lot_b: Lottery, endowment: float, attentions) -> np.ndarray:
    return log_fitness_grid(lot_a, endowment, attentions) - log_fitness_grid(
        lot_b, endowment, attentions
    )


def _bisect(f, lo: float, hi: float, f_lo: float) -> float:
    """Shrink ``[lo, hi]`` around a sign change of ``f``.

    Stops once the bracket is narrower than ``BISECTION_WIDTH`` and the
    residual is below ``ROOT_RESIDUAL``, or when no float lies strictly inside.
    Steep gaps near ``w = 1`` need the residual condition.
    """
    s_lo = math.copysign(1.0, f_lo)
    f_hi = f(hi)
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if math.copysign(1.0, f_mid) == s_lo:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
        if hi - lo <= BISECTION_WIDTH and min(abs(f_lo), abs(f_hi)) <= ROOT_RESIDUAL:
            break
    return lo if abs(f_lo) <= abs(f_hi) else hi


def critical_attention(
    lot_a: Lottery, lot_b: Lottery, endowment: float, grid: int = DEFAULT_GRID
) -> WstarResult:
    """Every ``w`` in ``(0, 1)`` where the growth gap changes sign.

    The gap is scanned on ``grid`` uniform points over ``[1e-9, 1 - 1e-9]``;
    each sign change is refined by bisection to an interval below 1e-12.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    if not endowment > 0:
        raise ValueError("endowment must be > 0")

    def gap(w: float) -> float:
        return growth_gap(lot_a, lot_b, FitnessParams(endowment, w))

    ws = np.linspace(W_MIN, W_MAX, grid)
    values = gap_grid(lot_a, lot_b, endowment, ws)
    signs = np.sign(values)

    if np.all(np.abs(values) <= DEFAULT_TOLERANCE):
        return WstarResult((), grid, (), degenerate=True)

    roots = []
    for i in range(grid - 1):
        if signs[i] * signs[i + 1] < 0:
            roots.append(_bisect(gap, float(ws[i]), float(ws[i + 1]), float(values[i])))
        elif signs[i + 1] == 0 and 0 < i + 1 < grid - 1 and signs[i] * signs[i + 2] < 0:
            roots.append(float(ws[i + 1]))
    return WstarResult(tuple(roots), grid, tuple(gap(r) for r in roots))


@dataclass(frozen=True)
class WstarCurve:
    rows: tuple[tuple[float, WstarResult], ...] = field(default_factory=tuple)

    def pairs(self) -> list[tuple[float, float | None]]:
        """Flattened ``(W, w*)`` pairs; ``None`` where no root exists."""
        out = []
        for W, res in self.rows:
            if res.roots:
                out.extend((W, r) for r in res.roots)
            else:
                out.append((W, None))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["W", "wstar"])
        for W, r in self.pairs():
            writer.writerow([fmt_number(W), "" if r is None else fmt_number(r)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps([{"W": W, "wstar": r} for W, r in self.pairs()])


def fmt_number(x: float) -> str:
    return f"{x:.15g}"


def sweep_wstar(
    lot_a: Lottery, lot_b: Lottery, endowments, grid: int = DEFAULT_GRID
) -> WstarCurve:
    endowments = [float(W) for W in endowments]
    if not endowments:
        raise ValueError("endowments must be non-empty")
    if any(not W > 0 for W in endowments):
        raise ValueError("every endowment must be > 0")
    return WstarCurve(tuple((W, critical_attention(lot_a, lot_b, W, grid)) for W in endowments))
