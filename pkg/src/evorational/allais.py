"""The Allais paradox under evolutionary rationality.

Two versions are built in: the original stakes (100 and 500 million) and the
Kahneman-Tversky low-stakes restatement (2400 and 2500). In each version,
scenario 1 offers A (left) versus B (right) and scenario 2 offers C (left)
versus D (right). The modal human pattern is A in scenario 1 and D in
scenario 2.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from .er_core import DEFAULT_GRID, critical_attention, fmt_number, gap_grid
from .lottery import Lottery

MILLION = 1e6


class ScenarioName(str, enum.Enum):
    ORIGINAL_S1 = "OriginalS1"
    ORIGINAL_S2 = "OriginalS2"
    KT_S1 = "KT_S1"
    KT_S2 = "KT_S2"


class Variant(str, enum.Enum):
    KT = "kt"
    ORIGINAL = "original"


@dataclass(frozen=True)
class AllaisScenario:
    name: ScenarioName | str
    left: Lottery
    right: Lottery


SCENARIOS: dict[ScenarioName, AllaisScenario] = {
    ScenarioName.ORIGINAL_S1: AllaisScenario(
        ScenarioName.ORIGINAL_S1,
        Lottery.sure(100 * MILLION),
        Lottery.from_pairs([(500 * MILLION, 0.10), (100 * MILLION, 0.89), (0.0, 0.01)]),
    ),
    ScenarioName.ORIGINAL_S2: AllaisScenario(
        ScenarioName.ORIGINAL_S2,
        Lottery.from_pairs([(100 * MILLION, 0.11), (0.0, 0.89)]),
        Lottery.from_pairs([(500 * MILLION, 0.10), (0.0, 0.90)]),
    ),
    ScenarioName.KT_S1: AllaisScenario(
        ScenarioName.KT_S1,
        Lottery.sure(2400.0),
        Lottery.from_pairs([(2500.0, 0.33), (2400.0, 0.66), (0.0, 0.01)]),
    ),
    ScenarioName.KT_S2: AllaisScenario(
        ScenarioName.KT_S2,
        Lottery.from_pairs([(2400.0, 0.34), (0.0, 0.66)]),
        Lottery.from_pairs([(2500.0, 0.33), (0.0, 0.67)]),
    ),
}

_PAIRS = {
    Variant.KT: (ScenarioName.KT_S1, ScenarioName.KT_S2),
    Variant.ORIGINAL: (ScenarioName.ORIGINAL_S1, ScenarioName.ORIGINAL_S2),
}


def scenario_pair(variant: Variant | str) -> tuple[AllaisScenario, AllaisScenario]:
    s1, s2 = _PAIRS[Variant(variant)]
    return SCENARIOS[s1], SCENARIOS[s2]


def option(label: str) -> Lottery:
    """Look up a built-in option by label such as ``"kt.A"`` or ``"original.D"``."""
    try:
        variant, letter = label.split(".")
        s1, s2 = scenario_pair(variant)
    except ValueError:
        raise KeyError(label) from None
    table = {"A": s1.left, "B": s1.right, "C": s2.left, "D": s2.right}
    if letter not in table:
        raise KeyError(label)
    return table[letter]


def _check(W: float, w: float) -> None:
    if not W > 0:
        raise ValueError("endowment must be > 0")
    if not 0.0 < w < 1.0:
        raise ValueError("attention must lie in (0, 1)")


# The four inequalities below are written out term by term, independently of
# er_core, so the two routes can be cross-checked.


def kt_s1_holds(W: float, w: float) -> bool:
    """Is the sure 2400 (A) the ER option in KT scenario 1?"""
    _check(W, w)
    base = W * (1 - w)
    lhs = math.log(base + 2400 * w)
    rhs = 0.33 * math.log(base + 2500 * w) + 0.66 * math.log(base + 2400 * w) + 0.01 * math.log(base)
    return lhs > rhs


def kt_s2_holds(W: float, w: float) -> bool:
    """Is the 33% shot at 2500 (D) the ER option in KT scenario 2?"""
    _check(W, w)
    base = W * (1 - w)
    lhs = 0.33 * math.log(base + 2500 * w) + 0.67 * math.log(base)
    rhs = 0.34 * math.log(base + 2400 * w) + 0.66 * math.log(base)
    return lhs > rhs


def original_s1_holds(W: float, w: float) -> bool:
    _check(W, w)
    base = W * (1 - w)
    big, huge = 100 * MILLION, 500 * MILLION
    lhs = math.log(base + big * w)
    rhs = 0.10 * math.log(base + huge * w) + 0.89 * math.log(base + big * w) + 0.01 * math.log(base)
    return lhs > rhs


def original_s2_holds(W: float, w: float) -> bool:
    _check(W, w)
    base = W * (1 - w)
    big, huge = 100 * MILLION, 500 * MILLION
    lhs = 0.10 * math.log(base + huge * w) + 0.90 * math.log(base)
    rhs = 0.11 * math.log(base + big * w) + 0.89 * math.log(base)
    return lhs > rhs


_HOLDS = {
    Variant.KT: (kt_s1_holds, kt_s2_holds),
    Variant.ORIGINAL: (original_s1_holds, original_s2_holds),
}


@dataclass(frozen=True)
class RegionPoint:
    endowment: float
    attention: float
    prefers_A_in_S1: bool
    prefers_D_in_S2: bool


def region_sweep(variant: Variant | str, endowments, attentions) -> list[RegionPoint]:
    """Evaluate both scenario inequalities on a ``(W, w)`` grid, row-major in ``W``."""
    endowments = [float(W) for W in endowments]
    attentions = [float(w) for w in attentions]
    if not endowments or not attentions:
        raise ValueError("grids must be non-empty")
    s1, s2 = _HOLDS[Variant(variant)]
    return [RegionPoint(W, w, s1(W, w), s2(W, w)) for W in endowments for w in attentions]


def region_csv(points: list[RegionPoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["W", "w", "s1_prefers_A", "s2_prefers_D"])
    for p in points:
        writer.writerow(
            [
                fmt_number(p.endowment),
                fmt_number(p.attention),
                int(p.prefers_A_in_S1),
                int(p.prefers_D_in_S2),
            ]
        )
    return buf.getvalue()


@dataclass(frozen=True)
class ParadoxReport:
    """Whether one fixed attention degree can rationalise the modal A-and-D pattern.

    ``s1_thresholds`` are the roots of the A-vs-B gap, ``s2_thresholds`` of
    the D-vs-C gap. ``both_satisfiable`` is True if some probed ``w`` (off the
    boundary) makes A and D the ER options simultaneously.
    """

    variant: str
    endowment: float
    s1_thresholds: tuple[float, ...]
    s2_thresholds: tuple[float, ...]
    both_satisfiable: bool
    has_paradox_structure: bool
    grid: int

    @property
    def wstar(self) -> float | None:
        return self.s1_thresholds[0] if len(self.s1_thresholds) == 1 else None

    def statement(self) -> str:
        if not self.has_paradox_structure:
            return "no threshold: the pair has no paradox structure at this endowment"
        if self.both_satisfiable:
            return "some single attention degree makes both A and D ER options"
        return (
            "no single attention degree makes both A and D ER options; "
            "choosing A and D requires w > w* in scenario 1 and w < w* in scenario 2"
        )

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "endowment": self.endowment,
            "wstar": self.wstar,
            "s1_thresholds": list(self.s1_thresholds),
            "s2_thresholds": list(self.s2_thresholds),
            "both_satisfiable": self.both_satisfiable,
            "has_paradox_structure": self.has_paradox_structure,
            "grid": self.grid,
            "statement": self.statement(),
        }


def paradox_consistency_report(
    variant: Variant | str,
    endowment: float,
    *,
    scenarios: tuple[AllaisScenario, AllaisScenario] | None = None,
    grid: int = DEFAULT_GRID,
    boundary_tol: float = 1e-9,
) -> ParadoxReport:
    """Thresholds for both scenarios and a dense check for a common ``w``.

    ``scenarios`` overrides the built-in pair for ``variant`` (used to probe
    custom or degenerate pairs).
    """
    if not endowment > 0:
        raise ValueError("endowment must be > 0")
    s1, s2 = scenarios if scenarios is not None else scenario_pair(variant)
    r1 = critical_attention(s1.left, s1.right, endowment, grid)
    r2 = critical_attention(s2.right, s2.left, endowment, grid)

    ws = np.linspace(1e-6, 1 - 1e-6, 20 * grid)
    g1 = gap_grid(s1.left, s1.right, endowment, ws)
    g2 = gap_grid(s2.right, s2.left, endowment, ws)
    off_boundary = (np.abs(g1) > boundary_tol) & (np.abs(g2) > boundary_tol)
    both = bool(np.any((g1 > 0) & (g2 > 0) & off_boundary))
    return ParadoxReport(
        variant=str(Variant(variant).value) if scenarios is None else str(variant),
        endowment=float(endowment),
        s1_thresholds=r1.roots,
        s2_thresholds=r2.roots,
        both_satisfiable=both,
        has_paradox_structure=bool(r1.roots) and not r1.degenerate,
        grid=grid,
    )
