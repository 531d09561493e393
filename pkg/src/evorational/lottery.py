"""Discrete lotteries and selection-weighted fitness statistics.

A lottery is a finite distribution over non-negative payoffs. The fitness of
an individual receiving payoff ``a`` is ``W * (1 - w) + w * a`` where ``W`` is
the endowment and ``w`` the attention degree (selection intensity).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

PROB_SUM_TOL = 1e-12


class InvariantViolation(ValueError):
    """A value breaks a construction invariant.

    ``field`` names the offending field so front-ends can report it.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.reason = message


class ParseError(ValueError):
    """Input text could not be parsed into a lottery."""


def _check_probs(probs: Sequence[float], field: str = "prob") -> None:
    for p in probs:
        if not math.isfinite(p) or p < 0.0 or p > 1.0:
            raise InvariantViolation(field, f"probability {p!r} outside [0, 1]")
    total = math.fsum(probs)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise InvariantViolation(field, f"probabilities sum to {total!r}, not 1")


def _check_payoffs(payoffs: Iterable[float], field: str = "payoff") -> None:
    for a in payoffs:
        if not math.isfinite(a) or a < 0.0:
            raise InvariantViolation(field, f"payoff {a!r} must be finite and >= 0")


@dataclass(frozen=True)
class Lottery:
    """Finite discrete lottery. Zero-probability outcomes are dropped."""

    payoffs: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        payoffs = tuple(float(a) for a in self.payoffs)
        probs = tuple(float(p) for p in self.probs)
        if len(payoffs) != len(probs):
            raise InvariantViolation("outcomes", "payoffs and probs differ in length")
        _check_payoffs(payoffs)
        _check_probs(probs)
        kept = [(a, p) for a, p in zip(payoffs, probs) if p > 0.0]
        if not kept:
            raise InvariantViolation("outcomes", "lottery has no outcomes")
        object.__setattr__(self, "payoffs", tuple(a for a, _ in kept))
        object.__setattr__(self, "probs", tuple(p for _, p in kept))

    @classmethod
    def from_pairs(cls, outcomes: Iterable[tuple[float, float]]) -> Lottery:
        pairs = list(outcomes)
        return cls(tuple(a for a, _ in pairs), tuple(p for _, p in pairs))

    @classmethod
    def sure(cls, payoff: float) -> Lottery:
        return cls((payoff,), (1.0,))

    @property
    def outcomes(self) -> list[tuple[float, float]]:
        return list(zip(self.payoffs, self.probs))

    @cached_property
    def payoff_array(self) -> np.ndarray:
        arr = np.asarray(self.payoffs, dtype=float)
        arr.flags.writeable = False
        return arr

    @cached_property
    def prob_array(self) -> np.ndarray:
        arr = np.asarray(self.probs, dtype=float)
        arr.flags.writeable = False
        return arr

    def scaled(self, factor: float) -> Lottery:
        """Multiply every payoff by ``factor`` (> 0)."""
        if not factor > 0:
            raise InvariantViolation("factor", "scale factor must be positive")
        return Lottery(tuple(factor * a for a in self.payoffs), self.probs)

    def __len__(self) -> int:
        return len(self.payoffs)


@dataclass(frozen=True)
class JointLottery:
    """Joint distribution of the two rewards ``(a, b)`` drawn in one generation."""

    payoffs_a: tuple[float, ...]
    payoffs_b: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        pa = tuple(float(a) for a in self.payoffs_a)
        pb = tuple(float(b) for b in self.payoffs_b)
        probs = tuple(float(p) for p in self.probs)
        if not len(pa) == len(pb) == len(probs):
            raise InvariantViolation("outcomes", "joint columns differ in length")
        _check_payoffs(pa, "payoff_a")
        _check_payoffs(pb, "payoff_b")
        _check_probs(probs)
        kept = [t for t in zip(pa, pb, probs) if t[2] > 0.0]
        if not kept:
            raise InvariantViolation("outcomes", "joint lottery has no outcomes")
        object.__setattr__(self, "payoffs_a", tuple(t[0] for t in kept))
        object.__setattr__(self, "payoffs_b", tuple(t[1] for t in kept))
        object.__setattr__(self, "probs", tuple(t[2] for t in kept))

    @classmethod
    def from_triples(cls, outcomes: Iterable[tuple[float, float, float]]) -> JointLottery:
        rows = list(outcomes)
        return cls(
            tuple(r[0] for r in rows), tuple(r[1] for r in rows), tuple(r[2] for r in rows)
        )

    @classmethod
    def independent(cls, lot_a: Lottery, lot_b: Lottery) -> JointLottery:
        """Product distribution of two lotteries."""
        rows = [
            (a, b, p * q)
            for a, p in zip(lot_a.payoffs, lot_a.probs)
            for b, q in zip(lot_b.payoffs, lot_b.probs)
        ]
        return cls.from_triples(rows)

    def marginals(self) -> tuple[Lottery, Lottery]:
        # Duplicate payoffs are kept as separate outcomes; nothing depends on merging.
        return Lottery(self.payoffs_a, self.probs), Lottery(self.payoffs_b, self.probs)


@dataclass(frozen=True)
class FitnessParams:
    """Endowment ``W > 0`` and attention degree ``0 < w < 1``."""

    endowment: float
    attention: float

    def __post_init__(self):
        W = float(self.endowment)
        w = float(self.attention)
        if not (math.isfinite(W) and W > 0.0):
            raise InvariantViolation("endowment", f"must be > 0, got {W!r}")
        if not (0.0 < w < 1.0):
            raise InvariantViolation("attention", f"must lie in (0, 1), got {w!r}")
        object.__setattr__(self, "endowment", W)
        object.__setattr__(self, "attention", w)

    @property
    def baseline(self) -> float:
        """The payoff-independent part of fitness, ``W * (1 - w)``."""
        return self.endowment * (1.0 - self.attention)


def mean(lot: Lottery) -> float:
    return math.fsum(p * a for a, p in zip(lot.payoffs, lot.probs))


def variance(lot: Lottery) -> float:
    m = mean(lot)
    return math.fsum(p * (a - m) ** 2 for a, p in zip(lot.payoffs, lot.probs))


def fitness(payoff: float, params: FitnessParams) -> float:
    """Selection-weighted fitness ``W(1-w) + w * payoff``; always > 0."""
    return params.baseline + params.attention * payoff


def log_fitness_mean(lot: Lottery, params: FitnessParams) -> float:
    """Expected log fitness, i.e. the log of the geometric mean of fitness."""
    return math.fsum(p * math.log(fitness(a, params)) for a, p in zip(lot.payoffs, lot.probs))


def taylor_log_fitness_mean(lot: Lottery, params: FitnessParams) -> float:
    """Second-order small-variance approximation of :func:`log_fitness_mean`.

    Expands ``log`` around the fitness of the mean payoff::

        log F(m) - w**2 * var / (2 * F(m)**2),   F(m) = W(1-w) + w*m

    With ``W = 1`` this is the familiar ``(1-w) + w*m`` form.
    """
    w = params.attention
    center = fitness(mean(lot), params)
    return math.log(center) - w * w * variance(lot) / (2.0 * center * center)


def payoff_geometric_mean(lot: Lottery) -> float:
    """``prod(a_i ** p_i)``; exactly 0 if any outcome pays 0."""
    if any(a == 0.0 for a in lot.payoffs):
        return 0.0
    return math.exp(math.fsum(p * math.log(a) for a, p in zip(lot.payoffs, lot.probs)))


def log_fitness_grid(lot: Lottery, endowment: float, attentions: np.ndarray) -> np.ndarray:
    """Vectorised :func:`log_fitness_mean` over an array of attention degrees."""
    w = np.asarray(attentions, dtype=float)[..., None]
    fit = endowment * (1.0 - w) + w * lot.payoff_array
    return np.log(fit) @ lot.prob_array


# -- serialization -----------------------------------------------------------


def lottery_to_dict(lot: Lottery) -> dict:
    return {"outcomes": [{"payoff": a, "prob": p} for a, p in lot.outcomes]}


def lottery_to_json(lot: Lottery) -> str:
    return json.dumps(lottery_to_dict(lot))


def lottery_from_dict(obj) -> Lottery:
    try:
        rows = obj["outcomes"]
        pairs = [(float(r["payoff"]), float(r["prob"])) for r in rows]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed lottery object: {exc}") from exc
    return Lottery.from_pairs(pairs)


def lottery_from_json(text: str) -> Lottery:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return lottery_from_dict(obj)


def lottery_to_csv(lot: Lottery) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["payoff", "prob"])
    for a, p in lot.outcomes:
        writer.writerow([repr(a), repr(p)])
    return buf.getvalue()


def lottery_from_csv(text: str) -> Lottery:
    """Parse ``payoff,prob`` rows. A leading header row is optional."""
    pairs = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if lineno == 1 and row[0].strip().lower() == "payoff":
            continue
        if len(row) != 2:
            raise ParseError(f"line {lineno}: expected 2 columns, got {len(row)}")
        try:
            pairs.append((float(row[0]), float(row[1])))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    return Lottery.from_pairs(pairs)


def joint_to_dict(joint: JointLottery) -> dict:
    return {
        "outcomes": [
            {"payoff_a": a, "payoff_b": b, "prob": p}
            for a, b, p in zip(joint.payoffs_a, joint.payoffs_b, joint.probs)
        ]
    }


def joint_from_json(text: str) -> JointLottery:
    try:
        obj = json.loads(text)
        rows = [
            (float(r["payoff_a"]), float(r["payoff_b"]), float(r["prob"]))
            for r in obj["outcomes"]
        ]
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed joint lottery object: {exc}") from exc
    return JointLottery.from_triples(rows)
