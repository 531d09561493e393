"""Stochastic frequency dynamics of A- versus B-choosers.

All individuals choosing the same lottery share that generation's reward
(aggregate risk), so the frequency ``x`` of A-choosers follows

    x' = x * pi_A / (x * pi_A + (1 - x) * pi_B)

with one ``(a, b)`` reward pair drawn per generation. Random numbers come from
numpy's PCG64 generator. A run seeded with ``seed`` uses
``np.random.SeedSequence(seed)``; replicate ``i`` of a fixation estimate uses
the ``i``-th child of ``SeedSequence(seed).spawn(replicates)``.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .er_core import growth_gap
from .lottery import FitnessParams, JointLottery, Lottery, fitness

_CHUNK = 1024


class AbsorbedState(str, enum.Enum):
    NEAR_ZERO = "NearZero"
    NEAR_ONE = "NearOne"


class PredictedState(str, enum.Enum):
    NEAR_ONE = "NearOne"
    NEAR_ZERO = "NearZero"
    NEUTRAL = "Neutral"


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    max_generations: int = 100_000
    fixation_epsilon: float = 1e-6
    replicates: int = 1000
    initial_frequency: float = 0.5

    def __post_init__(self):
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.max_generations < 1:
            raise ValueError("max_generations must be positive")
        if not (0.0 < self.fixation_epsilon < 0.5):
            raise ValueError("fixation_epsilon must lie in (0, 0.5)")
        if self.replicates < 1:
            raise ValueError("replicates must be positive")
        if not (0.0 < self.initial_frequency < 1.0):
            raise ValueError("initial_frequency must lie in (0, 1)")


# -- one-step maps -------------------------------------------------------------


def step_frequency(x: float, a: float, b: float, params: FitnessParams) -> float:
    if x <= 0.0 or x >= 1.0:
        return x
    pa = fitness(a, params)
    pb = fitness(b, params)
    return x * pa / (x * pa + (1.0 - x) * pb)


def step_delta(x: float, a: float, b: float, params: FitnessParams) -> float:
    """Frequency increment ``x(1-x)(pi_A - pi_B) / mean fitness``."""
    if x <= 0.0 or x >= 1.0:
        return 0.0
    pa = fitness(a, params)
    pb = fitness(b, params)
    return x * (1.0 - x) * (pa - pb) / (x * pa + (1.0 - x) * pb)


def step_odds(u: float, a: float, b: float, params: FitnessParams) -> float:
    """Odds ``u = x / (1 - x)`` update: ``u * pi_A / pi_B``."""
    if u < 0:
        raise ValueError("odds must be >= 0")
    return u * fitness(a, params) / fitness(b, params)


# -- reward sampling -----------------------------------------------------------


class _RewardSampler:
    def __init__(self, lot_a: Lottery | None, lot_b: Lottery | JointLottery):
        if isinstance(lot_b, JointLottery):
            self.joint = lot_b
            self.lot_a, self.lot_b = lot_b.marginals()
        else:
            if lot_a is None:
                raise ValueError("lot_a is required unless a JointLottery is given")
            self.joint = None
            self.lot_a, self.lot_b = lot_a, lot_b

    def draw(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        if self.joint is not None:
            idx = rng.choice(len(self.joint.probs), size=n, p=np.asarray(self.joint.probs))
            return (
                np.asarray(self.joint.payoffs_a)[idx],
                np.asarray(self.joint.payoffs_b)[idx],
            )
        ia = rng.choice(len(self.lot_a), size=n, p=self.lot_a.prob_array)
        ib = rng.choice(len(self.lot_b), size=n, p=self.lot_b.prob_array)
        return self.lot_a.payoff_array[ia], self.lot_b.payoff_array[ib]

    def log_ratio_table(self, params: FitnessParams) -> tuple[np.ndarray, np.ndarray]:
        """Support and probabilities of ``log(pi_A / pi_B)`` for one generation."""
        W, w = params.endowment, params.attention
        if self.joint is not None:
            pa = np.asarray(self.joint.payoffs_a)
            pb = np.asarray(self.joint.payoffs_b)
            probs = np.asarray(self.joint.probs)
        else:
            pa = np.repeat(self.lot_a.payoff_array, len(self.lot_b))
            pb = np.tile(self.lot_b.payoff_array, len(self.lot_a))
            probs = np.outer(self.lot_a.prob_array, self.lot_b.prob_array).ravel()
        base = W * (1.0 - w)
        return np.log(base + w * pa) - np.log(base + w * pb), probs


def log_ratio_std(
    lot_a: Lottery | None, lot_b: Lottery | JointLottery, params: FitnessParams
) -> float:
    """Exact standard deviation of the per-generation log fitness ratio."""
    values, probs = _RewardSampler(lot_a, lot_b).log_ratio_table(params)
    m = float(values @ probs)
    return math.sqrt(max(float(((values - m) ** 2) @ probs), 0.0))


def _rng(seed_seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_seq))


# -- trajectories --------------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    frequencies: np.ndarray
    rewards: np.ndarray  # shape (generations, 2): columns a, b
    absorbed_at: int | None
    absorbed_state: AbsorbedState | None
    log_odds_change: float

    @property
    def generations(self) -> int:
        return len(self.rewards)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["generation", "x", "a", "b"])
        for t, x in enumerate(self.frequencies):
            if t < len(self.rewards):
                a, b = self.rewards[t]
                writer.writerow([t, repr(float(x)), repr(float(a)), repr(float(b))])
            else:
                writer.writerow([t, repr(float(x)), "", ""])
        return buf.getvalue()


def _run(
    sampler: _RewardSampler,
    params: FitnessParams,
    config: SimConfig,
    rng: np.random.Generator,
) -> Trajectory:
    eps = config.fixation_epsilon
    lo, hi = eps, 1.0 - eps
    x = config.initial_frequency
    xs = [x]
    draws_a: list[np.ndarray] = []
    draws_b: list[np.ndarray] = []
    log_odds = 0.0
    absorbed_at = None
    t = 0

    def absorbed(x: float) -> bool:
        return x <= lo or x >= hi

    if absorbed(x):
        absorbed_at = 0
    while absorbed_at is None and t < config.max_generations:
        n = min(_CHUNK, config.max_generations - t)
        a_chunk, b_chunk = sampler.draw(rng, n)
        used = n
        for k in range(n):
            a = float(a_chunk[k])
            b = float(b_chunk[k])
            log_odds += math.log(fitness(a, params)) - math.log(fitness(b, params))
            x = step_frequency(x, a, b, params)
            xs.append(x)
            t += 1
            if absorbed(x):
                absorbed_at = t
                used = k + 1
                break
        draws_a.append(a_chunk[:used])
        draws_b.append(b_chunk[:used])

    rewards = (
        np.column_stack([np.concatenate(draws_a), np.concatenate(draws_b)])
        if draws_a
        else np.empty((0, 2))
    )
    state = None
    if xs[-1] >= hi:
        state = AbsorbedState.NEAR_ONE
    elif xs[-1] <= lo:
        state = AbsorbedState.NEAR_ZERO
    return Trajectory(np.asarray(xs), rewards, absorbed_at, state, log_odds)


def simulate_trajectory(
    lot_a: Lottery | None,
    lot_b: Lottery | JointLottery,
    params: FitnessParams,
    config: SimConfig,
) -> Trajectory:
    """Iterate the frequency recurrence until absorption or ``max_generations``.

    If ``lot_b`` is a :class:`JointLottery`, each generation draws one joint
    ``(a, b)`` outcome and ``lot_a`` is ignored; otherwise ``a`` and ``b`` are
    drawn independently.
    """
    sampler = _RewardSampler(lot_a, lot_b)
    return _run(sampler, params, config, _rng(np.random.SeedSequence(config.seed)))


def estimate_growth_rate(
    lot_a: Lottery | None,
    lot_b: Lottery | JointLottery,
    params: FitnessParams,
    config: SimConfig,
) -> float:
    """Empirical ``(log u_n - log u_0) / n`` over ``max_generations`` steps.

    The odds recurrence is run without absorption, accumulated in log space so
    ``u`` cannot overflow. Converges to :func:`growth_gap` as ``n`` grows.
    """
    sampler = _RewardSampler(lot_a, lot_b)
    rng = _rng(np.random.SeedSequence(config.seed))
    W, w = params.endowment, params.attention
    base = W * (1.0 - w)
    n = config.max_generations
    total = 0.0
    done = 0
    while done < n:
        m = min(65536, n - done)
        a, b = sampler.draw(rng, m)
        total += math.fsum(np.log(base + w * a) - np.log(base + w * b))
        done += m
    return total / n


@dataclass(frozen=True)
class FixationReport:
    replicates: int
    fraction_near_one: float
    fraction_near_zero: float
    fraction_unabsorbed: float
    predicted_state: PredictedState
    mean_growth_rate: float
    growth_gap: float
    mean_absorption_time: float | None
    endowment: float
    attention: float
    config: SimConfig
    joint: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["predicted_state"] = self.predicted_state.value
        d["config"] = asdict(self.config)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def predicted_state(gap: float, tolerance: float = 1e-12) -> PredictedState:
    if gap > tolerance:
        return PredictedState.NEAR_ONE
    if gap < -tolerance:
        return PredictedState.NEAR_ZERO
    return PredictedState.NEUTRAL


def estimate_fixation(
    lot_a: Lottery | None,
    lot_b: Lottery | JointLottery,
    params: FitnessParams,
    config: SimConfig,
) -> FixationReport:
    """Absorption fractions over ``config.replicates`` independent runs."""
    sampler = _RewardSampler(lot_a, lot_b)
    gap = growth_gap(sampler.lot_a, sampler.lot_b, params)
    children = np.random.SeedSequence(config.seed).spawn(config.replicates)
    near_one = near_zero = 0
    rates = []
    times = []
    for child in children:
        traj = _run(sampler, params, config, _rng(child))
        if traj.absorbed_state is AbsorbedState.NEAR_ONE:
            near_one += 1
        elif traj.absorbed_state is AbsorbedState.NEAR_ZERO:
            near_zero += 1
        if traj.absorbed_at is not None:
            times.append(traj.absorbed_at)
        if traj.generations:
            rates.append(traj.log_odds_change / traj.generations)
    n = config.replicates
    unabsorbed = n - near_one - near_zero
    return FixationReport(
        replicates=n,
        fraction_near_one=near_one / n,
        fraction_near_zero=near_zero / n,
        fraction_unabsorbed=unabsorbed / n,
        predicted_state=predicted_state(gap),
        mean_growth_rate=math.fsum(rates) / len(rates) if rates else 0.0,
        growth_gap=gap,
        mean_absorption_time=math.fsum(times) / len(times) if times else None,
        endowment=params.endowment,
        attention=params.attention,
        config=config,
        joint=sampler.joint is not None,
    )
