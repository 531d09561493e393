import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from evorational import FitnessParams, InvariantViolation, JointLottery, Lottery, ParseError
from evorational.lottery import (
    fitness,
    joint_from_json,
    joint_to_dict,
    log_fitness_mean,
    lottery_from_csv,
    lottery_from_json,
    lottery_to_csv,
    lottery_to_json,
    mean,
    payoff_geometric_mean,
    taylor_log_fitness_mean,
    variance,
)

import oracles

KT_B = [(2500, 0.33), (2400, 0.66), (0, 0.01)]


@st.composite
def lotteries(draw, min_payoff=0.0, max_payoff=100.0, max_size=5):
    n = draw(st.integers(1, max_size))
    payoffs = draw(st.lists(st.floats(min_payoff, max_payoff), min_size=n, max_size=n))
    weights = draw(st.lists(st.integers(1, 100), min_size=n, max_size=n))
    total = sum(weights)
    probs = [k / total for k in weights[:-1]]
    probs.append(1.0 - math.fsum(probs))
    return Lottery(tuple(payoffs), tuple(probs))


params_st = st.builds(
    FitnessParams,
    st.floats(0.01, 1e4),
    st.floats(1e-6, 1 - 1e-6),
)


class TestConstruction:
    def test_rejects_negative_payoff(self):
        with pytest.raises(InvariantViolation) as exc:
            Lottery.from_pairs([(-1, 1.0)])
        assert exc.value.field == "payoff"

    @pytest.mark.parametrize("probs", [(0.5, 0.49), (0.5, 0.5 + 1e-11), (1.2, -0.2)])
    def test_rejects_bad_probabilities(self, probs):
        with pytest.raises(InvariantViolation):
            Lottery((1.0, 2.0), probs)

    def test_accepts_sum_within_tolerance(self):
        Lottery((1.0, 2.0), (0.5, 0.5 + 5e-13))

    def test_strips_zero_probability(self):
        lot = Lottery.from_pairs([(0, 0.0), (3, 1.0)])
        assert lot.outcomes == [(3.0, 1.0)]

    def test_rejects_empty(self):
        with pytest.raises(InvariantViolation):
            Lottery((), ())

    def test_duplicates_kept(self):
        lot = Lottery.from_pairs([(1, 0.5), (1, 0.5)])
        assert len(lot) == 2
        assert mean(lot) == 1.0

    def test_params_open_interval(self):
        for w in (0.0, 1.0, -0.1):
            with pytest.raises(InvariantViolation):
                FitnessParams(1.0, w)
        with pytest.raises(InvariantViolation):
            FitnessParams(0.0, 0.5)

    def test_immutable(self):
        lot = Lottery.sure(1)
        with pytest.raises(AttributeError):
            lot.payoffs = (2.0,)
        with pytest.raises(ValueError):
            lot.payoff_array[0] = 3.0


class TestMoments:
    def test_mean_examples(self):
        assert mean(Lottery.sure(2400)) == 2400
        assert mean(Lottery.from_pairs(KT_B)) == pytest.approx(2409, abs=1e-9)
        assert mean(Lottery.from_pairs([(0, 0.5), (10, 0.5)])) == 5

    def test_variance_examples(self):
        assert variance(Lottery.sure(7.5)) == 0
        assert variance(Lottery.from_pairs([(0, 0.5), (10, 0.5)])) == 25
        assert variance(Lottery.from_pairs(KT_B)) == pytest.approx(
            float(oracles.exact_variance(KT_B)), rel=1e-12
        )
        assert float(oracles.exact_variance(KT_B)) == pytest.approx(60819, rel=1e-12)

    @given(lotteries())
    def test_against_exact_rationals(self, lot):
        pairs = lot.outcomes
        assert mean(lot) == pytest.approx(float(oracles.exact_mean(pairs)), rel=1e-12, abs=1e-12)
        assert variance(lot) == pytest.approx(
            float(oracles.exact_variance(pairs)), rel=1e-9, abs=1e-9
        )


class TestFitness:
    def test_examples(self):
        assert fitness(0, FitnessParams(1, 0.5)) == 0.5
        assert fitness(2400, FitnessParams(14000, 0.843)) == pytest.approx(4221.2, rel=1e-12)
        assert fitness(5.0, FitnessParams(1, 1e-12)) == pytest.approx(1.0, abs=1e-10)

    @given(st.floats(0, 1e9), params_st)
    def test_strictly_positive(self, payoff, params):
        assert fitness(payoff, params) > 0

    def test_log_fitness_mean_examples(self):
        p = FitnessParams(14000, 0.843)
        assert log_fitness_mean(Lottery.sure(2400), p) == pytest.approx(math.log(4221.2), rel=1e-12)
        coin = Lottery.from_pairs([(4, 0.5), (0.5, 0.5)])
        got = log_fitness_mean(coin, FitnessParams(1, 0.99))
        assert got == pytest.approx(0.5 * math.log(3.97) + 0.5 * math.log(0.505), rel=1e-12)
        assert got == pytest.approx(0.34778462249616091, rel=1e-12)

    @given(lotteries(), params_st)
    def test_log_fitness_mean_against_mpmath(self, lot, params):
        ref = oracles.mp_log_fitness_mean(lot.outcomes, params.endowment, params.attention)
        got = log_fitness_mean(lot, params)
        assert math.isfinite(got)
        assert got == pytest.approx(float(ref), rel=1e-10, abs=1e-12)

    @given(lotteries(), params_st, st.sampled_from([0.1, 10.0, 1000.0, 1e-3]))
    def test_joint_scaling_shifts_by_log_lambda(self, lot, params, lam):
        scaled = FitnessParams(lam * params.endowment, params.attention)
        diff = log_fitness_mean(lot.scaled(lam), scaled) - log_fitness_mean(lot, params)
        assert diff == pytest.approx(math.log(lam), abs=1e-12)


class TestTaylor:
    def test_degenerate_is_exact(self):
        for x in (0.0, 1.0, 2400.0):
            for p in (FitnessParams(1, 0.3), FitnessParams(14000, 0.9)):
                lot = Lottery.sure(x)
                assert taylor_log_fitness_mean(lot, p) == log_fitness_mean(lot, p)

    def test_formula_example(self):
        lot = Lottery.from_pairs([(1.1, 0.5), (0.9, 0.5)])
        assert taylor_log_fitness_mean(lot, FitnessParams(1, 0.5)) == pytest.approx(
            -0.00125, abs=1e-15
        )

    def test_unit_endowment_matches_textbook_form(self):
        lot = Lottery.from_pairs([(3, 0.2), (1, 0.5), (0, 0.3)])
        w = 0.4
        m, v = mean(lot), variance(lot)
        expected = math.log((1 - w) + w * m) - w**2 * v / (2 * ((1 - w) + w * m) ** 2)
        assert taylor_log_fitness_mean(lot, FitnessParams(1, w)) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("eps", [0.2, 0.1, 0.05, 0.025])
    def test_error_shrinks_sixteenfold(self, eps):
        p = FitnessParams(1, 0.5)

        def err(e):
            lot = Lottery.from_pairs([(1 + e, 0.5), (1 - e, 0.5)])
            return abs(taylor_log_fitness_mean(lot, p) - float(
                oracles.mp_log_fitness_mean(lot.outcomes, 1, 0.5)))

        ratio = err(eps) / err(eps / 2)
        assert 16 / 1.5 <= ratio <= 16 * 1.5


class TestGeometricMean:
    def test_examples(self):
        assert payoff_geometric_mean(Lottery.sure(7)) == pytest.approx(7, rel=1e-15)
        assert payoff_geometric_mean(Lottery.from_pairs([(4, 0.5), (1, 0.5)])) == pytest.approx(2, rel=1e-15)
        assert payoff_geometric_mean(Lottery.from_pairs(KT_B)) == 0.0


class TestJoint:
    def test_marginals_match_table(self):
        joint = JointLottery.from_triples([(1, 5, 0.2), (3, 5, 0.3), (3, 0, 0.5)])
        la, lb = joint.marginals()
        probs = np.array(joint.probs)
        assert mean(la) == pytest.approx(float(np.dot(joint.payoffs_a, probs)))
        assert mean(lb) == pytest.approx(float(np.dot(joint.payoffs_b, probs)))
        assert variance(lb) == pytest.approx(float(np.dot((np.array(joint.payoffs_b) - 2.5) ** 2, probs)))

    def test_independent_product(self):
        a = Lottery.from_pairs([(1, 0.25), (2, 0.75)])
        b = Lottery.from_pairs([(0, 0.5), (9, 0.5)])
        la, lb = JointLottery.independent(a, b).marginals()
        assert mean(la) == pytest.approx(mean(a))
        assert variance(lb) == pytest.approx(variance(b))

    def test_rejects_bad_sum(self):
        with pytest.raises(InvariantViolation):
            JointLottery.from_triples([(1, 1, 0.5), (2, 2, 0.4)])


class TestSerialization:
    @given(lotteries(max_payoff=1e9))
    @settings(max_examples=50)
    def test_json_round_trip(self, lot):
        assert lottery_from_json(lottery_to_json(lot)) == lot

    @given(lotteries(max_payoff=1e9))
    @settings(max_examples=50)
    def test_csv_round_trip(self, lot):
        assert lottery_from_csv(lottery_to_csv(lot)) == lot

    def test_csv_without_header(self):
        lot = lottery_from_csv("2500,0.33\n2400,0.66\n0,0.01\n")
        assert lot == Lottery.from_pairs(KT_B)

    def test_json_schema(self):
        obj = json.loads(lottery_to_json(Lottery.sure(3)))
        assert obj == {"outcomes": [{"payoff": 3.0, "prob": 1.0}]}

    @pytest.mark.parametrize("text", ["{", '{"outcomes": [{"payoff": 1}]}', '{"x": 1}'])
    def test_malformed_json(self, text):
        with pytest.raises(ParseError):
            lottery_from_json(text)

    def test_invariants_apply_on_parse(self):
        with pytest.raises(InvariantViolation):
            lottery_from_json('{"outcomes": [{"payoff": 1, "prob": 0.99}]}')
        with pytest.raises(ParseError):
            lottery_from_csv("1,abc\n")

    def test_joint_round_trip(self):
        joint = JointLottery.from_triples([(1, 2, 0.5), (0, 4, 0.5)])
        assert joint_from_json(json.dumps(joint_to_dict(joint))) == joint
