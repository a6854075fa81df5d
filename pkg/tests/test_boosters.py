import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agboost.boosters import (
    BOTH_FAILED,
    ROUND_CAP,
    TARGET_REACHED,
    ZERO_RESIDUAL,
    BoostParams,
    BoostTranscript,
    PotentialViolation,
    a2boost,
    aboost,
    aboostdi,
    bound_a2boost,
    bound_aboost,
    bound_aboostdi,
)
from agboost.concepts import AllParities, ExplicitClass
from agboost.core import BALANCE, WEAK, BaseDistribution, BoundedFn, ExampleDistribution, parity_table
from agboost.instances import gen_instance
from agboost.oracles import exact_opt, misclassification
from agboost.weak import ExhaustiveWeak, Hypothesis, ThrottledWeak

from conftest import random_boolean, random_explicit, uniform_pair

P = BoostParams(alpha=0.05, gamma=0.05, eps=0.05)


def never(dist, seed=0):
    return None


def test_params_budgets():
    assert P.weak_budget == 267
    assert P.balance_budget == 534
    assert P.weak_cap == 534 and P.balance_cap == 1068
    with pytest.raises(ValueError):
        BoostParams(alpha=0.05, gamma=0.1, eps=0.05)
    with pytest.raises(ValueError):
        BoostParams(alpha=0.1, gamma=0.05, eps=0.0)


@pytest.mark.parametrize("engine", [a2boost, aboost])
def test_failing_learner_gives_constant_plus_one(engine):
    # a balanced target gives -sign(0) no edge, so no balancing step fires either
    A = uniform_pair(parity_table(6, 0b101101))
    res = engine(A, never, P)
    assert res.stop_reason == BOTH_FAILED
    assert np.all(res.final.table == 1.0)
    assert res.weak_updates == 0 and res.balance_updates == 0


def test_failing_learner_still_balances_a_biased_target():
    f = -np.ones(64)
    f[:8] = 1.0
    res = a2boost(uniform_pair(f), never, P)
    assert res.weak_updates == 0 and res.balance_updates >= 1
    assert np.all(res.final.table == -1.0)


@pytest.mark.parametrize("engine", [a2boost, aboost])
def test_realizable_parity_reaches_zero_error(engine):
    A = uniform_pair(parity_table(10, 0b1001110101))
    res = engine(A, ExhaustiveWeak(AllParities(10), 0.05, 0.05), P)
    assert misclassification(A, res.h) == 0.0


def test_a2boost_noisy_parity_bound():
    A = uniform_pair(0.8 * parity_table(10, 0b0110100111))
    res = a2boost(A, ExhaustiveWeak(AllParities(10), 0.05, 0.05), P)
    opt = exact_opt(A, AllParities(10)).delta
    assert opt == pytest.approx(0.1, abs=1e-12)
    assert misclassification(A, res.h) <= bound_a2boost(opt, P) == pytest.approx(0.25)


def test_aboost_failing_learner_at_maximal_hardness():
    n = 6
    f = parity_table(n, 0b111111)
    others = ExplicitClass([parity_table(n, m) for m in range(1, 8)])
    A = uniform_pair(f)
    opt = exact_opt(A, others).delta
    assert opt >= 0.5 - P.alpha
    res = aboost(A, never, P)
    assert np.all(res.h == 0) and np.all(res.final.table == 1.0)
    assert A.base.expect(np.abs(f - res.h)) <= 2 * P.alpha + 2 * opt + 1e-12


def test_aboost_point_split_for_real_labels():
    A = uniform_pair(0.7 * parity_table(8, 0b10110011))
    res = aboost(A, ExhaustiveWeak(AllParities(8), 0.05, 0.05), P)
    assert res.meta["point_split"]
    assert res.h.shape == (256,)
    opt = exact_opt(A, AllParities(8)).delta
    assert misclassification(A, res.h) <= bound_aboost(opt, P)


def test_aboostdi_needs_boolean():
    with pytest.raises(ValueError):
        aboostdi(uniform_pair(np.full(8, 0.5)), never, P)


def test_aboostdi_noisy_parity_bound_and_smoothness():
    inst = gen_instance("noisy-parity", {"n": 10, "eta": 0.1, "noise": "corrupted"}, seed=4)
    A = inst.dist
    p = BoostParams(alpha=0.1, gamma=0.05, eps=0.05)
    res = aboostdi(A, ThrottledWeak(AllParities(10), 0.1, 0.05), p, seed=4)
    opt = exact_opt(A, AllParities(10)).delta
    err = misclassification(A, res.h)
    assert err <= bound_aboostdi(opt, p)
    for rec in res.meta["smoothness_audit"]:
        if 2 * rec["error"] - p.eps > 0:
            assert rec["smoothness"] <= 1.0 / (2 * rec["error"] - p.eps) + 1e-9


def test_aboostdi_realizable_reaches_target():
    A = uniform_pair(parity_table(8, 0b1011))
    res = aboostdi(A, ExhaustiveWeak(AllParities(8), 0.05, 0.05), P)
    assert res.stop_reason in (TARGET_REACHED, ZERO_RESIDUAL)
    assert misclassification(A, res.h) <= P.eps


def test_zero_residual_stop():
    res = a2boost(uniform_pair(np.zeros(16)), ExhaustiveWeak(AllParities(4), 0.05, 0.05), P)
    assert res.stop_reason == ZERO_RESIDUAL
    assert res.rounds == 0


def test_round_cap():
    A = uniform_pair(0.8 * parity_table(6, 5))
    p = BoostParams(alpha=0.05, gamma=0.05, eps=0.05, max_weak=2)
    res = a2boost(A, ExhaustiveWeak(AllParities(6), 0.05, 0.05), p)
    assert res.stop_reason == ROUND_CAP
    assert res.weak_updates == 2


def test_learner_without_edge_is_rejected():
    A = uniform_pair(parity_table(6, 5))

    def liar(dist, seed=0):
        return Hypothesis(BoundedFn(parity_table(6, 6)), 0.25)

    res = a2boost(A, liar, P)
    assert res.weak_updates == 0 and res.stop_reason == BOTH_FAILED


def _exact_runs(seed):
    rng = np.random.default_rng(seed)
    n = 6
    A = ExampleDistribution(random_explicit(n, rng), BoundedFn(rng.uniform(-1, 1, 1 << n)))
    return A


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_potential_drops_every_round(seed):
    A = _exact_runs(seed)
    learner = ExhaustiveWeak(AllParities(6), 0.02, 0.02)
    p = BoostParams(alpha=0.02, gamma=0.02, eps=0.05)
    for engine, pot0 in ((a2boost, None), (aboost, None)):
        res = engine(A, learner, p, seed=seed)
        rows = [r for r in res.transcript.rows if r.kind in (WEAK, BALANCE)]
        pots = [r.potential for r in rows]
        assert all(b <= a + 1e-12 for a, b in zip(pots, pots[1:]))
        prev = 1.0 if engine is aboost and A.is_boolean else None
        for r in rows:
            if prev is not None:
                assert r.potential <= prev - 3 * r.gamma_hat**2 + 1e-9
            prev = r.potential
        assert res.weak_updates <= p.weak_budget + 1
        assert res.balance_updates <= p.balance_budget + 1


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_stop_time_inequalities(seed):
    A = _exact_runs(seed)
    C = AllParities(6)
    p = BoostParams(alpha=0.03, gamma=0.03, eps=0.05)
    res = a2boost(A, ExhaustiveWeak(C, 0.03, 0.03), p)
    assert res.stop_reason == BOTH_FAILED
    residual = (A.label.table - res.h) / 2
    corr = C.correlations(A.base.weights * residual)
    assert np.max(np.abs(corr)) / 2 < p.gamma
    minus_sign = -np.where(res.h >= 0, 1.0, -1.0)
    assert A.base.expect(residual * minus_sign) <= p.eps + 1e-12
    opt = exact_opt(A, C).delta
    assert misclassification(A, res.h) <= bound_a2boost(opt, p)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_aboost_bound_random_boolean(seed):
    rng = np.random.default_rng(seed)
    A = ExampleDistribution(random_explicit(7, rng), BoundedFn(random_boolean(7, rng)))
    C = AllParities(7)
    p = BoostParams(alpha=0.05, gamma=0.05, eps=0.05)
    res = aboost(A, ExhaustiveWeak(C, 0.05, 0.05), p)
    assert misclassification(A, res.h) <= bound_aboost(exact_opt(A, C).delta, p)


def test_multiplicative_drop_is_checked():
    inst = gen_instance("noisy-parity", {"n": 8, "eta": 0.15, "noise": "corrupted"}, seed=1)
    p = BoostParams(alpha=0.05, gamma=0.05, eps=0.05)
    res = aboostdi(inst.dist, ExhaustiveWeak(AllParities(8), 0.05, 0.05), p)
    rows = [r for r in res.transcript.rows if r.kind == WEAK]
    prev = 1.0
    for r in rows:
        assert r.potential <= prev * (1 - r.gamma_hat**2 * r.N_h) + 1e-9 or r.N_h is None
        prev = r.potential


def test_transcript_csv_round_trip():
    A = uniform_pair(0.8 * parity_table(8, 0b1101))
    res = a2boost(A, ExhaustiveWeak(AllParities(8), 0.05, 0.05), P)
    text = res.transcript.to_csv()
    assert text.splitlines()[0] == "round,kind,gamma_hat,potential,N_h,error_estimate,smoothness"
    back = BoostTranscript.from_csv(text)
    assert back.rows == res.transcript.rows
    assert back.to_csv() == text


def test_runs_are_deterministic():
    inst = gen_instance("noisy-parity", {"n": 8, "eta": 0.1, "noise": "corrupted"}, seed=2)
    p = BoostParams(alpha=0.1, gamma=0.05, eps=0.05)
    learner = ThrottledWeak(AllParities(8), 0.1, 0.05)
    a = aboostdi(inst.dist, learner, p, seed=9)
    b = aboostdi(inst.dist, learner, p, seed=9)
    assert a.transcript.to_csv() == b.transcript.to_csv()
    assert a.to_json() == b.to_json()


def test_ensemble_replays_h():
    A = uniform_pair(0.6 * parity_table(7, 0b1010101))
    res = aboost(A, ExhaustiveWeak(AllParities(7), 0.05, 0.05), P)
    assert np.allclose(res.ensemble.evaluate(), res.h, atol=1e-12)


def test_sampled_mode_meets_bound():
    A = uniform_pair(0.8 * parity_table(8, 0b11010))
    p = BoostParams(alpha=0.05, gamma=0.05, eps=0.05, exact=False)
    res = a2boost(A, ExhaustiveWeak(AllParities(8), 0.05, 0.05, sample_size=8000), p, seed=1)
    assert misclassification(A, res.h) <= bound_a2boost(0.1, p)
