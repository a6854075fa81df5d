import json

import numpy as np
import pytest

from agboost.applications import (
    ContractViolation,
    learn_decision_tree_agnostic,
    pac_learn_dnf,
    pac_learn_threshold,
    weak_to_strong,
)
from agboost.boosters import BOTH_FAILED, TARGET_REACHED
from agboost.concepts import AllParities, DecisionTree, DnfFormula, EnumeratedTrees, parity_table
from agboost.core import BoundedFn
from agboost.instances import gen_instance, planted_dnf, planted_tree
from agboost.oracles import exact_opt, misclassification
from agboost.weak import ExhaustiveWeak, ParityWeakExact

from conftest import uniform_pair

EPS = 0.05


def parity_family(n):
    return lambda tau: ExhaustiveWeak(AllParities(n), tau, tau)


def test_weak_to_strong_realizable():
    A = uniform_pair(parity_table(9, 0b100110011))
    out = weak_to_strong(A, parity_family(9), EPS)
    assert out.error_exact <= EPS
    assert out.result.params.eps == pytest.approx(EPS / 3)


@pytest.mark.parametrize("engine", ["a2boost", "aboost"])
@pytest.mark.parametrize("seed", range(4))
def test_weak_to_strong_noisy_parity(engine, seed):
    inst = gen_instance("noisy-parity", {"n": 10, "eta": 0.1, "noise": "corrupted"}, seed=seed)
    opt = exact_opt(inst.dist, AllParities(10)).delta
    assert opt == pytest.approx(0.1, abs=1e-3)
    out = weak_to_strong(inst.dist, parity_family(10), EPS, engine=engine, seed=seed)
    assert out.error_exact <= opt + EPS


def test_weak_to_strong_failing_family_gives_constant():
    A = uniform_pair(parity_table(6, 0b110011))
    out = weak_to_strong(A, lambda tau: (lambda dist, seed=0: None), EPS)
    assert np.all(out.hypothesis.table == 1.0)


def test_weak_to_strong_rejects_unknown_engine():
    with pytest.raises(ValueError):
        weak_to_strong(uniform_pair(parity_table(4, 1)), parity_family(4), EPS, engine="nope")


def test_learner_output_serializes():
    A = uniform_pair(0.8 * parity_table(7, 0b1100101))
    out = weak_to_strong(A, parity_family(7), EPS)
    blob = json.loads(json.dumps(out.to_json()))
    assert set(blob["summary"]) == {"error_exact", "rounds", "queries"}
    assert blob["summary"]["error_exact"] == out.error_exact


def test_tree_realizable_dense_and_query():
    tree = DecisionTree(2, DecisionTree(5, 1, -1), DecisionTree(0, -1, 1))
    f = tree.table(8)
    A = uniform_pair(f)
    dense = learn_decision_tree_agnostic(A, 4, EPS, audit_tree=f)
    assert dense.error_exact <= EPS
    assert all(r["ok"] for r in dense.audit)
    query = learn_decision_tree_agnostic(A, 4, EPS, mode="query", theta=0.2, samples=4096, seed=1)
    assert query.error_exact <= EPS
    assert query.queries > 0


def test_tree_small_instance_against_enumerated_opt():
    inst = gen_instance("noisy-tree", {"n": 6, "depth": 2, "eta": 0.1}, seed=3)
    opt = exact_opt(inst.dist, EnumeratedTrees(6, 4)).delta
    assert opt <= 0.1 + 1e-12
    out = learn_decision_tree_agnostic(inst.dist, 4, EPS, audit_tree=planted_tree(inst).table(6))
    assert out.error_exact <= opt + EPS
    assert all(r["ok"] for r in out.audit)


def test_tree_learner_needs_uniform(rng):
    from agboost.core import BaseDistribution, ExampleDistribution
    from conftest import random_explicit

    A = ExampleDistribution(random_explicit(4, rng), BoundedFn(parity_table(4, 3)))
    with pytest.raises(ValueError):
        learn_decision_tree_agnostic(A, 2, EPS)
    with pytest.raises(ValueError):
        learn_decision_tree_agnostic(uniform_pair(parity_table(4, 3)), 2, EPS, mode="psychic")


def test_threshold_w1_one_round():
    A = uniform_pair(parity_table(10, 0b1011011))
    out = pac_learn_threshold(A, ParityWeakExact(), 1, EPS, audit_class=AllParities(10))
    assert out.rounds == 1
    assert out.error_exact == 0.0
    assert out.result.stop_reason == TARGET_REACHED
    assert all(r["ok"] for r in out.audit)


def test_threshold_majority_of_three_parities():
    inst = gen_instance("threshold-of-parities", {"n": 10, "W": 3}, seed=5)
    out = pac_learn_threshold(inst.dist, ParityWeakExact(), 3, EPS, audit_class=AllParities(10))
    assert out.error_exact <= EPS
    assert out.rounds <= (16 / 3) * (3 / EPS) ** 2
    assert all(r["ok"] for r in out.audit)
    assert out.meta["gamma"] == pytest.approx(EPS / 12)


def test_threshold_contract_violation_when_learner_fails():
    inst = gen_instance("threshold-of-parities", {"n": 8, "W": 3}, seed=2)
    with pytest.raises(ContractViolation):
        pac_learn_threshold(inst.dist, lambda dist, seed=0: None, 3, EPS)


def test_threshold_needs_boolean_target():
    with pytest.raises(ValueError):
        pac_learn_threshold(uniform_pair(np.full(16, 0.3)), ParityWeakExact(), 1, EPS)
    with pytest.raises(ValueError):
        pac_learn_threshold(uniform_pair(parity_table(4, 1)), ParityWeakExact(), 0, EPS)


def test_dnf_single_conjunction():
    f = DnfFormula(10, ((0b1000100001, 0b0000010000),))
    out = pac_learn_dnf(f, 4, EPS, audit=True)
    assert out.error_exact <= EPS
    assert all(r["ok"] for r in out.audit)


def test_dnf_constant_true_is_immediate():
    out = pac_learn_dnf(DnfFormula(6, ((0, 0),)), 1, EPS)
    assert out.rounds == 0 and out.error_exact == 0.0


def test_dnf_empty_is_constant_false():
    f = DnfFormula(6, ())
    assert np.all(f.table() == -1.0)
    out = pac_learn_dnf(f, 1, EPS)
    assert out.error_exact == 0.0


@pytest.mark.parametrize("mode", ["dense", "query"])
def test_dnf_random_four_terms(mode):
    inst = gen_instance("dnf", {"n": 12, "terms": 4, "width": 3}, seed=0)
    out = pac_learn_dnf(planted_dnf(inst), 16, EPS, mode=mode, theta=0.05, samples=32768)
    assert out.error_exact <= EPS


def test_dnf_rejects_tables():
    with pytest.raises(TypeError):
        pac_learn_dnf(parity_table(4, 1), 2, EPS)


def test_learners_deterministic_per_seed():
    inst = gen_instance("noisy-tree", {"n": 8, "depth": 3, "eta": 0.05}, seed=7)
    a = learn_decision_tree_agnostic(inst.dist, 8, EPS, mode="query", theta=0.1, samples=4096, seed=3)
    b = learn_decision_tree_agnostic(inst.dist, 8, EPS, mode="query", theta=0.1, samples=4096, seed=3)
    assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(b.to_json(), sort_keys=True)
