import json
from math import comb

import numpy as np
import pytest

from agboost.concepts import (
    AllParities,
    Conjunctions,
    DecisionTree,
    DnfFormula,
    EnumeratedTrees,
    ExplicitClass,
    fourier_l1,
    random_dnf,
    random_tree,
    threshold_of_parities,
)
from agboost.core import BaseDistribution, BoundedFn, parity_table

from conftest import random_boolean


def test_parity_correlations_are_the_transform(rng):
    phi = rng.uniform(-1, 1, 32)
    C = AllParities(5)
    corr = C.correlations(phi / 32)
    for a in (0, 7, 31):
        assert corr[a] == pytest.approx(np.mean(phi * parity_table(5, a)), abs=1e-12)


def test_conjunction_class_size_and_members():
    C = Conjunctions(4, 2)
    assert C.size == sum(comb(4, k) * 2**k for k in range(3))  # 1 + 8 + 24
    assert np.all(C.concept(0).table == 1.0)  # empty conjunction
    w = np.full(16, 1 / 16)
    corr = C.correlations(w * np.ones(16))
    assert corr[0] == 1.0


def test_enumerated_trees_small():
    # distinct functions of trees with at most 2 leaves on 2 variables: +-1, +-x0, +-x1
    C = EnumeratedTrees(2, 2)
    assert C.size == 6
    tables = {tuple(t) for t in C.tables}
    assert (1, -1, 1, -1) in tables and (1, 1, -1, -1) in tables


def test_enumerated_trees_contain_planted_tree():
    rng = np.random.default_rng(2)
    tree = random_tree(4, 2, rng)
    C = EnumeratedTrees(4, tree.leaves)
    assert any(np.array_equal(t, tree.table(4)) for t in C.tables)


def test_decision_tree_eval_and_json():
    t = DecisionTree(0, DecisionTree(1, 1, -1), -1)
    # bit 0 set -> right leaf -1; otherwise test bit 1
    assert list(t.table(2)) == [1, -1, -1, -1]
    assert t.leaves == 3
    back = DecisionTree.from_json(json.loads(json.dumps(t.to_json())))
    assert back == t


def test_tree_l1_at_most_leaves():
    rng = np.random.default_rng(8)
    for _ in range(20):
        tree = random_tree(8, 4, rng)
        assert fourier_l1(tree.table(8)) <= tree.leaves + 1e-12


def test_dnf_semantics():
    assert np.all(DnfFormula(3, ()).table() == -1)
    assert np.all(DnfFormula(3, ((0, 0),)).table() == 1)
    # x0 AND NOT x2
    f = DnfFormula(3, ((0b001, 0b100),)).table()
    for x in range(8):
        assert f[x] == (1 if (x & 1) and not (x & 4) else -1)
    d = random_dnf(8, 4, 3, np.random.default_rng(1))
    assert DnfFormula.from_json(json.loads(json.dumps(d.to_json()))) == d


def test_threshold_ties_go_positive():
    th = threshold_of_parities(3, [0b001, 0b010])
    x1 = parity_table(3, 1) + parity_table(3, 2)
    assert np.array_equal(th.table(), np.where(x1 >= 0, 1.0, -1.0))
    assert th.W == 2


def test_explicit_class_rejects_real_tables():
    with pytest.raises(ValueError):
        ExplicitClass([np.full(4, 0.5)])
    C = ExplicitClass([random_boolean(3, np.random.default_rng(0))])
    assert C.size == 1 and C.n == 3
