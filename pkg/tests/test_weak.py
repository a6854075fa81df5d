import numpy as np
import pytest

from agboost.concepts import AllParities, ExplicitClass
from agboost.core import BaseDistribution, BoundedFn, ExampleDistribution, parity_table
from agboost.fourier import fourier_coefficients
from agboost.oracles import exact_opt
from agboost.weak import (
    ExhaustiveWeak,
    ParityWeakExact,
    ParityWeakKM,
    ThrottledWeak,
    parity_weak_exact,
)

from conftest import random_boolean, random_explicit, uniform_pair


def test_exhaustive_fails_on_zero_label():
    assert ExhaustiveWeak(AllParities(4), 0.05, 0.05)(uniform_pair(np.zeros(16))) is None


def test_exhaustive_returns_member(rng):
    c = random_boolean(4, rng)
    C = ExplicitClass([random_boolean(4, rng), c])
    hyp = ExhaustiveWeak(C, 0.1, 0.1)(uniform_pair(c))
    assert np.array_equal(hyp.fn.table, c) and hyp.advantage == 0.5


def test_exhaustive_matches_transform_maximum(rng):
    phi = rng.uniform(-1, 1, 256)
    hyp = ExhaustiveWeak(AllParities(8), 0.01, 0.01)(uniform_pair(phi))
    assert hyp.advantage == pytest.approx(np.max(np.abs(fourier_coefficients(phi))) / 2, abs=1e-12)


def test_exhaustive_matches_exact_opt_on_explicit_distribution(rng):
    A = ExampleDistribution(random_explicit(6, rng), BoundedFn(rng.uniform(-1, 1, 64)))
    hyp = ExhaustiveWeak(AllParities(6), 0.01, 0.01)(A)
    assert hyp.advantage == pytest.approx(0.5 - exact_opt(A, AllParities(6)).delta, abs=1e-12)


def test_exhaustive_sampled_mode_is_close(rng):
    phi = 0.6 * parity_table(6, 0b100101)
    hyp = ExhaustiveWeak(AllParities(6), 0.1, 0.1, sample_size=20_000)(uniform_pair(phi), seed=3)
    assert hyp.fn.descriptor["parity"] == hex(0b100101)


def test_throttled_fails_below_alpha():
    phi = 0.1 * parity_table(6, 5)  # best advantage 0.05
    assert ThrottledWeak(AllParities(6), 0.1, 0.05)(uniform_pair(phi)) is None


@pytest.mark.parametrize("seed", range(5))
def test_throttled_lands_in_window(seed):
    phi = 0.2 * parity_table(8, 0b10110)  # advantage exactly alpha = 0.1
    A = uniform_pair(phi)
    hyp = ThrottledWeak(AllParities(8), 0.1, 0.05)(A, seed=seed)
    assert 0.05 <= hyp.advantage <= 0.1
    measured = np.mean(phi * hyp.fn.table) / 2
    assert measured == pytest.approx(hyp.advantage, abs=1e-12)


def test_throttle_off_is_exhaustive(rng):
    phi = rng.uniform(-1, 1, 64)
    A = uniform_pair(phi)
    a = ThrottledWeak(AllParities(6), 0.01, 0.01, throttle=False)(A)
    b = ExhaustiveWeak(AllParities(6), 0.01, 0.01)(A)
    assert np.array_equal(a.fn.table, b.fn.table) and a.advantage == pytest.approx(b.advantage)


def test_parameter_validation():
    with pytest.raises(ValueError):
        ExhaustiveWeak(AllParities(3), 0.05, 0.1)
    with pytest.raises(ValueError):
        ThrottledWeak(AllParities(3), 0.6, 0.1)


def test_parity_exact_examples():
    a, b = 0b110010, 0b001011
    hyp = parity_weak_exact(uniform_pair(parity_table(6, a)))
    assert hyp.fn.descriptor == {"parity": hex(a), "sign": 1} and hyp.advantage == 0.5
    hyp = parity_weak_exact(uniform_pair(-0.6 * parity_table(6, a) + 0.2 * parity_table(6, b)))
    assert hyp.fn.descriptor == {"parity": hex(a), "sign": -1}
    assert hyp.advantage == pytest.approx(0.3, abs=1e-15)
    assert ParityWeakExact(threshold=0.4)(uniform_pair(0.6 * parity_table(6, a))) is None


def test_parity_exact_needs_uniform(rng):
    A = ExampleDistribution(random_explicit(3, rng), BoundedFn(np.ones(8)))
    with pytest.raises(ValueError):
        parity_weak_exact(A)


def test_parity_exact_tree_advantage():
    # a tree with advantage tau has a parity with advantage >= tau / s
    from agboost.concepts import random_tree

    rng = np.random.default_rng(21)
    for _ in range(10):
        tree = random_tree(8, 3, rng)
        phi = np.where(rng.random(256) < 0.1, -1.0, 1.0) * tree.table(8)
        A = uniform_pair(phi)
        tau = 0.5 - np.mean(phi != tree.table(8))
        hyp = parity_weak_exact(A)
        assert hyp.advantage >= tau / tree.leaves - 1e-12


def test_parity_km_learner():
    a = 0b11001010101
    phi = 0.9 * parity_table(11, a)
    learner = ParityWeakKM(0.4)
    hyp = learner(uniform_pair(phi), seed=1)
    assert hyp.fn.descriptor == {"parity": hex(a), "sign": 1}
    assert learner.queries > 0
    assert ParityWeakKM(0.4)(uniform_pair(np.zeros(1 << 11)), seed=1) is None
