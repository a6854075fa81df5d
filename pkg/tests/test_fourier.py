import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agboost.core import BoundedFn, parity_table
from agboost.fourier import (
    QueryBudgetExhausted,
    fourier_coefficients,
    inverse,
    km_sample_size,
    km_search,
    naive_coefficient,
    wht,
)
from agboost.oracles import MembershipOracle


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 7), seed=st.integers(0, 2**32 - 1))
def test_coefficients_match_naive(n, seed):
    phi = np.random.default_rng(seed).uniform(-1, 1, 1 << n)
    coeffs = fourier_coefficients(phi)
    for a in range(1 << n):
        assert coeffs[a] == pytest.approx(naive_coefficient(phi, a), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 12), seed=st.integers(0, 2**32 - 1))
def test_double_transform_is_identity(n, seed):
    phi = np.random.default_rng(seed).uniform(-1, 1, 1 << n)
    assert np.allclose(wht(wht(phi)) / phi.size, phi, atol=1e-12)
    assert np.allclose(inverse(fourier_coefficients(phi)), phi, atol=1e-12)


def test_orthogonal_mix_coefficients():
    n, a, b = 6, 0b101100, 0b010011
    phi = -0.6 * parity_table(n, a) + 0.2 * parity_table(n, b)
    c = fourier_coefficients(phi)
    assert c[a] == pytest.approx(-0.6, abs=1e-15) and c[b] == pytest.approx(0.2, abs=1e-15)
    assert np.count_nonzero(np.abs(c) > 1e-12) == 2


def test_km_single_parity():
    f = BoundedFn.parity(10, 0b1100110101)
    res = km_search(MembershipOracle(f), 0.5, seed=1)
    assert res.masks() == {0b1100110101}
    assert res.indices[0].value == pytest.approx(1.0, abs=0.25)
    assert res.queries > 0


def test_km_noisy_parity_matches_dense():
    n, a = 12, 0b101001110001
    rng = np.random.default_rng(5)
    phi = 0.9 * parity_table(n, a) + rng.uniform(-0.1, 0.1, 1 << n)
    res = km_search(MembershipOracle(BoundedFn(phi)), 0.4, seed=2)
    dense = int(np.argmax(np.abs(fourier_coefficients(phi))))
    assert res.masks() == {a} == {dense}


def test_km_survivors_respect_parseval_cap():
    n, theta = 12, 0.25
    rng = np.random.default_rng(11)
    for seed in range(5):
        phi = np.where(rng.random(1 << n) < 0.5, -1.0, 1.0)
        res = km_search(MembershipOracle(BoundedFn(phi)), theta, seed=seed)
        assert max(res.survivors_per_level, default=0) <= 4 / theta**2


def test_km_sample_size_formula():
    theta, delta, n = 0.5, 0.05, 10
    per = delta / ((n + 1) * 8 / theta**2)
    expected = int(np.ceil(4 * np.log(2 / per) / (2 * (theta**2 / 4) ** 2)))
    assert km_sample_size(theta, delta, n) == expected


def test_km_query_budget():
    f = BoundedFn.parity(8, 3)
    with pytest.raises(QueryBudgetExhausted):
        km_search(MembershipOracle(f), 0.5, max_queries=100)
    with pytest.raises(ValueError):
        km_search(MembershipOracle(f), 0.0)


def test_km_is_deterministic_per_seed():
    phi = np.random.default_rng(3).uniform(-1, 1, 1 << 9)
    r1 = km_search(MembershipOracle(BoundedFn(phi)), 0.3, seed=4, samples=2000)
    r2 = km_search(MembershipOracle(BoundedFn(phi)), 0.3, seed=4, samples=2000)
    assert r1 == r2
