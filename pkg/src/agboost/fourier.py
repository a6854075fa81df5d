"""Walsh-Hadamard transform and the Goldreich-Levin / Kushilevitz-Mansour search.

Fourier indices are n-bit masks. The search fixes index bits from the low
end: a prefix of length k is the value of bits 0..k-1 of the index.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .oracles import hoeffding_size, rng_for

log = logging.getLogger(__name__)


def wht(table):
    """Unnormalized transform: out[a] = sum_x table[x] chi_a(x)."""
    return kernels.fwht(table)


def fourier_coefficients(table):
    """hat phi(a) = E_U[phi chi_a] for every index a."""
    t = np.asarray(table, dtype=np.float64)
    return kernels.fwht(t) / t.size


def inverse(coeffs):
    return kernels.fwht(coeffs)


def naive_coefficient(table, a):
    """Direct O(2**n) sum for a single coefficient; test oracle."""
    t = np.asarray(table, dtype=np.float64)
    total = 0.0
    for x, v in enumerate(t):
        total += v * (-1) ** bin(a & x).count("1")
    return total / t.size


@dataclass(frozen=True)
class FourierIndex:
    a: int
    value: float

    def to_json(self):
        return {"parity": hex(self.a), "value": self.value}


class QueryBudgetExhausted(RuntimeError):
    pass


@dataclass
class KMResult:
    indices: list
    survivors_per_level: list = field(default_factory=list)
    queries: int = 0
    samples_per_estimate: int = 0

    def masks(self):
        return {fi.a for fi in self.indices}


def km_sample_size(theta, delta, n):
    """Hoeffding size for one bucket estimate: tolerance theta**2/4, range [-1, 1].

    The confidence is split over every estimate the search can make: n + 1
    levels with at most 8/theta**2 children evaluated per level.
    """
    per = delta / ((n + 1) * 8.0 / theta**2)
    return hoeffding_size(theta**2 / 4.0, per, width=2.0)


def km_search(oracle, theta, delta=0.05, seed=0, samples=None, max_queries=None):
    """Indices a with large |hat phi(a)|, using only queries to ``oracle``.

    With probability >= 1 - delta the output contains every a with
    |hat phi(a)| >= theta and nothing with |hat phi(a)| < theta/2.
    ``samples`` overrides the Hoeffding sample size per level.
    """
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    n = oracle.n
    m = samples if samples is not None else km_sample_size(theta, delta, n)
    keep_at = theta**2 / 2.0
    cap = math.floor(4.0 / theta**2)
    start_queries = oracle.queries
    result = KMResult([], samples_per_estimate=m)

    def spend(count):
        if max_queries is not None and oracle.queries - start_queries + count > max_queries:
            raise QueryBudgetExhausted(f"search needs more than {max_queries} queries")

    alive = np.zeros(1, dtype=np.uint64)
    for k in range(1, n + 1):
        children = np.concatenate([alive, alive | np.uint64(1 << (k - 1))])
        rng = rng_for(seed, "km", k)
        low = (1 << k) - 1
        y1 = rng.integers(0, 1 << k, size=m, dtype=np.int64)
        y2 = rng.integers(0, 1 << k, size=m, dtype=np.int64)
        z = rng.integers(0, 1 << (n - k), size=m, dtype=np.int64) << k if k < n else 0
        spend(2 * m)
        v1 = oracle.query_many(y1 | z)
        v2 = oracle.query_many(y2 | z)
        # E[phi(y1,z) phi(y2,z) chi_p(y1 ^ y2)] = sum of hat phi**2 over the bucket
        est = kernels.bucket_sums((y1 ^ y2).astype(np.uint64) & np.uint64(low), v1 * v2, children)
        alive = children[est >= keep_at]
        result.survivors_per_level.append(int(alive.size))
        if alive.size > cap:
            log.warning("level %d kept %d buckets (> 4/theta^2 = %d); trimming", k, alive.size, cap)
            order = np.argsort(-est[est >= keep_at], kind="stable")[:cap]
            alive = np.sort(alive[order])
        if alive.size == 0:
            break

    if alive.size:
        tol = theta / 4.0
        per = delta / ((n + 1) * 8.0 / theta**2)
        mc = samples if samples is not None else hoeffding_size(tol, per, width=2.0)
        rng = rng_for(seed, "km", "coeff")
        xs = rng.integers(0, 1 << n, size=mc, dtype=np.int64)
        spend(mc)
        vals = oracle.query_many(xs)
        coeffs = kernels.bucket_sums(xs.astype(np.uint64), vals, alive)
        for a, c in zip(alive.tolist(), coeffs.tolist()):
            if abs(c) >= 3.0 * theta / 4.0:
                result.indices.append(FourierIndex(int(a), float(c)))
    result.queries = oracle.queries - start_queries
    return result
