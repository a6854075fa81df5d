"""Example oracles and the label/marginal transformations boosters feed to weak learners."""

import math
import zlib
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import (
    EQ_TOL,
    BaseDistribution,
    BoundedFn,
    DomainMismatch,
    ExampleDistribution,
    Measure,
    project_p1,
    sign_table,
)

MAX_SCAN = 1 << 20


class ZeroResidual(ArithmeticError):
    """The hypothesis already equals the target everywhere it has mass."""


def _key(part):
    if isinstance(part, str):
        return zlib.crc32(part.encode())
    return int(part)


def rng_for(seed, *stream):
    """Counter-based generator for one named stream, independent of other streams.

    ``rng_for(seed, "weak", 7)`` always yields the same numbers regardless
    of what was drawn from any other stream.
    """
    seq = np.random.SeedSequence([int(seed) & (2**64 - 1)] + [_key(p) for p in stream])
    return np.random.Generator(np.random.Philox(seq))


def derive_seed(seed, *stream):
    seq = np.random.SeedSequence([int(seed) & (2**64 - 1)] + [_key(p) for p in stream])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


class LabeledExample(NamedTuple):
    x: int
    b: int


def sample_arrays(A, m, rng):
    """Draw m examples from A as arrays (xs, bs)."""
    xs = A.base.sample(m, rng)
    p_plus = (1.0 + A.label.table[xs]) / 2.0
    bs = np.where(rng.random(m) < p_plus, 1, -1).astype(np.int64)
    return xs, bs


def draw_examples(A, m, seed):
    if m < 1:
        raise ValueError("need at least one example")
    xs, bs = sample_arrays(A, m, rng_for(seed, "examples"))
    return [LabeledExample(int(x), int(b)) for x, b in zip(xs, bs)]


class MembershipOracle:
    """Query access to a function on the cube, with a query counter.

    For a Boolean target a query returns f(x). For a real-valued target the
    oracle either returns the value itself or, with ``randomized=True``, a
    +-1 label with expectation f(x).
    """

    def __init__(self, fn, randomized=False, seed=0):
        self.fn = fn
        self.n = fn.n
        self.randomized = randomized and not fn.is_boolean
        self.queries = 0
        self._table = fn.table
        self._rng = rng_for(seed, "membership")

    def query(self, x):
        return float(self.query_many(np.array([x]))[0])

    def query_many(self, xs):
        xs = np.asarray(xs, dtype=np.int64)
        self.queries += xs.size
        vals = self._table[xs]
        if self.randomized:
            return np.where(self._rng.random(xs.size) < (1.0 + vals) / 2.0, 1.0, -1.0)
        return vals


def hoeffding_size(tolerance, confidence, width=1.0):
    """Samples so the mean of [a, a + width] variables is within tolerance w.p. >= 1 - confidence."""
    if tolerance <= 0 or not 0 < confidence < 1:
        raise ValueError("tolerance must be positive and confidence in (0, 1)")
    return math.ceil(width * width * math.log(2.0 / confidence) / (2.0 * tolerance * tolerance))


@dataclass(frozen=True)
class EstimationBudget:
    """Tolerance/confidence for one estimate of an error rate (a [0, 1] mean)."""

    tolerance: float
    confidence: float

    @property
    def sample_size(self):
        return hoeffding_size(self.tolerance, self.confidence)


def residual_half(A, h):
    """(D, (phi - h)/2)."""
    h.same_domain(A.label)
    return ExampleDistribution(A.base, BoundedFn((A.label.table - h.table) / 2.0))


def residual_clipped(A, h):
    """(D, P1(f - h)) for a Boolean target f."""
    if not A.is_boolean:
        raise ValueError("residual_clipped needs a Boolean target; point_split first")
    h.same_domain(A.label)
    return ExampleDistribution(A.base, BoundedFn(project_p1(A.label.table - h.table)))


def point_split(A):
    """Boolean-target version of A on a domain with one extra (high) bit.

    Point x becomes x (target +1, mass D(x)(1 + phi(x))/2) and x + 2**n
    (target -1, mass D(x)(1 - phi(x))/2).
    """
    phi = A.label.table
    w = A.base.weights
    masses = np.concatenate([w * (1.0 + phi) / 2.0, w * (1.0 - phi) / 2.0])
    target = np.concatenate([np.ones_like(phi), -np.ones_like(phi)])
    return ExampleDistribution(BaseDistribution.explicit(masses), BoundedFn(target))


def lift(fn):
    """Extend a function to the split domain, identical on both copies of each point."""
    return BoundedFn(np.concatenate([fn.table, fn.table]), descriptor=None)


def collapse_label(split, label_table):
    """Conditional label on the original domain induced by a label on the split domain.

    Both copies of x carry mass w+(x), w-(x); the marginal over x is D and
    E[b | x] = (w+ l(x,+) + w- l(x,-)) / (w+ + w-).
    """
    half = split.base.size // 2
    w = split.base.weights
    wp, wm = w[:half], w[half:]
    total = wp + wm
    num = wp * label_table[:half] + wm * label_table[half:]
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(total > 0, num / np.where(total > 0, total, 1.0), 0.0)
    return np.clip(out, -1.0, 1.0)


@dataclass(frozen=True)
class Reweighted:
    """D_h(x) = D(x) |P1(f(x) - h(x))| / N_h together with N_h."""

    dist: BaseDistribution
    n_h: float

    def smoothness(self, D):
        """max_x D_h(x) / D(x) over the support of D."""
        w = D.weights
        mask = w > 0
        return float(np.max(self.dist.weights[mask] / w[mask]))


def reweighted_dh(A, h):
    if not A.is_boolean:
        raise ValueError("reweighted_dh needs a Boolean target")
    h.same_domain(A.label)
    D = A.base
    mag = np.abs(project_p1(A.label.table - h.table))
    n_h = D.expect(mag)
    if n_h <= 0.0:
        raise ZeroResidual("h equals f on the support of D")
    dens = D.weights * mag
    dens = dens / dens.sum()

    def rejection(m, rng):
        out = np.empty(0, dtype=np.int64)
        while out.size < m:
            need = m - out.size
            batch = max(16, int(1.2 * need / max(n_h, 1e-6)) + 16)
            xs = D.sample(batch, rng)
            keep = rng.random(batch) < mag[xs]
            out = np.concatenate([out, xs[keep]])
        return out[:m]

    return Reweighted(BaseDistribution.explicit(dens, sampler=rejection), n_h)


def estimate_n_h(A, h, budget, seed):
    """Sampled estimate of N_h = E_D[|P1(f - h)|]."""
    rng = rng_for(seed, "n_h")
    xs = A.base.sample(budget.sample_size, rng)
    mag = np.abs(project_p1(A.label.table[xs] - h.table[xs]))
    return float(mag.mean())


def measure_product(A, M):
    """(D, f * M) for a Boolean target f and a measure M."""
    if not A.is_boolean:
        raise ValueError("measure_product needs a Boolean target")
    if not isinstance(M, Measure):
        M = Measure(M.table)
    M.same_domain(A.label)
    return ExampleDistribution(A.base, BoundedFn(A.label.table * M.table))


def estimate_error(A, g, budget=None, seed=0):
    """Error of g on A: E[(1 - b g(x)) / 2].

    Exact when ``budget`` is None, otherwise a Hoeffding-sized sample mean
    within ``budget.tolerance`` with probability >= 1 - ``budget.confidence``.
    """
    g.same_domain(A.label)
    if budget is None:
        return (1.0 - A.base.expect(A.label.table * g.table)) / 2.0
    xs, bs = sample_arrays(A, budget.sample_size, rng_for(seed, "estimate"))
    return float(np.mean((1.0 - bs * g.table[xs]) / 2.0))


def estimate_correlation(A, g, budget=None, seed=0):
    """Estimate of <phi, g>_D; within 2 * budget.tolerance (error scale is half)."""
    return 1.0 - 2.0 * estimate_error(A, g, budget, seed)


@dataclass(frozen=True)
class OptResult:
    delta: float
    index: int
    sign: int
    concept: BoundedFn
    class_size: int


def exact_opt(A, C, max_size=MAX_SCAN):
    """Delta(A, C) by full scan, with the minimizing concept."""
    if C.n != A.n:
        raise DomainMismatch("class and distribution differ in n")
    if C.size == 0:
        raise ValueError("empty concept class")
    if C.size > max_size:
        raise ValueError(f"class of size {C.size} exceeds the scan limit {max_size}")
    corr = C.correlations(A.base.weights * A.label.table)
    if C.negation_closed:
        idx = int(np.argmax(np.abs(corr)))
        sign = 1 if corr[idx] >= 0 else -1
        best = abs(corr[idx])
    else:
        idx = int(np.argmax(corr))
        sign = 1
        best = corr[idx]
    concept = C.concept(idx)
    if sign < 0:
        concept = -concept
    return OptResult((1.0 - float(best)) / 2.0, idx, sign, concept, C.size)


def misclassification(A, h_table):
    """Delta(A, sign(h)) computed exactly."""
    return (1.0 - A.base.expect(A.label.table * sign_table(h_table))) / 2.0


def same_up_to(a, b, tol=EQ_TOL):
    return bool(np.max(np.abs(np.asarray(a) - np.asarray(b))) <= tol)
