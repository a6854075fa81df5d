"""(alpha, gamma)-weak agnostic learners.

A learner is called as ``learner(dist, seed)`` with an ExampleDistribution
and returns a :class:`Hypothesis` or ``None`` (failure). ``advantage`` is
Gamma of the returned function on ``dist`` as the learner measured it.
"""

import logging
from typing import NamedTuple

import numpy as np

from .concepts import AllParities
from .core import BoundedFn, DomainMismatch
from .fourier import fourier_coefficients, km_search
from .oracles import MembershipOracle, rng_for, sample_arrays

log = logging.getLogger(__name__)


class Hypothesis(NamedTuple):
    fn: BoundedFn
    advantage: float


class WeakLearner:
    alpha: float
    gamma: float

    def __call__(self, dist, seed=0):
        raise NotImplementedError


def _check_params(alpha, gamma):
    if not 0 < gamma <= alpha <= 0.5:
        raise ValueError(f"need 0 < gamma <= alpha <= 1/2, got alpha={alpha}, gamma={gamma}")


def _class_correlations(C, dist, sample_size, seed):
    if C.n != dist.n:
        raise DomainMismatch("class and distribution differ in n")
    if sample_size is None:
        return C.correlations(dist.base.weights * dist.label.table)
    xs, bs = sample_arrays(dist, sample_size, rng_for(seed, "weak-sample"))
    hist = np.bincount(xs, weights=bs, minlength=1 << dist.n) / sample_size
    return C.correlations(hist)


def _best(C, corr):
    if C.negation_closed:
        idx = int(np.argmax(np.abs(corr)))
        sign = 1 if corr[idx] >= 0 else -1
        return idx, sign, abs(float(corr[idx]))
    idx = int(np.argmax(corr))
    return idx, 1, float(corr[idx])


def _member(C, idx, sign):
    c = C.concept(idx)
    if isinstance(C, AllParities):
        c = BoundedFn.parity(C.n, idx, sign, lazy=True)
    elif sign < 0:
        c = -c
    return c


class ExhaustiveWeak(WeakLearner):
    """Scan the whole class; return the best member if its advantage reaches gamma.

    Exact when ``sample_size`` is None, otherwise correlations come from a
    sample of that size.
    """

    def __init__(self, C, alpha, gamma, sample_size=None):
        _check_params(alpha, gamma)
        self.C = C
        self.alpha = alpha
        self.gamma = gamma
        self.sample_size = sample_size

    def __call__(self, dist, seed=0):
        corr = _class_correlations(self.C, dist, self.sample_size, seed)
        idx, sign, best = _best(self.C, corr)
        if best / 2.0 < self.gamma:
            return None
        return Hypothesis(_member(self.C, idx, sign), best / 2.0)


class ThrottledWeak(WeakLearner):
    """Test double with alpha > gamma.

    Fails unless Gamma(dist, C) >= alpha. Otherwise returns c* times a seeded
    +-1 mask: a prefix of a random point order is flipped so that the
    advantage lands in [gamma, 2 gamma]. The advantage is measured exactly
    before returning.
    """

    retries = 8

    def __init__(self, C, alpha, gamma, throttle=True):
        _check_params(alpha, gamma)
        self.C = C
        self.alpha = alpha
        self.gamma = gamma
        self.throttle = throttle

    def __call__(self, dist, seed=0):
        corr = _class_correlations(self.C, dist, None, seed)
        idx, sign, best = _best(self.C, corr)
        if best / 2.0 < self.alpha - 1e-12:
            return None
        c = _member(self.C, idx, sign)
        ctab = c.table
        contrib = dist.base.weights * dist.label.table * ctab  # corr = contrib.sum()
        adv0 = float(contrib.sum()) / 2.0
        if not self.throttle or adv0 <= 2.0 * self.gamma:
            return Hypothesis(c, adv0)
        target = 1.5 * self.gamma
        for attempt in range(self.retries):
            order = rng_for(seed, "throttle", attempt).permutation(ctab.size)
            # flipping point x moves the advantage by -contrib[x]
            path = adv0 - np.cumsum(contrib[order])
            hit = np.flatnonzero(path <= target)
            if hit.size == 0:
                continue
            k = int(hit[0]) + 1
            mask = np.ones(ctab.size)
            mask[order[:k]] = -1.0
            g = BoundedFn(ctab * mask)
            adv = float(dist.base.expect(dist.label.table * g.table)) / 2.0
            if self.gamma - 1e-12 <= adv <= 2.0 * self.gamma + 1e-12:
                return Hypothesis(g, adv)
        log.warning("throttled learner could not land in [%g, %g] after %d masks",
                    self.gamma, 2 * self.gamma, self.retries)
        return None


class ParityWeakExact(WeakLearner):
    """Best parity under the uniform distribution via the full Walsh-Hadamard transform."""

    def __init__(self, threshold=0.0, alpha=None):
        self.gamma = threshold
        self.alpha = alpha if alpha is not None else threshold
        self.last_coefficients = None

    def __call__(self, dist, seed=0):
        if not dist.base.is_uniform:
            raise ValueError("parity_weak_exact needs the uniform marginal")
        coeffs = fourier_coefficients(dist.label.table)
        self.last_coefficients = coeffs
        a = int(np.argmax(np.abs(coeffs)))
        adv = abs(float(coeffs[a])) / 2.0
        if adv <= 0.0 or adv < self.gamma:
            return None
        sign = 1 if coeffs[a] >= 0 else -1
        return Hypothesis(BoundedFn.parity(dist.n, a, sign, lazy=True), adv)


def parity_weak_exact(dist, threshold=0.0):
    return ParityWeakExact(threshold)(dist)


class ParityWeakKM(WeakLearner):
    """Parity learner that only queries the label function (membership queries).

    The heavy-coefficient list comes from :func:`km_search`; the returned
    parity is the sign-corrected one with largest estimated coefficient.
    With ``randomized`` the oracle answers +-1 labels instead of values.
    """

    def __init__(self, theta, delta=0.05, samples=None, threshold=0.0, randomized=False):
        self.theta = theta
        self.delta = delta
        self.samples = samples
        self.gamma = threshold
        self.alpha = max(threshold, theta / 2.0)
        self.randomized = randomized
        self.queries = 0
        self.last = None

    def __call__(self, dist, seed=0):
        if not dist.base.is_uniform:
            raise ValueError("parity_weak_km needs the uniform marginal")
        oracle = MembershipOracle(dist.label, randomized=self.randomized, seed=seed)
        res = km_search(oracle, self.theta, self.delta, seed=seed, samples=self.samples)
        self.queries += res.queries
        self.last = res
        if not res.indices:
            return None
        best = max(res.indices, key=lambda fi: (abs(fi.value), -fi.a))
        adv = abs(best.value) / 2.0
        if adv < self.gamma:
            return None
        sign = 1 if best.value >= 0 else -1
        return Hypothesis(BoundedFn.parity(dist.n, best.a, sign, lazy=True), adv)


def exhaustive_weak(C, alpha, gamma, sample_size=None):
    return ExhaustiveWeak(C, alpha, gamma, sample_size)


def throttled_weak(C, alpha, gamma, throttle=True):
    return ThrottledWeak(C, alpha, gamma, throttle)
