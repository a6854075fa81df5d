"""Hard-core measures: the weak-learner adapter and an ABOOSTDI-based constructor.

A function is gamma-hard-core on a measure M when no member of the class
(or its negation) reaches advantage gamma under D_M(x) = D(x) M(x) / mu_D(M).
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .boosters import BOTH_FAILED, TARGET_REACHED, ZERO_RESIDUAL, BoostParams, aboostdi
from .core import BoundedFn, ExampleDistribution, Measure, project_p1, sign_table
from .oracles import exact_opt, measure_product, misclassification, rng_for
from .weak import ExhaustiveWeak

log = logging.getLogger(__name__)

SET_RETRIES = 8


def density(M, D):
    """mu_D(M) = E_D[M]."""
    if not isinstance(M, Measure):
        M = Measure(getattr(M, "table", M))
    return float(D.expect(M.table))


def induced(M, D):
    """Weights of D_M; raises on a zero-density measure."""
    mu = density(M, D)
    if mu <= 0.0:
        raise ValueError("measure has zero density")
    return D.weights * M.table / mu, mu


@dataclass(frozen=True)
class MeasureWeakResult:
    hypothesis: BoundedFn
    advantage: float  # advantage on (D_M, f), from the exact identity
    certified: bool


def weak_from_measure(weak, A, M, seed=0, gamma=None):
    """Run an agnostic weak learner on (D, f * M) and read its answer on D_M.

    E_{D_M}[g f] = E_D[g f M] / mu_D(M), so any g with advantage gamma' on
    (D, f M) has advantage gamma'/mu on D_M when both are measured with the
    correlation. Returns None when the learner fails.
    """
    if not A.is_boolean:
        raise ValueError("the target must be Boolean")
    if not isinstance(M, Measure):
        M = Measure(getattr(M, "table", M))
    weights, mu = induced(M, A.base)
    hyp = weak(measure_product(A, M), seed)
    if hyp is None:
        return None
    g = hyp.fn.table
    f = A.label.table
    direct = float(np.dot(weights, g * f))
    via_identity = A.base.expect(g * f * M.table) / mu
    adv = via_identity / 2.0
    floor = weak.gamma if gamma is None else gamma
    certified = abs(direct - via_identity) <= 1e-9 and adv >= floor - 1e-12
    return MeasureWeakResult(hyp.fn, adv, certified)


@dataclass
class HardnessInstance:
    """Boolean f under D, hard for class C at level lam."""

    A: ExampleDistribution
    C: object
    lam: float

    def __post_init__(self):
        if not self.A.is_boolean:
            raise ValueError("hardness instances need a Boolean target")
        if self.C.n != self.A.n:
            raise ValueError("class and target differ in n")
        if not 0.0 <= self.lam <= 0.5:
            raise ValueError("hardness level must lie in [0, 1/2]")

    @classmethod
    def from_opt(cls, A, C):
        return cls(A, C, exact_opt(A, C).delta)


@dataclass
class HardcoreCertificate:
    measure: Measure
    density: float
    gamma: float
    worst_concept: dict
    worst_advantage: float
    lam: float
    achieved_error: float
    eps: float
    rounds: int = 0
    set_hex: str = None
    set_fraction: float = None
    meta: dict = field(default_factory=dict)

    @property
    def density_ok(self):
        return self.density >= 2.0 * self.lam - self.eps - 1e-12

    @property
    def hardcore_ok(self):
        return self.worst_advantage < self.gamma

    def to_json(self):
        out = {"measure": self.measure.table.tolist(), "density": self.density,
               "gamma": self.gamma, "worst_concept": self.worst_concept,
               "worst_advantage": self.worst_advantage, "lambda": self.lam,
               "achieved_error": self.achieved_error, "eps": self.eps, "rounds": self.rounds,
               "meta": self.meta}
        if self.set_hex is not None:
            out["set_hex"] = self.set_hex
            out["set_fraction"] = self.set_fraction
        return out

    @classmethod
    def from_json(cls, obj):
        return cls(Measure(np.asarray(obj["measure"], dtype=np.float64)), obj["density"],
                   obj["gamma"], obj["worst_concept"], obj["worst_advantage"], obj["lambda"],
                   obj["achieved_error"], obj["eps"], obj.get("rounds", 0),
                   obj.get("set_hex"), obj.get("set_fraction"), obj.get("meta", {}))


@dataclass
class HardnessRefuted:
    approximator: BoundedFn
    error: float
    lam: float
    rounds: int

    def to_json(self):
        return {"refuted": True, "approximator_hex": self.approximator.to_hex(),
                "error": self.error, "lambda": self.lam, "rounds": self.rounds}


def worst_advantage(C, f, weights):
    """max over c in C and -C of the advantage of c on (weights, f)."""
    corr = C.correlations(weights * f)
    idx = int(np.argmax(np.abs(corr)))
    return abs(float(corr[idx])) / 2.0, idx, (1 if corr[idx] >= 0 else -1)


def verify_certificate(cert, inst):
    """Recompute density and the full-class advantage scan from the measure alone."""
    weights, mu = induced(cert.measure, inst.A.base)
    adv, idx, sign = worst_advantage(inst.C, inst.A.label.table, weights)
    return {"density": mu, "worst_advantage": adv,
            "density_ok": mu >= 2.0 * inst.lam - cert.eps - 1e-12,
            "hardcore_ok": adv < cert.gamma,
            "matches": abs(mu - cert.density) <= 1e-12 and abs(adv - cert.worst_advantage) <= 1e-12}


def construct_hardcore_measure(inst, gamma, eps, seed=0, max_rounds=None, check_lambda=True):
    """Hard-core measure for f from the ABOOSTDI loop with an exhaustive (gamma, gamma) learner.

    Returns a verified :class:`HardcoreCertificate` when the learner fails
    while sign(h) still errs on at least lam of D, or :class:`HardnessRefuted`
    when sign(h) beats lam.
    """
    A = inst.A
    if check_lambda and inst.C.size <= (1 << 20):
        opt = exact_opt(A, inst.C).delta
        if inst.lam > opt + 1e-12:
            log.warning("lambda %g exceeds the class optimum %g", inst.lam, opt)
    weak = ExhaustiveWeak(inst.C, gamma, gamma)
    p = BoostParams(alpha=gamma, gamma=gamma, eps=eps, max_weak=max_rounds)
    res = aboostdi(A, weak, p, seed=seed, error_floor=inst.lam, patience=None,
                   stop_at_eps=False)
    err = misclassification(A, res.h)
    if err < inst.lam or res.stop_reason == ZERO_RESIDUAL:
        return HardnessRefuted(BoundedFn(sign_table(res.h)), err, inst.lam, res.rounds)
    if res.stop_reason != BOTH_FAILED:
        raise RuntimeError(f"hard-core construction stopped with {res.stop_reason}")
    M = Measure(np.abs(project_p1(A.label.table - res.h)))
    weights, mu = induced(M, A.base)
    adv, idx, sign = worst_advantage(inst.C, A.label.table, weights)
    worst = dict(inst.C.describe(idx), sign=sign)
    cert = HardcoreCertificate(M, mu, gamma, worst, adv, inst.lam, err, eps, res.rounds,
                               meta={"class": type(inst.C).__name__,
                                     "stand_in": "explicit class replaces circuits"})
    check = verify_certificate(cert, inst)
    cert.meta["verified"] = bool(check["density_ok"] and check["hardcore_ok"] and check["matches"])
    return cert


@dataclass(frozen=True)
class RoundedSet:
    members: np.ndarray  # bool per point
    fraction: float
    worst_advantage: float = None
    seed: int = 0

    def to_hex(self):
        return BoundedFn(np.where(self.members, 1.0, -1.0)).to_hex()


def measure_to_set(M, D, seed=0, C=None, f=None):
    """Round M to a set: x joins S independently with probability M(x).

    With ``C`` and ``f`` given, also reports the worst class advantage on
    the uniform distribution over S.
    """
    if not D.is_uniform:
        raise ValueError("set rounding needs the uniform distribution")
    if not isinstance(M, Measure):
        M = Measure(getattr(M, "table", M))
    m = M.table
    for attempt in range(SET_RETRIES):
        rng = rng_for(seed, "round-set", attempt)
        members = rng.random(m.size) < m
        if members.any():
            break
    else:
        raise ValueError("rounded set stayed empty after retries")
    adv = None
    if C is not None and f is not None:
        w = members / members.sum()
        adv = worst_advantage(C, np.asarray(getattr(f, "table", f), dtype=np.float64), w)[0]
    return RoundedSet(members, float(members.mean()), adv, seed)
