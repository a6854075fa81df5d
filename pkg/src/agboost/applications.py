"""End-to-end learners built from the boosters and the weak learners."""

import math
from dataclasses import dataclass, field

import numpy as np

from .boosters import (
    BOTH_FAILED,
    ROUND_CAP,
    TARGET_REACHED,
    ZERO_RESIDUAL,
    BoostParams,
    _Run,
    a2boost,
    aboost,
)
from .concepts import AllParities, DnfFormula, fourier_l1
from .core import WEAK, BoundedFn, ExampleDistribution, potential_r
from .fourier import fourier_coefficients
from .oracles import misclassification
from .weak import ParityWeakExact, ParityWeakKM

ENGINES = {"a2boost": a2boost, "aboost": aboost}


class ContractViolation(RuntimeError):
    """The residual advantage fell below what a threshold target guarantees."""


@dataclass
class LearnOutput:
    """A learned Boolean hypothesis with the booster run that produced it."""

    hypothesis: BoundedFn
    result: object
    error_exact: float
    queries: int = 0
    audit: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def rounds(self):
        return self.result.rounds

    def summary(self):
        return {"error_exact": self.error_exact, "rounds": self.rounds, "queries": self.queries}

    def to_json(self):
        return {"summary": self.summary(), "result": self.result.to_json(), "meta": self.meta}


def weak_to_strong(A, weak_family, eps, delta=0.05, seed=0, engine="a2boost", exact=True,
                   on_round=None, max_weak=None):
    """Strong agnostic learner from a family tau -> (tau, gamma(tau))-weak learner.

    Boosts the tau = eps/3 member with accuracy eps/3, so the error is at
    most Delta(A, C) + eps.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    tau = eps / 3.0
    learner = weak_family(tau)
    # plain callables are taken as (tau, tau)-weak learners
    alpha = getattr(learner, "alpha", tau)
    p = BoostParams(alpha=alpha, gamma=getattr(learner, "gamma", alpha), eps=tau, delta=delta,
                    exact=exact, max_weak=max_weak)
    res = ENGINES[engine](A, learner, p, seed=seed, on_round=on_round)
    return LearnOutput(res.final, res, misclassification(A, res.h),
                       getattr(learner, "queries", 0))


def _tree_premise_audit(tree_table, tau, s, records):
    """Per-round check that a good tree forces a heavy residual coefficient."""
    l1 = fourier_l1(tree_table)

    def audit(run, dist):
        coeffs = fourier_coefficients(dist.label.table)
        top = float(np.max(np.abs(coeffs)))
        corr = float(dist.base.expect(dist.label.table * tree_table))
        records.append({
            "round": run.round,
            "tree_correlation": corr,
            "max_coefficient": top,
            "l1": l1,
            "premise": corr >= 2.0 * tau,
            "ok": top >= corr / l1 - 1e-12 and (corr < 2.0 * tau or top >= 2.0 * tau / s - 1e-12),
        })

    return audit


def learn_decision_tree_agnostic(A, s, eps, delta=0.05, mode="dense", seed=0, engine="a2boost",
                                 theta=None, samples=None, audit_tree=None, max_weak=None):
    """Agnostic learner for size-s decision trees under the uniform distribution.

    The weak learner is the best parity: any tree with advantage tau on the
    residual has a coefficient of size >= 2 tau/s, so the parity learner is
    a (tau, tau/(2s))-weak learner. ``mode="dense"`` reads the full spectrum,
    ``mode="query"`` uses the heavy-coefficient search (``theta`` defaults to
    2 tau/s; ``samples`` overrides the per-level sample size).
    ``audit_tree`` (a +-1 table) enables the per-round premise audit.
    """
    if not A.base.is_uniform:
        raise ValueError("tree learning needs the uniform marginal")
    if s < 1:
        raise ValueError("tree size must be positive")
    if mode not in ("dense", "query"):
        raise ValueError(f"unknown mode {mode!r}")
    made = []

    def family(tau):
        floor = tau / (2.0 * s)
        if mode == "dense":
            learner = ParityWeakExact(threshold=floor, alpha=tau)
        else:
            learner = ParityWeakKM(theta if theta is not None else min(1.0, 2.0 * tau / s),
                                   delta=delta, samples=samples, threshold=floor)
            learner.alpha = tau
        made.append(learner)
        return learner

    records = []
    tau = eps / 3.0
    hook = None
    if audit_tree is not None:
        table = np.asarray(getattr(audit_tree, "table", audit_tree), dtype=np.float64)
        hook = _tree_premise_audit(table, tau, s, records)
    out = weak_to_strong(A, family, eps, delta, seed, engine, True, hook, max_weak)
    out.queries = getattr(made[0], "queries", 0)
    out.audit = records
    out.meta.update({"mode": mode, "s": s, "tau": tau, "gamma": tau / (2.0 * s)})
    return out


def pac_learn_threshold(A, learner, W, eps, delta=0.05, seed=0, audit_class=None,
                        max_rounds=None, on_round=None):
    """PAC learner for targets in TH(W, C) given an agnostic learner for C.

    Each round runs ``learner`` on (D, P1(f - h)), expects correlation at
    least eps/(2W), and updates h <- P1(h + adv g) with no balancing steps.
    Stops once the exact error of sign(h) is at most eps. ``audit_class``
    enables the per-round discriminator audit under the exact D_h.
    """
    if not A.is_boolean:
        raise ValueError("threshold learning needs a Boolean target")
    if W < 1:
        raise ValueError("W must be a positive integer")
    gamma = eps / (4.0 * W)
    p = BoostParams(alpha=gamma, gamma=gamma, eps=min(0.5, eps / 2.0), delta=delta,
                    max_weak=max_rounds)
    cap = max_rounds if max_rounds is not None else p.slack * math.ceil(1.0 / (3.0 * gamma**2))
    f = A.label.table
    D = A.base

    def clipped(h):
        return np.clip(f - h, -1.0, 1.0)

    run = _Run("th-pac", A, p, seed, lambda h: D.expect(potential_r(f - h)),
               n_h=lambda h: D.expect(np.abs(clipped(h))))
    records = []
    while True:
        err = misclassification(A, run.h)
        if err <= eps:
            res = run.finish(TARGET_REACHED)
            break
        if run.weak_updates >= cap:
            res = run.finish(ROUND_CAP)
            break
        r = clipped(run.h)
        n_h = D.expect(np.abs(r))
        if n_h == 0.0:
            res = run.finish(ZERO_RESIDUAL)
            break
        dist = ExampleDistribution(D, BoundedFn(r))
        if audit_class is not None:
            dh = D.weights * np.abs(r) / n_h
            best = float(np.max(np.abs(audit_class.correlations(dh * f))))
            records.append({"round": run.round, "discriminator": best,
                            "ok": best >= 1.0 / W - 1e-12})
        if on_round is not None:
            on_round(run, dist)
        hyp = run.call_weak(learner, dist)
        adv = 0.0 if hyp is None else float(D.expect(r * hyp.fn.table)) / 2.0
        if 2.0 * adv < eps / (2.0 * W) - 1e-12:
            raise ContractViolation(
                f"round {run.round}: residual correlation {2 * adv!r} < eps/(2W) = "
                f"{eps / (2 * W)!r} at error {err!r}")
        run.apply(WEAK, adv, hyp.fn)
    out = LearnOutput(res.final, res, misclassification(A, res.h),
                      getattr(learner, "queries", 0), records)
    out.meta.update({"W": W, "gamma": gamma, "round_cap": cap})
    return out


def pac_learn_dnf(dnf, W, eps, delta=0.05, mode="dense", seed=0, theta=None, samples=None,
                  audit=False, max_rounds=None):
    """PAC learning of a DNF under the uniform distribution as a threshold of parities.

    ``W`` is the assumed threshold weight; dense mode uses the exact parity
    learner, query mode the heavy-coefficient search with threshold
    ``theta`` (default eps/(2W)).
    """
    from .core import BaseDistribution

    if not isinstance(dnf, DnfFormula):
        raise TypeError("expected a DnfFormula")
    A = ExampleDistribution(BaseDistribution.uniform(dnf.n), BoundedFn(dnf.table()))
    if mode == "dense":
        learner = ParityWeakExact()
    elif mode == "query":
        learner = ParityWeakKM(theta if theta is not None else eps / (2.0 * W),
                               delta=delta, samples=samples)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return pac_learn_threshold(A, learner, W, eps, delta, seed,
                               AllParities(dnf.n) if audit else None, max_rounds)


__all__ = [
    "BOTH_FAILED", "ContractViolation", "LearnOutput", "learn_decision_tree_agnostic",
    "pac_learn_dnf", "pac_learn_threshold", "weak_to_strong",
]
