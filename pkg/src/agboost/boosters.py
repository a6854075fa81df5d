"""A2BOOST, ABOOST and ABOOSTDI.

All three grow h from h_0 = 0 by clipped updates h <- P1(h + w g). Before
each weak-learner call the loop performs balancing updates with
g = -sign(h) for as long as that hypothesis has error at most 1/2 - eps/2 on
the round distribution; the run stops when the weak learner fails right
after a failed balancing test, so both stop-time inequalities hold for the
same h_t.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    BALANCE,
    WEAK,
    BoundedFn,
    Ensemble,
    ExampleDistribution,
    Step,
    potential_r,
    sign_table,
)
from .oracles import (
    EstimationBudget,
    ZeroResidual,
    collapse_label,
    derive_seed,
    estimate_error,
    estimate_n_h,
    misclassification,
    point_split,
    reweighted_dh,
    sample_arrays,
    rng_for,
)

log = logging.getLogger(__name__)

BOTH_FAILED = "BothFailed"
ROUND_CAP = "RoundCapHit"
ZERO_RESIDUAL = "ZeroResidual"
TARGET_REACHED = "TargetReached"

TRANSCRIPT_COLUMNS = ("round", "kind", "gamma_hat", "potential", "N_h",
                      "error_estimate", "smoothness")

_DROP_TOL = 1e-12


class PotentialViolation(AssertionError):
    """An exact-mode update failed to decrease the potential as the analysis requires."""


class EstimationFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class BoostParams:
    alpha: float
    gamma: float
    eps: float
    delta: float = 0.05
    exact: bool = True
    slack: int = 2
    max_weak: int = None
    max_balance: int = None

    def __post_init__(self):
        if not 0 < self.gamma <= self.alpha <= 0.5:
            raise ValueError(f"need 0 < gamma <= alpha <= 1/2 (alpha={self.alpha}, gamma={self.gamma})")
        if not 0 < self.eps <= 0.5:
            raise ValueError("eps must lie in (0, 1/2]")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")

    @property
    def weak_budget(self):
        """Weak-learner invocations allowed by the potential argument: ceil(2/(3 gamma^2))."""
        return math.ceil(2.0 / (3.0 * self.gamma**2))

    @property
    def balance_budget(self):
        return math.ceil(4.0 / (3.0 * self.eps**2))

    @property
    def weak_cap(self):
        return self.max_weak if self.max_weak is not None else self.slack * self.weak_budget

    @property
    def balance_cap(self):
        return self.max_balance if self.max_balance is not None else self.slack * self.balance_budget

    @property
    def di_weak_cap(self):
        if self.max_weak is not None:
            return self.max_weak
        target = self.eps / 2.0
        return self.slack * math.ceil(math.log(1.0 / target) / (self.gamma**2 * target))

    @property
    def confidence(self):
        """Per-estimate failure probability: delta split over the round budget."""
        return self.delta / (self.weak_cap + self.balance_cap + 1)

    def to_json(self):
        return {k: getattr(self, k) for k in
                ("alpha", "gamma", "eps", "delta", "exact", "slack", "max_weak", "max_balance")}


@dataclass(frozen=True)
class TranscriptRow:
    round: int
    kind: str
    gamma_hat: float = None
    potential: float = None
    N_h: float = None
    error_estimate: float = None
    smoothness: float = None


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass
class BoostTranscript:
    rows: list = field(default_factory=list)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRANSCRIPT_COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(getattr(r, c)) for c in TRANSCRIPT_COLUMNS])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            vals = {}
            for c in TRANSCRIPT_COLUMNS:
                raw = rec[c]
                if c == "round":
                    vals[c] = int(raw)
                elif c == "kind":
                    vals[c] = raw
                else:
                    vals[c] = float(raw) if raw != "" else None
            rows.append(TranscriptRow(**vals))
        return cls(rows)

    def column(self, name, kinds=None):
        return [getattr(r, name) for r in self.rows if kinds is None or r.kind in kinds]


@dataclass
class BoostResult:
    algorithm: str
    ensemble: Ensemble
    h: np.ndarray
    transcript: BoostTranscript
    stop_reason: str
    weak_updates: int
    balance_updates: int
    weak_calls: int
    params: BoostParams
    meta: dict = field(default_factory=dict)

    @property
    def final(self):
        return BoundedFn(sign_table(self.h))

    @property
    def rounds(self):
        return self.weak_updates + self.balance_updates

    def to_json(self):
        return {
            "algorithm": self.algorithm,
            "stop_reason": self.stop_reason,
            "weak_updates": self.weak_updates,
            "balance_updates": self.balance_updates,
            "weak_calls": self.weak_calls,
            "params": self.params.to_json(),
            "final_hex": self.final.to_hex(),
            "ensemble": self.ensemble.to_json(),
        }


class _Run:
    """State shared by the three loops: h, the step list, counters and the transcript."""

    def __init__(self, name, A, p, seed, potential, n_h=None, on_round=None):
        self.name = name
        self.A = A
        self.p = p
        self.seed = seed
        self.potential = potential
        self.n_h_of = n_h
        self.on_round = on_round
        self.h = np.zeros(1 << A.n)
        self.steps = []
        self.transcript = BoostTranscript()
        self.weak_updates = 0
        self.balance_updates = 0
        self.weak_calls = 0
        self.last_potential = potential(self.h)
        self.meta = {}

    @property
    def round(self):
        return self.weak_updates + self.balance_updates

    def budget(self, tol):
        if self.p.exact:
            return None
        return EstimationBudget(tol, self.p.confidence)

    def error_of(self, dist, g, tol, *stream):
        if self.p.exact:
            return estimate_error(dist, g)
        return estimate_error(dist, g, self.budget(tol), derive_seed(self.seed, *stream))

    def current_error(self):
        """Delta(A, sign h): exact, or estimated within eps/4."""
        if self.p.exact:
            return misclassification(self.A, self.h)
        return self.error_of(self.A, BoundedFn(sign_table(self.h)), self.p.eps / 4.0,
                             "error", self.round)

    def balance(self, residual):
        """Balancing updates until -sign(h) loses its edge. Returns a stop reason or None."""
        tol = 0.0 if self.p.exact else self.p.eps / 8.0
        while True:
            dist = residual(self.h)
            g = BoundedFn(-sign_table(self.h))
            err = self.error_of(dist, g, tol, "balance", self.round)
            if err > 0.5 - self.p.eps / 2.0 + tol:
                return None
            if self.balance_updates >= self.p.balance_cap:
                return ROUND_CAP
            self.apply(BALANCE, max(0.5 - err, self.p.eps / 4.0), g)

    def weak_advantage(self, dist, g):
        tol = 0.0 if self.p.exact else self.p.gamma / 4.0
        err = self.error_of(dist, g, tol, "weak-check", self.round)
        accepted = err <= 0.5 - self.p.gamma + tol
        return 0.5 - err, accepted

    def apply(self, kind, weight, g, n_h=None, smoothness=None, adv=None):
        old = self.last_potential
        self.h = np.clip(self.h + weight * g.table, -1.0, 1.0)
        self.steps.append(Step(kind, float(weight), g))
        if kind == WEAK:
            self.weak_updates += 1
        else:
            self.balance_updates += 1
        new = self.potential(self.h)
        self.last_potential = new
        if self.p.exact:
            if new > old - 3.0 * weight * weight + _DROP_TOL:
                raise PotentialViolation(
                    f"{self.name} round {self.round}: potential {old!r} -> {new!r} "
                    f"with step {weight!r}")
            if adv is not None and n_h is not None and new > old * (1.0 - adv * adv * n_h) + _DROP_TOL:
                raise PotentialViolation(
                    f"{self.name} round {self.round}: multiplicative drop failed")
        if n_h is None and self.n_h_of is not None:
            n_h = self.n_h_of(self.h)
        self.transcript.rows.append(TranscriptRow(
            self.round, kind, float(weight if adv is None else adv), float(new),
            None if n_h is None else float(n_h), float(self.current_error()),
            None if smoothness is None else float(smoothness)))

    def call_weak(self, learner, dist):
        self.weak_calls += 1
        return learner(dist, derive_seed(self.seed, "weak", self.round))

    def finish(self, reason, n_out=None):
        n = self.A.n if n_out is None else n_out
        h = self.h if n_out is None else self.h[: 1 << n_out]
        self.transcript.rows.append(TranscriptRow(
            self.round, "stop", None, float(self.last_potential), None,
            float(self.current_error()), None))
        steps = self.steps
        if n_out is not None and n_out != self.A.n:
            steps = [Step(s.kind, s.weight, BoundedFn(s.base.table[: 1 << n_out])) for s in steps]
        self.meta["stop_reason"] = reason
        return BoostResult(self.name, Ensemble(n, steps), np.array(h), self.transcript, reason,
                           self.weak_updates, self.balance_updates, self.weak_calls,
                           self.p, self.meta)


def _zero(dist):
    return dist.base.expect(np.abs(dist.label.table)) == 0.0


def a2boost(A, weak, p, seed=0, on_round=None):
    """Boost an (alpha, gamma)-weak learner to error <= Delta(A, C) + 2 alpha + eps.

    Round distribution: (D, (phi - h)/2); potential ||phi - h||_D^2.
    """
    phi = A.label.table
    D = A.base

    def residual(h):
        return ExampleDistribution(D, BoundedFn((phi - h) / 2.0))

    run = _Run("a2boost", A, p, seed, lambda h: D.expect((phi - h) ** 2), on_round=on_round)
    while True:
        if _zero(residual(run.h)):
            return run.finish(ZERO_RESIDUAL)
        if run.balance(residual) == ROUND_CAP:
            return run.finish(ROUND_CAP)
        if run.weak_updates >= p.weak_cap:
            return run.finish(ROUND_CAP)
        dist = residual(run.h)
        if on_round is not None:
            on_round(run, dist)
        hyp = run.call_weak(weak, dist)
        if hyp is None:
            return run.finish(BOTH_FAILED)
        adv, ok = run.weak_advantage(dist, hyp.fn)
        if not ok:
            return run.finish(BOTH_FAILED)
        run.apply(WEAK, adv, hyp.fn)


def aboost(A, weak, p, seed=0, on_round=None):
    """Boost an (alpha, gamma)-weak learner to error <= Delta(A, C) + alpha + eps.

    Round distribution: (D, P1(f - h)); potential E_D[R(f - h)]. A real-valued
    phi is handled by point-splitting: the potential and N_h are computed on
    the split domain and the learner sees the induced label on the original
    domain, so every hypothesis stays identical on both copies of a point.
    """
    split = None if A.is_boolean else point_split(A)
    work = A if split is None else split
    f = work.label.table
    Dw = work.base

    def lifted(h):
        return h if split is None else np.concatenate([h, h])

    def clipped(h):
        return np.clip(f - lifted(h), -1.0, 1.0)

    def residual(h):
        r = clipped(h)
        if split is not None:
            r = collapse_label(split, r)
        return ExampleDistribution(A.base, BoundedFn(r))

    run = _Run("aboost", A, p, seed,
               lambda h: Dw.expect(potential_r(f - lifted(h))),
               n_h=lambda h: Dw.expect(np.abs(clipped(h))), on_round=on_round)
    run.meta["point_split"] = split is not None
    while True:
        if Dw.expect(np.abs(clipped(run.h))) == 0.0:
            return run.finish(ZERO_RESIDUAL)
        if run.balance(residual) == ROUND_CAP:
            return run.finish(ROUND_CAP)
        if run.weak_updates >= p.weak_cap:
            return run.finish(ROUND_CAP)
        dist = residual(run.h)
        if on_round is not None:
            on_round(run, dist)
        hyp = run.call_weak(weak, dist)
        if hyp is None:
            return run.finish(BOTH_FAILED)
        adv, ok = run.weak_advantage(dist, hyp.fn)
        if not ok:
            return run.finish(BOTH_FAILED)
        run.apply(WEAK, adv, hyp.fn)


def _sampled_n_h(A, h, p, seed):
    budget = EstimationBudget(p.eps / 4.0, p.confidence)
    hb = BoundedFn(h)
    est = estimate_n_h(A, hb, budget, seed)
    if est <= 0.0:
        # extreme residual: one retry with four times the sample
        big = EstimationBudget(p.eps / 8.0, p.confidence)
        est = estimate_n_h(A, hb, big, derive_seed(seed, "retry"))
        if est <= 0.0:
            raise EstimationFailure("N_h estimate is zero after retry")
    return est


def aboostdi(A, weak_di, p, seed=0, on_round=None, error_floor=None, patience="auto",
             stop_at_eps=True):
    """Boost a distribution-independent weak learner run on reweighted marginals.

    Round i runs ``weak_di`` on (D_{h_i}, f) with
    D_h(x) = D(x) |P1(f(x) - h(x))| / N_h and updates with weight
    advantage * N_h. Stops with TargetReached once the error of sign(h) is
    at most eps/2, once it has not improved by more than eps/4 for
    ``patience`` consecutive rounds (default ceil(gamma^-2)), or once it
    drops below ``error_floor``. ``stop_at_eps=False`` disables the eps/2 stop.
    """
    if not A.is_boolean:
        raise ValueError("aboostdi needs a Boolean target")
    f = A.label.table
    D = A.base
    if patience == "auto":
        patience = math.ceil(p.gamma ** -2)

    def residual(h):
        return ExampleDistribution(D, BoundedFn(np.clip(f - h, -1.0, 1.0)))

    run = _Run("aboostdi", A, p, seed, lambda h: D.expect(potential_r(f - h)),
               n_h=lambda h: D.expect(np.abs(np.clip(f - h, -1.0, 1.0))), on_round=on_round)
    audit = run.meta.setdefault("smoothness_audit", [])
    best_err = math.inf
    stale = 0
    while True:
        if _zero(residual(run.h)):
            return run.finish(ZERO_RESIDUAL)
        if run.balance(residual) == ROUND_CAP:
            return run.finish(ROUND_CAP)
        err = run.current_error()
        if error_floor is not None and err < error_floor:
            run.meta["target"] = "error_floor"
            return run.finish(TARGET_REACHED)
        if stop_at_eps and err <= p.eps / 2.0:
            run.meta["target"] = "eps/2"
            return run.finish(TARGET_REACHED)
        if err < best_err - p.eps / 4.0:
            best_err, stale = err, 0
        else:
            stale += 1
            if patience is not None and stale >= patience:
                run.meta["target"] = "stalled"
                return run.finish(TARGET_REACHED)
        if run.weak_updates >= p.di_weak_cap:
            return run.finish(ROUND_CAP)
        try:
            rw = reweighted_dh(A, BoundedFn(run.h))
        except ZeroResidual:
            return run.finish(ZERO_RESIDUAL)
        n_h = rw.n_h if p.exact else _sampled_n_h(A, run.h, p, derive_seed(seed, "n_h", run.round))
        smooth = rw.smoothness(D)
        audit.append({"round": run.round, "smoothness": smooth, "error": err, "N_h": rw.n_h})
        dist = ExampleDistribution(rw.dist, A.label)
        if on_round is not None:
            on_round(run, dist)
        hyp = run.call_weak(weak_di, dist)
        if hyp is None:
            return run.finish(BOTH_FAILED)
        if p.exact:
            adv, ok = run.weak_advantage(dist, hyp.fn)
        else:
            # D_h is only sampled (by rejection) in sampled mode
            tol = p.gamma / 4.0
            m = EstimationBudget(tol, p.confidence).sample_size
            xs, bs = sample_arrays(dist, m, rng_for(seed, "weak-check", run.round))
            err_g = float(np.mean((1.0 - bs * hyp.fn.table[xs]) / 2.0))
            adv, ok = 0.5 - err_g, err_g <= 0.5 - p.gamma + tol
        if not ok:
            return run.finish(BOTH_FAILED)
        run.apply(WEAK, adv * n_h, hyp.fn, n_h=rw.n_h, smoothness=smooth, adv=adv)


def bound_a2boost(opt, p):
    return opt + 2.0 * p.alpha + p.eps


def bound_aboost(opt, p):
    return opt + p.alpha + p.eps


def bound_aboostdi(opt, p):
    return opt / (1.0 - 2.0 * p.alpha) + p.eps
