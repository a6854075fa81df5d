"""Experiment specs, the run pipeline, and reports.

A run writes three files into its output directory: ``report.json``
(deterministic for a given spec), ``transcript.csv`` and ``result.json``.
Wall-clock time goes to ``timing.json`` so the report stays byte-stable.
"""

import hashlib
import json
import os
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .applications import learn_decision_tree_agnostic, pac_learn_threshold
from .boosters import (
    BoostParams,
    a2boost,
    aboost,
    aboostdi,
    bound_a2boost,
    bound_aboost,
    bound_aboostdi,
)
from .concepts import AllParities, Conjunctions, EnumeratedTrees, ExplicitClass, fourier_l1
from .core import exact_mode_max_n
from .hardcore import HardcoreCertificate, HardnessInstance, construct_hardcore_measure
from .instances import Instance, load_instance, planted_tree
from .oracles import EstimationBudget, exact_opt, misclassification
from .weak import ExhaustiveWeak, ParityWeakExact, ParityWeakKM, ThrottledWeak

ALGORITHMS = ("a2boost", "aboost", "aboostdi", "learn-dt", "learn-dnf", "th-pac", "hardcore")

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}

SPEC_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["instance", "algorithm"],
    "properties": {
        "instance": {"oneOf": [{"type": "string"}, {"type": "object"}]},
        "algorithm": {"enum": list(ALGORITHMS)},
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "alpha": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.5},
                "gamma": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.5},
                "eps": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.5},
                "delta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "W": {"type": "integer", "minimum": 1},
                "s": {"type": "integer", "minimum": 1},
                "tau": _POS,
                "theta": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "lambda": {"type": "number", "minimum": 0, "maximum": 0.5},
                "samples": {"type": "integer", "minimum": 1},
                "max_rounds": {"type": "integer", "minimum": 1},
                "learner": {"enum": ["exhaustive", "throttled", "parity-exact", "parity-km"]},
                "class": {"type": "string", "pattern": r"^(parities|constants|conjunctions:\d+|trees:\d+)$"},
                "engine": {"enum": ["a2boost", "aboost"]},
                "query": {"type": "boolean"},
            },
        },
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "mode": {"enum": ["exact", "sampled"]},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string"}},
        },
    },
}

DEFAULTS = {"alpha": 0.05, "gamma": 0.05, "eps": 0.05, "delta": 0.05}


class SpecError(ValueError):
    pass


class PipelineError(RuntimeError):
    """A failure inside a pipeline, tagged with the module it came from."""


def validate_spec(spec):
    try:
        jsonschema.validate(spec, SPEC_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SpecError(f"invalid spec: {exc.message}") from None
    params = spec.get("params", {})
    alpha = params.get("alpha", DEFAULTS["alpha"])
    gamma = params.get("gamma", DEFAULTS["gamma"])
    if gamma > alpha:
        raise SpecError(f"gamma ({gamma}) must not exceed alpha ({alpha})")
    return spec


def canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def spec_hash(spec):
    return hashlib.sha256(canonical(spec).encode()).hexdigest()


def resolve_instance(spec, base_dir="."):
    inst = spec["instance"]
    if isinstance(inst, str):
        path = Path(inst)
        if not path.is_absolute():
            path = Path(base_dir) / path
        return load_instance(path)
    return Instance.from_json(inst)


def make_class(text, n):
    if text == "parities":
        return AllParities(n)
    if text == "constants":
        return ExplicitClass([np.ones(1 << n), -np.ones(1 << n)], negation_closed=True)
    kind, _, arg = text.partition(":")
    if kind == "conjunctions":
        return Conjunctions(n, int(arg))
    if kind == "trees":
        return EnumeratedTrees(n, int(arg))
    raise SpecError(f"unknown class {text!r}")


def _bound(kind, value, measured, expr):
    return {"op": kind, "value": float(value), "measured": float(measured), "expr": expr}


def bound_passes(bound, tol=1e-12):
    if bound["op"] == "le":
        return bound["measured"] <= bound["value"] + tol
    if bound["op"] == "ge":
        return bound["measured"] >= bound["value"] - tol
    if bound["op"] == "lt":
        return bound["measured"] < bound["value"]
    raise ValueError(f"unknown bound op {bound['op']!r}")


def _booster_run(spec, inst, params, seed, exact):
    A = inst.dist
    C = make_class(params.get("class", "parities"), A.n)
    p = BoostParams(params["alpha"], params["gamma"], params["eps"], params["delta"], exact,
                    max_weak=params.get("max_rounds"))
    learner_kind = params.get("learner", "exhaustive")
    if learner_kind == "throttled":
        learner = ThrottledWeak(C, p.alpha, p.gamma)
    elif learner_kind == "exhaustive":
        size = None if exact else EstimationBudget(p.gamma / 4.0, p.confidence).sample_size
        learner = ExhaustiveWeak(C, p.alpha, p.gamma, size)
    else:
        raise SpecError(f"learner {learner_kind!r} does not fit {spec['algorithm']}")
    algo = spec["algorithm"]
    engine, bound_fn, expr = {
        "a2boost": (a2boost, bound_a2boost, "Delta + 2 alpha + eps"),
        "aboost": (aboost, bound_aboost, "Delta + alpha + eps"),
        "aboostdi": (aboostdi, bound_aboostdi, "Delta / (1 - 2 alpha) + eps"),
    }[algo]
    opt = exact_opt(A, C)
    res = engine(A, learner, p, seed=seed)
    err = misclassification(A, res.h)
    report = {
        "baseline": {"delta": opt.delta, "class": params.get("class", "parities"),
                     "class_size": opt.class_size, "kind": "exact"},
        "bound": _bound("le", bound_fn(opt.delta, p), err, expr),
        "rounds": {"weak": res.weak_updates, "balance": res.balance_updates,
                   "weak_calls": res.weak_calls, "weak_budget": p.weak_budget,
                   "balance_budget": p.balance_budget},
    }
    return res, err, report, res.to_json()


def _dt_run(spec, inst, params, seed, exact):
    A = inst.dist
    tree = planted_tree(inst)
    s = params.get("s", tree.leaves if tree is not None else None)
    if s is None:
        raise SpecError("learn-dt needs params.s or a planted tree")
    query = params.get("query", False)
    out = learn_decision_tree_agnostic(
        A, s, params["eps"], params["delta"], mode="query" if query else "dense", seed=seed,
        engine=params.get("engine", "a2boost"), theta=params.get("theta"),
        samples=params.get("samples"), audit_tree=None if tree is None else tree.table(A.n),
        max_weak=params.get("max_rounds"))
    if A.n <= 6 and s <= 4:
        base = {"delta": exact_opt(A, EnumeratedTrees(A.n, s)).delta, "kind": "exact",
                "class": f"trees:{s}"}
    elif tree is not None:
        # the planted tree's error bounds the class optimum from above
        base = {"delta": misclassification(A, tree.table(A.n)), "kind": "planted-upper-bound",
                "class": f"trees:{s}", "planted_l1": fourier_l1(tree.table(A.n))}
    else:
        base = None
    delta = base["delta"] if base else 0.5
    report = {
        "baseline": base,
        "bound": _bound("le", delta + params["eps"], out.error_exact, "Delta(trees) + eps"),
        "rounds": {"weak": out.result.weak_updates, "balance": out.result.balance_updates,
                   "weak_calls": out.result.weak_calls},
        "queries": out.queries,
        "premise_audit": {"rounds": len(out.audit),
                          "violations": sum(not r["ok"] for r in out.audit)},
    }
    return out.result, out.error_exact, report, out.to_json()


def _threshold_run(spec, inst, params, seed, exact):
    A = inst.dist
    if "W" not in params:
        raise SpecError(f"{spec['algorithm']} needs params.W")
    W, eps = params["W"], params["eps"]
    kind = params.get("learner", "parity-km" if params.get("query") else "parity-exact")
    if kind == "parity-exact":
        learner = ParityWeakExact()
    elif kind == "parity-km":
        learner = ParityWeakKM(params.get("theta", eps / (2.0 * W)), params["delta"],
                               params.get("samples"))
    elif kind == "throttled":
        g = eps / (4.0 * W)
        learner = ThrottledWeak(make_class(params.get("class", "parities"), A.n), g, g)
    else:
        raise SpecError(f"learner {kind!r} does not fit {spec['algorithm']}")
    out = pac_learn_threshold(A, learner, W, eps, params["delta"], seed,
                              max_rounds=params.get("max_rounds"))
    report = {
        "baseline": None,
        "bound": _bound("le", eps, out.error_exact, "eps"),
        "rounds": {"weak": out.result.weak_updates, "round_cap": out.meta["round_cap"]},
        "queries": out.queries,
    }
    return out.result, out.error_exact, report, out.to_json()


def _hardcore_run(spec, inst, params, seed, exact):
    A = inst.dist
    C = make_class(params.get("class", "parities"), A.n)
    opt = exact_opt(A, C)
    lam = params.get("lambda", opt.delta)
    hi = HardnessInstance(A, C, lam)
    outcome = construct_hardcore_measure(hi, params["gamma"], params["eps"], seed,
                                         params.get("max_rounds"))
    base = {"delta": opt.delta, "class": params.get("class", "parities"),
            "class_size": opt.class_size, "kind": "exact", "lambda": lam}
    if isinstance(outcome, HardcoreCertificate):
        report = {
            "baseline": base,
            "bound": _bound("ge", 2.0 * lam - params["eps"], outcome.density,
                            "density >= 2 lambda - eps"),
            "hardcore_bound": _bound("lt", params["gamma"], outcome.worst_advantage,
                                     "worst advantage < gamma"),
            "rounds": {"weak": outcome.rounds},
            "outcome": "certificate",
        }
        return None, outcome.achieved_error, report, outcome.to_json()
    report = {
        "baseline": base,
        "bound": _bound("lt", lam, outcome.error, "refuting error < lambda"),
        "rounds": {"weak": outcome.rounds},
        "outcome": "refuted",
    }
    return None, outcome.error, report, outcome.to_json()


PIPELINES = {
    "a2boost": _booster_run, "aboost": _booster_run, "aboostdi": _booster_run,
    "learn-dt": _dt_run, "learn-dnf": _threshold_run, "th-pac": _threshold_run,
    "hardcore": _hardcore_run,
}


def _origin(exc):
    """Module of the innermost frame that raised ``exc``."""
    tb = exc.__traceback__
    while tb.tb_next is not None:
        tb = tb.tb_next
    return tb.tb_frame.f_globals.get("__name__", "?")


def run_spec(spec, out_dir=None, base_dir=".", seed=None, mode=None):
    """Execute one spec; returns the report dict (also written to ``out_dir``)."""
    spec = json.loads(json.dumps(spec))
    if seed is not None:
        spec["seed"] = int(seed)
    if mode is not None:
        spec["mode"] = mode
    validate_spec(spec)
    inst = resolve_instance(spec, base_dir)
    cap = exact_mode_max_n()
    if "mode" not in spec:
        spec["mode"] = "exact" if inst.n <= cap else "sampled"
    elif spec["mode"] == "exact" and inst.n > cap:
        raise SpecError(f"exact mode needs n <= {cap} (set AGBOOST_EXACT_MAX_N to raise it)")
    spec.setdefault("seed", 0)
    digest = spec_hash(spec)
    params = dict(DEFAULTS, **spec.get("params", {}))
    exact = spec["mode"] == "exact"
    algo = spec["algorithm"]
    start = time.perf_counter()
    try:
        res, err, body, result_json = PIPELINES[algo](spec, inst, params, spec["seed"], exact)
    except (SpecError, PipelineError):
        raise
    except Exception as exc:
        raise PipelineError(f"{algo} [{_origin(exc)}]: {exc}") from exc
    wall = time.perf_counter() - start

    report = {
        "spec_hash": digest,
        "algorithm": algo,
        "seed": spec["seed"],
        "mode": spec["mode"],
        "n": inst.n,
        "instance_hash": inst.digest(),
        "final_error": float(err),
        "stop_reason": None if res is None else res.stop_reason,
        "transcript": "transcript.csv" if res is not None else None,
        "result": "result.json",
        "timing": "timing.json",
        "version": __version__,
    }
    report.update(body)
    report["pass"] = all(bound_passes(report[k]) for k in ("bound", "hardcore_bound") if k in report)
    result_json = dict(result_json, spec_hash=digest)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        (out / "result.json").write_text(json.dumps(result_json, sort_keys=True) + "\n")
        if res is not None:
            (out / "transcript.csv").write_text(res.transcript.to_csv())
        (out / "timing.json").write_text(json.dumps({"spec_hash": digest, "wall_clock_s": wall}) + "\n")
    return report


def load_report(path):
    """Read a report and recompute pass/fail from the stored numbers."""
    with open(path) as fh:
        report = json.load(fh)
    report["pass"] = all(bound_passes(report[k]) for k in ("bound", "hardcore_bound") if k in report)
    return report


def opt_baseline(inst, class_text, max_size=1 << 20):
    C = make_class(class_text, inst.n)
    start = time.perf_counter()
    res = exact_opt(inst.dist, C, max_size=max_size)
    return {"delta": res.delta, "argmin": dict(C.describe(res.index), sign=res.sign),
            "class_size": res.class_size, "runtime": time.perf_counter() - start}


def load_spec(path):
    with open(path) as fh:
        spec = json.load(fh)
    return spec, os.path.dirname(os.path.abspath(path))
