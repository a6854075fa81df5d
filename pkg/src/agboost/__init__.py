"""Agnostic boosting on the Boolean cube: boosters, weak learners, Fourier tools and hard-core measures."""

__version__ = "0.1.0"

from .kernels import BACKEND
from .core import (
    BaseDistribution,
    BoundedFn,
    Domain,
    DomainMismatch,
    Ensemble,
    ExampleDistribution,
    Measure,
    delta_gamma,
    inner_product_d,
    norm_d,
    potential_r,
    project_p1,
)
from .oracles import MembershipOracle, exact_opt, misclassification, rng_for
from .boosters import BoostParams, a2boost, aboost, aboostdi
from .weak import ExhaustiveWeak, ParityWeakExact, ParityWeakKM, ThrottledWeak
from .applications import (
    ContractViolation,
    learn_decision_tree_agnostic,
    pac_learn_dnf,
    pac_learn_threshold,
    weak_to_strong,
)
from .hardcore import (
    HardcoreCertificate,
    HardnessInstance,
    HardnessRefuted,
    construct_hardcore_measure,
    density,
    measure_to_set,
    weak_from_measure,
)
from .instances import Instance, gen_instance

__all__ = [
    "BACKEND", "BaseDistribution", "BoostParams", "BoundedFn", "ContractViolation", "Domain",
    "DomainMismatch", "Ensemble", "ExampleDistribution", "ExhaustiveWeak", "HardcoreCertificate",
    "HardnessInstance", "HardnessRefuted", "Instance", "Measure", "MembershipOracle",
    "ParityWeakExact", "ParityWeakKM", "ThrottledWeak", "a2boost", "aboost", "aboostdi",
    "construct_hardcore_measure", "delta_gamma", "density", "exact_opt", "gen_instance",
    "inner_product_d", "learn_decision_tree_agnostic", "measure_to_set", "misclassification",
    "norm_d", "pac_learn_dnf", "pac_learn_threshold", "potential_r", "project_p1", "rng_for",
    "weak_from_measure", "weak_to_strong",
]
