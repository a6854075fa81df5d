"""Seeded instance families and the instance file format.

An instance file is JSON with keys ``n``, ``distribution`` (``"uniform"`` or
``{"explicit": [...]}``) and ``phi`` (``{"boolean_hex": ...}``,
``{"table": [...]}`` or ``{"generator": {"family", "params", "seed"}}``),
plus ``family``/``params``/``seed``/``meta`` describing where it came from.
"""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .concepts import DecisionTree, DnfFormula, random_dnf, random_tree, threshold_of_parities
from .core import BaseDistribution, BoundedFn, Domain, ExampleDistribution
from .oracles import rng_for

FAMILIES = ("noisy-parity", "noisy-tree", "dnf", "threshold-of-parities", "random-boolean",
            "explicit", "xor-majority")


@dataclass
class Instance:
    dist: ExampleDistribution
    family: str = "explicit"
    params: dict = field(default_factory=dict)
    seed: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.dist.n

    def to_json(self):
        base = self.dist.base
        label = self.dist.label
        if label.is_boolean:
            phi = {"boolean_hex": label.to_hex()}
        else:
            phi = {"table": label.table.tolist()}
        dist = "uniform" if base.is_uniform else {"explicit": base.weights.tolist()}
        return {"n": self.n, "distribution": dist, "phi": phi, "family": self.family,
                "params": self.params, "seed": self.seed, "meta": self.meta}

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)

    def digest(self):
        return hashlib.sha256(self.dumps().encode()).hexdigest()

    @classmethod
    def from_json(cls, obj):
        phi = obj["phi"]
        if "generator" in phi:
            g = phi["generator"]
            inst = gen_instance(g["family"], g.get("params", {}), g.get("seed", 0))
            if inst.n != obj["n"]:
                raise ValueError("generator produced a different n")
            return inst
        n = int(obj["n"])
        if "boolean_hex" in phi:
            label = BoundedFn.from_hex(n, phi["boolean_hex"])
        elif "table" in phi:
            label = BoundedFn(np.asarray(phi["table"], dtype=np.float64))
        else:
            raise ValueError("phi needs boolean_hex, table or generator")
        if label.n != n:
            raise ValueError("phi table size does not match n")
        spec = obj.get("distribution", "uniform")
        if spec == "uniform":
            base = BaseDistribution.uniform(n)
        elif isinstance(spec, dict) and "explicit" in spec:
            base = BaseDistribution.explicit(np.asarray(spec["explicit"], dtype=np.float64))
        else:
            raise ValueError(f"unknown distribution {spec!r}")
        return cls(ExampleDistribution(base, label), obj.get("family", "explicit"),
                   obj.get("params", {}), obj.get("seed", 0), obj.get("meta", {}))

    @classmethod
    def loads(cls, text):
        return cls.from_json(json.loads(text))


def _int(v):
    return int(v, 16) if isinstance(v, str) else int(v)


def _corrupt(table, eta, rng):
    """Flip the label on exactly round(eta * 2**n) points chosen by rng."""
    k = int(round(eta * table.size))
    flip = rng.permutation(table.size)[:k]
    out = table.copy()
    out[flip] = -out[flip]
    return out, np.sort(flip)


def _eta(params):
    eta = float(params.get("eta", 0.0))
    if not 0.0 <= eta <= 0.5:
        raise ValueError("eta must lie in [0, 1/2]")
    return eta


def gen_instance(family, params=None, seed=0):
    """Deterministic instance from a family name, parameters and seed."""
    params = dict(params or {})
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if "n" not in params:
        raise ValueError("params need n")
    n = int(params["n"])
    Domain(n)
    rng = rng_for(seed, "instance", family)
    uniform = BaseDistribution.uniform(n)
    meta = {}

    if family == "noisy-parity":
        mask = _int(params["mask"]) if "mask" in params else int(rng.integers(1, 1 << n))
        if not 0 <= mask < (1 << n):
            raise ValueError("mask out of range")
        eta = _eta(params)
        chi = BoundedFn.parity(n, mask).table
        noise = params.get("noise", "scaled")
        if noise == "scaled":
            label = BoundedFn((1.0 - 2.0 * eta) * chi) if eta else BoundedFn(chi)
        elif noise == "corrupted":
            table, flipped = _corrupt(chi, eta, rng)
            label = BoundedFn(table)
            meta["corrupted"] = int(flipped.size)
        else:
            raise ValueError("noise must be 'scaled' or 'corrupted'")
        meta["parity"] = hex(mask)
    elif family == "noisy-tree":
        depth = int(params.get("depth", 4))
        if depth < 0:
            raise ValueError("depth must be non-negative")
        tree = random_tree(n, depth, rng)
        clean = tree.table(n) if isinstance(tree, DecisionTree) else np.full(1 << n, float(tree))
        table, flipped = _corrupt(clean, _eta(params), rng)
        label = BoundedFn(table)
        meta.update({"tree": tree.to_json() if isinstance(tree, DecisionTree) else int(tree),
                     "leaves": tree.leaves if isinstance(tree, DecisionTree) else 1,
                     "corrupted": int(flipped.size)})
    elif family == "dnf":
        terms = int(params.get("terms", params.get("s", 4)))
        width = int(params.get("width", 3))
        if terms < 0 or not 0 <= width <= n:
            raise ValueError("bad dnf size")
        formula = random_dnf(n, terms, width, rng)
        label = BoundedFn(formula.table())
        meta["dnf"] = formula.to_json()
    elif family == "threshold-of-parities":
        W = int(params.get("W", 3))
        if W < 1 or W >= (1 << n):
            raise ValueError("bad W")
        if "masks" in params:
            masks = [_int(m) for m in params["masks"]]
        else:
            masks = [int(m) + 1 for m in rng.choice((1 << n) - 1, size=W, replace=False)]
        th = threshold_of_parities(n, masks)
        label = BoundedFn(th.table())
        meta["masks"] = [hex(m) for m in masks]
    elif family == "random-boolean":
        label = BoundedFn(np.where(rng.random(1 << n) < 0.5, -1.0, 1.0))
    elif family == "xor-majority":
        half = n // 2
        x = np.arange(1 << n)
        ones = [np.bitwise_count(x & ((1 << half) - 1)),
                np.bitwise_count(x >> half)]
        maj = [np.where(2 * o > w, -1.0, 1.0) if w else np.ones(x.size)
               for o, w in zip(ones, (half, n - half))]
        # ties in an even half go to +1
        label = BoundedFn(maj[0] * maj[1])
    else:  # explicit
        if "table" in params:
            label = BoundedFn(np.asarray(params["table"], dtype=np.float64))
        elif "boolean_hex" in params:
            label = BoundedFn.from_hex(n, params["boolean_hex"])
        else:
            raise ValueError("explicit instances need table or boolean_hex")
        if label.n != n:
            raise ValueError("table size does not match n")
    return Instance(ExampleDistribution(uniform, label), family, params, int(seed), meta)


def planted_tree(inst):
    tree = inst.meta.get("tree")
    if tree is None:
        return None
    return DecisionTree.from_json(tree)


def planted_dnf(inst):
    obj = inst.meta.get("dnf")
    return None if obj is None else DnfFormula.from_json(obj)


def load_instance(path):
    with open(path) as fh:
        return Instance.loads(fh.read())


def save_instance(inst, path):
    with open(path, "w") as fh:
        fh.write(inst.dumps())
        fh.write("\n")
