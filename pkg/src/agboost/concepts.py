"""Explicit concept classes and the Boolean objects used as targets.

A class exposes ``correlations(weighted)``: for ``weighted = D * phi`` it
returns ``<phi, c>_D`` for every member ``c`` in enumeration order.
"""

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from . import kernels
from .core import BoundedFn, Domain, parity_table, sign_table


class ConceptClass:
    n: int
    negation_closed: bool = False

    @property
    def size(self):
        raise NotImplementedError

    def correlations(self, weighted):
        raise NotImplementedError

    def concept(self, index):
        raise NotImplementedError

    def describe(self, index):
        return {"index": int(index)}


class ExplicitClass(ConceptClass):
    def __init__(self, tables, negation_closed=False):
        rows = np.asarray([np.asarray(getattr(t, "table", t), dtype=np.float64) for t in tables])
        if rows.ndim != 2 or rows.shape[0] == 0:
            raise ValueError("empty concept class")
        if not np.all(np.abs(rows) == 1.0):
            raise ValueError("concepts must be Boolean")
        self.n = int(rows.shape[1]).bit_length() - 1
        Domain(self.n)
        self.tables = rows.astype(np.int8)
        self.negation_closed = negation_closed

    @property
    def size(self):
        return self.tables.shape[0]

    def correlations(self, weighted):
        return self.tables @ np.asarray(weighted, dtype=np.float64)

    def concept(self, index):
        return BoundedFn(self.tables[index].astype(np.float64))


class AllParities(ConceptClass):
    """All 2**n parities chi_a; treated as closed under negation."""

    negation_closed = True

    def __init__(self, n):
        Domain(n)
        self.n = n

    @property
    def size(self):
        return 1 << self.n

    def correlations(self, weighted):
        return kernels.fwht(weighted)

    def concept(self, index):
        return BoundedFn.parity(self.n, index)

    def describe(self, index):
        return {"parity": hex(int(index))}


class Conjunctions(ConceptClass):
    """All conjunctions of at most ``width`` literals (the empty one is constant true)."""

    def __init__(self, n, width, negation_closed=False):
        Domain(n)
        self.n = n
        self.width = width
        self.negation_closed = negation_closed
        terms = []
        for k in range(width + 1):
            for vars_ in combinations(range(n), k):
                for signs in product((0, 1), repeat=k):
                    pos = sum(1 << v for v, s in zip(vars_, signs) if s)
                    neg = sum(1 << v for v, s in zip(vars_, signs) if not s)
                    terms.append((pos, neg))
        self.terms = terms

    @property
    def size(self):
        return len(self.terms)

    def _tables(self, start, stop):
        x = np.arange(1 << self.n, dtype=np.int64)
        rows = np.empty((stop - start, x.size))
        for i, (pos, neg) in enumerate(self.terms[start:stop]):
            sat = ((x & pos) == pos) & ((x & neg) == 0)
            rows[i] = np.where(sat, 1.0, -1.0)
        return rows

    def correlations(self, weighted, chunk=4096):
        out = np.empty(self.size)
        for start in range(0, self.size, chunk):
            stop = min(self.size, start + chunk)
            out[start:stop] = self._tables(start, stop) @ weighted
        return out

    def concept(self, index):
        return BoundedFn(self._tables(index, index + 1)[0])

    def describe(self, index):
        pos, neg = self.terms[index]
        return {"pos_mask": hex(pos), "neg_mask": hex(neg)}


class EnumeratedTrees(ExplicitClass):
    """Every function computed by a decision tree with at most ``leaves`` leaves.

    Members are deduplicated truth tables, in order of first appearance by
    leaf count; only practical for small n.
    """

    def __init__(self, n, leaves, limit=1 << 20):
        Domain(n)
        x = np.arange(1 << n)
        bit = [((x >> v) & 1).astype(bool) for v in range(n)]
        by_size = {1: [np.ones(1 << n, dtype=np.int8), -np.ones(1 << n, dtype=np.int8)]}
        seen = {t.tobytes() for t in by_size[1]}
        order = list(by_size[1])
        for k in range(2, leaves + 1):
            fresh = []
            for k1 in range(1, k):
                for left, right in product(by_size[k1], by_size[k - k1]):
                    for v in range(n):
                        t = np.where(bit[v], right, left).astype(np.int8)
                        key = t.tobytes()
                        if key not in seen:
                            seen.add(key)
                            fresh.append(t)
                            if len(seen) > limit:
                                raise ValueError("tree class exceeds the enumeration limit")
            by_size[k] = fresh
            order.extend(fresh)
        super().__init__(np.array(order, dtype=np.float64), negation_closed=True)
        self.leaves = leaves


@dataclass(frozen=True)
class DecisionTree:
    """``var`` is tested on x; bit 0 goes ``left``, bit 1 goes ``right``; leaves are +-1 ints."""

    var: int
    left: object
    right: object

    def table(self, n):
        x = np.arange(1 << n)
        return _tree_eval(self, x).astype(np.float64)

    @property
    def leaves(self):
        return _leaves(self)

    def to_json(self):
        return _tree_json(self)

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, (int, float)):
            return int(obj)
        return cls(obj["var"], cls.from_json(obj["left"]), cls.from_json(obj["right"]))


def _tree_eval(node, x):
    if not isinstance(node, DecisionTree):
        return np.full(x.shape, int(node))
    go_right = ((x >> node.var) & 1).astype(bool)
    return np.where(go_right, _tree_eval(node.right, x), _tree_eval(node.left, x))


def _leaves(node):
    if not isinstance(node, DecisionTree):
        return 1
    return _leaves(node.left) + _leaves(node.right)


def _tree_json(node):
    if not isinstance(node, DecisionTree):
        return int(node)
    return {"var": node.var, "left": _tree_json(node.left), "right": _tree_json(node.right)}


def random_tree(n, depth, rng, used=()):
    """Random tree of the given depth; no variable repeats on a path."""
    if depth == 0 or len(used) == n:
        return int(rng.choice([-1, 1]))
    free = [v for v in range(n) if v not in used]
    var = int(rng.choice(free))
    left = random_tree(n, depth - 1, rng, used + (var,))
    right = random_tree(n, depth - 1, rng, used + (var,))
    if left == right and not isinstance(left, DecisionTree):
        # keep the tree non-degenerate at the bottom level
        right = -left
    return DecisionTree(var, left, right)


@dataclass(frozen=True)
class DnfFormula:
    n: int
    terms: tuple  # (pos_mask, neg_mask) pairs

    def table(self):
        x = np.arange(1 << self.n, dtype=np.int64)
        sat = np.zeros(x.size, dtype=bool)
        for pos, neg in self.terms:
            sat |= ((x & pos) == pos) & ((x & neg) == 0)
        return np.where(sat, 1.0, -1.0)

    def to_json(self):
        return {"n": self.n,
                "terms": [{"pos_mask": hex(p), "neg_mask": hex(q)} for p, q in self.terms]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["n"], tuple((int(t["pos_mask"], 16), int(t["neg_mask"], 16))
                                   for t in obj["terms"]))


def random_dnf(n, terms, width, rng):
    out = []
    for _ in range(terms):
        vars_ = rng.choice(n, size=width, replace=False)
        signs = rng.integers(0, 2, size=width)
        pos = sum(1 << int(v) for v, s in zip(vars_, signs) if s)
        neg = sum(1 << int(v) for v, s in zip(vars_, signs) if not s)
        out.append((pos, neg))
    return DnfFormula(n, tuple(out))


@dataclass(frozen=True)
class ThresholdOfClass:
    """sign(sum_i f_i(x)), ties going to +1."""

    terms: tuple  # BoundedFn members

    @property
    def W(self):
        return len(self.terms)

    def table(self):
        return sign_table(np.sum([t.table for t in self.terms], axis=0))


def threshold_of_parities(n, masks):
    return ThresholdOfClass(tuple(BoundedFn.parity(n, a) for a in masks))


def fourier_l1(table):
    """sum_a |hat f(a)| under the uniform distribution."""
    return float(np.sum(np.abs(kernels.fwht(table))) / len(table))


__all__ = [
    "AllParities", "ConceptClass", "Conjunctions", "DecisionTree", "DnfFormula",
    "EnumeratedTrees", "ExplicitClass", "ThresholdOfClass", "fourier_l1",
    "parity_table", "random_dnf", "random_tree", "threshold_of_parities",
]
