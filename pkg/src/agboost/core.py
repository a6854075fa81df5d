"""Bounded functions on {0,1}^n and the D-weighted inner-product geometry.

Points of the n-bit cube are the integers ``0 .. 2**n - 1``. Every function
is held as a dense table of float64 values indexed by point; Boolean
functions use the values -1.0 and +1.0 (``+1`` is "true").
"""

import os
from dataclasses import dataclass, field

import numpy as np

from . import kernels

RANGE_TOL = 1e-9
EQ_TOL = 1e-9
HARD_MAX_N = 24
#: exact (dense) evaluation is the default up to this bit-width
EXACT_MODE_MAX_N = 16

WEAK = "weak"
BALANCE = "balance"


def max_dense_n():
    """Bit-width cap for dense tables; override with ``AGBOOST_MAX_N``."""
    return int(os.environ.get("AGBOOST_MAX_N", HARD_MAX_N))


def exact_mode_max_n():
    """Largest n run in exact mode; override with ``AGBOOST_EXACT_MAX_N``."""
    return int(os.environ.get("AGBOOST_EXACT_MAX_N", EXACT_MODE_MAX_N))


class DomainMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Domain:
    n: int

    def __post_init__(self):
        if not 1 <= self.n <= max_dense_n():
            raise ValueError(f"bit-width {self.n} outside [1, {max_dense_n()}]")

    @property
    def size(self):
        return 1 << self.n

    def points(self):
        return np.arange(self.size, dtype=np.int64)


def _bits_for(size):
    n = int(size).bit_length() - 1
    if size < 2 or (1 << n) != size:
        raise ValueError(f"table length {size} is not a power of two >= 2")
    return n


def sign_table(values):
    """Elementwise sign with sign(0) = +1."""
    return np.where(np.asarray(values) >= 0, 1.0, -1.0)


def parity_table(n, mask):
    """chi_mask(x) = (-1)**popcount(mask & x) for every point x."""
    x = np.arange(1 << n, dtype=np.uint64)
    return 1.0 - 2.0 * (np.bitwise_count(x & np.uint64(mask)) & 1)


class BoundedFn:
    """A function from the n-bit cube into [-1, 1].

    Either a dense table, or a lazy view: ``factory`` is called on every
    access to ``table`` and nothing is cached, which keeps long ensembles of
    parities cheap to hold. ``descriptor`` is an optional compact JSON
    description (e.g. ``{"parity": "0x5", "sign": -1}``).
    """

    __slots__ = ("n", "descriptor", "is_boolean", "_table", "_factory")

    def __init__(self, table=None, *, n=None, factory=None, descriptor=None,
                 is_boolean=None):
        if table is None:
            if factory is None or n is None:
                raise ValueError("need a table, or a factory with n")
            self._table = None
            self._factory = factory
            self.n = int(n)
            Domain(self.n)
            self.is_boolean = bool(is_boolean)
        else:
            arr = np.asarray(table)
            if arr.ndim != 1:
                raise ValueError("table must be one-dimensional")
            self.n = _bits_for(arr.size)
            Domain(self.n)
            if n is not None and n != self.n:
                raise DomainMismatch(f"table has bit-width {self.n}, expected {n}")
            if not np.all(np.isfinite(arr)) or np.max(np.abs(arr)) > 1.0 + RANGE_TOL:
                raise ValueError("values outside [-1, 1]")
            boolean = bool(np.all(np.abs(arr) == 1.0))
            if boolean:
                # one byte per point keeps long ensembles small
                arr = arr.astype(np.int8)
            else:
                arr = np.array(arr, dtype=np.float64)
            arr.flags.writeable = False
            self._table = arr
            self._factory = None
            self.is_boolean = boolean
        self.descriptor = descriptor

    @property
    def size(self):
        return 1 << self.n

    @property
    def table(self):
        if self._table is None:
            return np.asarray(self._factory(), dtype=np.float64)
        if self._table.dtype == np.int8:
            return self._table.astype(np.float64)
        return self._table

    def __call__(self, x):
        return float(self.table[int(x)])

    def __neg__(self):
        desc = None
        if self.descriptor and "parity" in self.descriptor:
            desc = dict(self.descriptor, sign=-self.descriptor.get("sign", 1))
        return BoundedFn(-self.table, descriptor=desc)

    def __repr__(self):
        tag = self.descriptor or ("boolean" if self.is_boolean else "real")
        return f"BoundedFn(n={self.n}, {tag})"

    def sign(self):
        return BoundedFn(sign_table(self.table))

    def same_domain(self, other):
        if self.n != other.n:
            raise DomainMismatch(f"bit-widths differ: {self.n} vs {other.n}")

    @classmethod
    def constant(cls, n, value):
        return cls(np.full(1 << n, float(value)))

    @classmethod
    def zeros(cls, n):
        return cls.constant(n, 0.0)

    @classmethod
    def parity(cls, n, mask, sign=1, lazy=False):
        mask = int(mask)
        if not 0 <= mask < (1 << n):
            raise ValueError("mask outside the domain")
        sign = 1 if sign >= 0 else -1
        desc = {"parity": hex(mask), "sign": sign}
        if lazy:
            return cls(n=n, factory=lambda: sign * parity_table(n, mask),
                       descriptor=desc, is_boolean=True)
        return cls(sign * parity_table(n, mask), descriptor=desc)

    @classmethod
    def from_hex(cls, n, text):
        """Decode a Boolean table: bit k of the little-endian bytes is point k, 1 -> +1."""
        raw = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")
        if bits.size < (1 << n):
            raise ValueError("hex string too short for the domain")
        return cls(np.where(bits[: 1 << n] == 1, 1.0, -1.0))

    def to_hex(self):
        if not self.is_boolean:
            raise ValueError("only Boolean functions have a hex encoding")
        bits = (self.table > 0).astype(np.uint8)
        return np.packbits(bits, bitorder="little").tobytes().hex()

    def to_json(self):
        if self.descriptor is not None:
            return dict(self.descriptor)
        if self.is_boolean:
            return {"boolean_hex": self.to_hex(), "n": self.n}
        return {"table": self.table.tolist()}

    @classmethod
    def from_json(cls, obj, n=None):
        if "parity" in obj:
            return cls.parity(n if n is not None else obj["n"], int(obj["parity"], 16),
                              obj.get("sign", 1))
        if "boolean_hex" in obj:
            return cls.from_hex(n if n is not None else obj["n"], obj["boolean_hex"])
        if "table" in obj:
            return cls(obj["table"], n=n)
        raise ValueError(f"unrecognised function encoding: {sorted(obj)}")


class Measure(BoundedFn):
    """A [0, 1]-valued weighting of the cube."""

    __slots__ = ()

    def __init__(self, table):
        arr = np.asarray(table, dtype=np.float64)
        if arr.size and (arr.min() < -RANGE_TOL or arr.max() > 1.0 + RANGE_TOL):
            raise ValueError("measure values outside [0, 1]")
        super().__init__(np.clip(arr, 0.0, 1.0))


class BaseDistribution:
    """A distribution over the n-bit cube: uniform, or an explicit table.

    ``sampler`` optionally replaces the default inverse-CDF sampler; it is
    called as ``sampler(m, rng)`` and must draw from the same distribution.
    """

    __slots__ = ("n", "_weights", "sampler", "_ones")

    def __init__(self, n, weights=None, sampler=None):
        Domain(n)
        self.n = n
        self.sampler = sampler
        self._ones = None
        if weights is None:
            self._weights = None
            return
        w = np.array(weights, dtype=np.float64)
        if w.shape != (1 << n,):
            raise DomainMismatch(f"weight table must have length {1 << n}")
        if w.min() < 0:
            raise ValueError("negative probability")
        if abs(kernels.weighted_sum(w, np.ones_like(w)) - 1.0) > 1e-12:
            raise ValueError("probabilities do not sum to 1")
        w.flags.writeable = False
        self._weights = w

    @classmethod
    def uniform(cls, n):
        return cls(n)

    @classmethod
    def explicit(cls, weights, sampler=None):
        w = np.asarray(weights, dtype=np.float64)
        return cls(_bits_for(w.size), w, sampler)

    @property
    def kind(self):
        return "uniform" if self._weights is None else "explicit"

    @property
    def is_uniform(self):
        return self._weights is None

    @property
    def size(self):
        return 1 << self.n

    @property
    def weights(self):
        if self._weights is None:
            return np.full(1 << self.n, 1.0 / (1 << self.n))
        return self._weights

    def expect(self, values):
        """E_D[values] with compensated summation."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (self.size,):
            raise DomainMismatch("value table does not match the domain")
        if self._weights is None:
            if self._ones is None:
                self._ones = np.ones(self.size)
            return kernels.weighted_sum(values, self._ones) / self.size
        return kernels.weighted_sum(self._weights, values)

    def sample(self, m, rng):
        if self.sampler is not None:
            return self.sampler(m, rng)
        if self._weights is None:
            return rng.integers(0, self.size, size=m, dtype=np.int64)
        cdf = np.cumsum(self._weights)
        cdf /= cdf[-1]
        return np.minimum(np.searchsorted(cdf, rng.random(m), side="right"),
                          self.size - 1).astype(np.int64)

    def to_json(self):
        if self._weights is None:
            return "uniform"
        return {"explicit": self._weights.tolist()}

    @classmethod
    def from_json(cls, obj, n):
        if obj == "uniform":
            return cls.uniform(n)
        return cls(n, obj["explicit"])


@dataclass(frozen=True)
class ExampleDistribution:
    """A distribution A over (x, b): marginal ``base`` and E[b | x] = ``label(x)``."""

    base: BaseDistribution
    label: BoundedFn

    def __post_init__(self):
        if self.base.n != self.label.n:
            raise DomainMismatch("label function and base distribution differ in n")

    @property
    def n(self):
        return self.base.n

    @property
    def is_boolean(self):
        return self.label.is_boolean


def _check(D, *fns):
    for fn in fns:
        if fn.n != D.n:
            raise DomainMismatch(f"function on {fn.n} bits, distribution on {D.n}")


def inner_product_d(D, phi, psi):
    """<phi, psi>_D = E_{x~D}[phi(x) psi(x)]."""
    _check(D, phi, psi)
    return D.expect(phi.table * psi.table)


def norm_d(D, phi):
    return float(np.sqrt(max(inner_product_d(D, phi, phi), 0.0)))


def delta_gamma(A, h):
    """Error and advantage of a Boolean hypothesis: (Delta(A, h), Gamma(A, h))."""
    if not h.is_boolean:
        raise ValueError("delta_gamma needs a Boolean hypothesis")
    corr = inner_product_d(A.base, A.label, h)
    delta = (1.0 - corr) / 2.0
    return delta, 0.5 - delta


def project_p1(a):
    """Truncate into [-1, 1]."""
    if np.ndim(a) == 0:
        return float(min(1.0, max(-1.0, a)))
    return np.clip(a, -1.0, 1.0)


def potential_r(a):
    """a**2 inside [-1, 1], 2|a| - 1 outside."""
    if np.ndim(a) == 0:
        a = float(a)
        return a * a if abs(a) <= 1.0 else 2.0 * abs(a) - 1.0
    a = np.asarray(a, dtype=np.float64)
    return np.where(np.abs(a) <= 1.0, a * a, 2.0 * np.abs(a) - 1.0)


def potential_energy(D, f, h):
    """E_D[R(f - h)]."""
    _check(D, f, h)
    return D.expect(potential_r(f.table - h.table))


@dataclass(frozen=True)
class Step:
    kind: str
    weight: float
    base: BoundedFn


@dataclass(frozen=True)
class Ensemble:
    """The fold h_0 = 0, h_{i+1} = P1(h_i + w_i g_i) over ``steps``.

    Clipping interleaves with the additions, so this is not a linear
    combination; evaluation always replays the steps in order.
    """

    n: int
    steps: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        for step in self.steps:
            if step.kind not in (WEAK, BALANCE):
                raise ValueError(f"unknown step kind {step.kind!r}")
            if not 0.0 < step.weight <= 1.0:
                raise ValueError(f"step weight {step.weight} outside (0, 1]")
            if step.base.n != self.n:
                raise DomainMismatch("step base on a different domain")

    def __len__(self):
        return len(self.steps)

    def evaluate(self, chunk=256):
        """Dense table of the fold."""
        h = np.zeros(1 << self.n)
        for start in range(0, len(self.steps), chunk):
            block = self.steps[start:start + chunk]
            h = kernels.fold_clip(h, np.array([s.weight for s in block]),
                                  np.stack([s.base.table for s in block]))
        return h

    def as_function(self):
        return BoundedFn(self.evaluate())

    def hypothesis(self):
        """The final Boolean hypothesis sign(h_t)."""
        return BoundedFn(sign_table(self.evaluate()))

    def to_json(self):
        return {
            "n": self.n,
            "steps": [{"kind": s.kind, "weight": s.weight, "base": s.base.to_json()}
                      for s in self.steps],
        }

    @classmethod
    def from_json(cls, obj):
        n = obj["n"]
        return cls(n, [Step(s["kind"], s["weight"], BoundedFn.from_json(s["base"], n))
                       for s in obj["steps"]])


def eval_ensemble(ensemble, x):
    h = 0.0
    for step in ensemble.steps:
        h = project_p1(h + step.weight * step.base(x))
    return h


def sign_of(ensemble, x):
    return 1 if eval_ensemble(ensemble, x) >= 0 else -1
