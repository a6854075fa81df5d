"""Timing comparison of the compiled kernels against the numpy fallback."""

import timeit

import numpy as np

from .kernels import backends


def _cases(n, samples, buckets, seed):
    rng = np.random.default_rng(seed)
    size = 1 << n
    table = rng.uniform(-1.0, 1.0, size)
    u = rng.integers(0, size, samples).astype(np.uint64)
    w = rng.uniform(-1.0, 1.0, samples)
    prefixes = np.arange(buckets, dtype=np.uint64)
    h0 = np.zeros(size)
    weights = rng.uniform(0.0, 0.1, 32)
    bases = np.where(rng.random((32, size)) < 0.5, -1.0, 1.0)
    return {
        "fwht": lambda k: k.fwht(table),
        "bucket_sums": lambda k: k.bucket_sums(u, w, prefixes),
        "fold_clip": lambda k: k.fold_clip(h0, weights, bases),
        "weighted_sum": lambda k: k.weighted_sum(table, table),
    }


def run(n=12, samples=20000, buckets=64, repeat=5, seed=0):
    """Best-of-``repeat`` seconds per call for every kernel and backend."""
    cases = _cases(n, samples, buckets, seed)
    rows = []
    for name, fn in cases.items():
        for backend, mod in backends().items():
            number = 20
            best = min(timeit.repeat(lambda: fn(mod), number=number, repeat=repeat)) / number
            rows.append({"kernel": name, "backend": backend, "seconds": best})
    return rows


def format_rows(rows):
    lines = [f"{'kernel':<14}{'backend':<9}{'usec/call':>12}"]
    for r in rows:
        lines.append(f"{r['kernel']:<14}{r['backend']:<9}{r['seconds'] * 1e6:>12.1f}")
    return "\n".join(lines)
