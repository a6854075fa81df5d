"""Pure numpy implementations of the hot loops.

These are the reference versions; the compiled module ``_ckernels`` must
agree with them to floating point round-off.
"""

import math

import numpy as np

BACKEND = "python"


def fwht(values):
    """Unnormalized Walsh-Hadamard transform.

    ``out[a] = sum_x values[x] * (-1)**popcount(a & x)``.
    """
    out = np.array(values, dtype=np.float64, copy=True)
    size = out.size
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < size:
        blocks = out.reshape(-1, 2, h)
        left = blocks[:, 0, :].copy()
        right = blocks[:, 1, :]
        blocks[:, 0, :] += right
        right *= -1.0
        right += left
        h *= 2
    return out


def fold_clip(h0, weights, bases):
    """Replay ``h <- clip(h + w_k * bases[k], -1, 1)`` over the rows of ``bases``."""
    h = np.array(h0, dtype=np.float64, copy=True)
    for w, row in zip(weights, bases):
        h += w * row
        np.clip(h, -1.0, 1.0, out=h)
    return h


def bucket_sums(u, w, prefixes):
    """Mean of ``w[s] * (-1)**popcount(p & u[s])`` for every prefix ``p``."""
    u = np.asarray(u, dtype=np.uint64)
    w = np.asarray(w, dtype=np.float64)
    prefixes = np.asarray(prefixes, dtype=np.uint64)
    out = np.empty(prefixes.size, dtype=np.float64)
    if u.size == 0:
        out.fill(0.0)
        return out
    # bound the temporary at ~4M entries
    chunk = max(1, (1 << 22) // max(1, u.size))
    for start in range(0, prefixes.size, chunk):
        block = prefixes[start:start + chunk]
        parity = np.bitwise_count(u[:, None] & block[None, :]) & 1
        signs = 1.0 - 2.0 * parity
        out[start:start + chunk] = w @ signs / u.size
    return out


def weighted_sum(weights, values):
    """Compensated sum of ``weights * values``."""
    return math.fsum(np.multiply(weights, values).tolist())
