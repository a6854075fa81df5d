"""Compare the Cython kernels with the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--n 12] [--samples 20000]
"""

import argparse

from agboost import bench

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--samples", type=int, default=20000)
    ap.add_argument("--buckets", type=int, default=64)
    args = ap.parse_args()
    print(bench.format_rows(bench.run(args.n, args.samples, args.buckets)))
