"""Command-line entry point: ``agboost gen|run|opt|bench``."""

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import bench
from .harness import PipelineError, SpecError, load_spec, opt_baseline, run_spec
from .instances import FAMILIES, gen_instance, load_instance, save_instance


def _param(text):
    key, sep, raw = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def _u64(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser():
    ap = argparse.ArgumentParser(prog="agboost", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("family", choices=FAMILIES)
    g.add_argument("--param", "-p", type=_param, action="append", default=[],
                   help="family parameter as key=value (JSON values allowed)")
    g.add_argument("--seed", type=_u64, default=0)
    g.add_argument("--out", required=True, help="instance file to write")

    r = sub.add_parser("run", help="run one or more experiment specs")
    r.add_argument("--spec", action="append", required=True, help="spec JSON file (repeatable)")
    r.add_argument("--seed", type=_u64, default=None, help="override the spec seed")
    r.add_argument("--mode", choices=["exact", "sampled"], default=None)
    r.add_argument("--out", default=None, help="output directory")
    r.add_argument("--jobs", type=int, default=1, help="specs to run in parallel")

    o = sub.add_parser("opt", help="exact Delta(A, C) by full scan")
    o.add_argument("--instance", required=True)
    o.add_argument("--class", dest="cls", default="parities",
                   help="parities | constants | conjunctions:k | trees:s")
    o.add_argument("--max-size", type=int, default=1 << 20)
    o.add_argument("--out", default=None)

    b = sub.add_parser("bench", help="time the compiled kernels against the fallback")
    b.add_argument("--n", type=int, default=12)
    b.add_argument("--samples", type=int, default=20000)
    b.add_argument("--out", default=None)
    return ap


def _run_one(job):
    path, out, seed, mode = job
    spec, base = load_spec(path)
    if out is None:
        out = spec.get("output", {}).get("dir") or str(Path(path).with_suffix("")) + "_out"
    report = run_spec(spec, out, base, seed, mode)
    return path, out, report


def _emit(obj, out):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    print(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "gen":
            inst = gen_instance(args.family, dict(args.param), args.seed)
            save_instance(inst, args.out)
            print(f"{args.out} sha256={inst.digest()}")
            return 0
        if args.command == "opt":
            _emit(opt_baseline(load_instance(args.instance), args.cls, args.max_size), args.out)
            return 0
        if args.command == "bench":
            rows = bench.run(args.n, args.samples)
            print(bench.format_rows(rows))
            if args.out:
                Path(args.out).write_text(json.dumps(rows, indent=2) + "\n")
            return 0
        jobs = []
        for i, path in enumerate(args.spec):
            out = args.out
            if out is not None and len(args.spec) > 1:
                out = str(Path(out) / f"{i:03d}_{Path(path).stem}")
            jobs.append((path, out, args.seed, args.mode))
        if args.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_run_one, jobs))
        else:
            results = [_run_one(j) for j in jobs]
        ok = True
        for path, out, report in results:
            status = "PASS" if report["pass"] else "FAIL"
            print(f"{status} {path} -> {out} error={report['final_error']!r} "
                  f"bound={report['bound']['value']!r} ({report['bound']['expr']})")
            ok &= report["pass"]
        return 0 if ok else 1
    except (SpecError, PipelineError, ValueError, OSError) as exc:
        print(f"agboost: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
