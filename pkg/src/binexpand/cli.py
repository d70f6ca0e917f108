"""Command-line interface.

Exit status is 0 on success, 2 for usage errors and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import __version__
from .distributions import parse_model
from .dyadic import expand
from .exact import statistics
from .exceptions import DomainError, NumericalError
from .sampler import STREAM_NAME, iter_bit_chunks, write_bits
from .sweep import (C_GRID, FAMILIES, SweepConfig, SweepError, equiprobable_c,
                    parse_grid, run_example1, run_sweep)

EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_SWEEP_KEYS = {
    "family": str, "grid": str, "bits": int, "samples": int, "seed": int,
    "out": str, "theory_out": str, "dist": str, "workers": int,
    "equi_threshold": float,
}


def read_config(path):
    """Flat ``key=value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    config = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not eq or key not in _SWEEP_KEYS:
                raise DomainError(f"{path}:{lineno}: unrecognised line {line!r}")
            try:
                config[key] = _SWEEP_KEYS[key](value.strip())
            except ValueError:
                raise DomainError(f"{path}:{lineno}: bad value for {key}") from None
    return config


def _cmd_expand(args):
    print(expand(args.x, args.n))


def _cmd_stats(args):
    model = parse_model(args.dist)
    stats = statistics(model, args.bits)
    print(f"model: {model!r}")
    print(stats.format())
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["i", "j", "joint", "covariance", "correlation"])
            for i in range(1, stats.n + 1):
                for j in range(i, stats.n + 1):
                    writer.writerow([i, j] + [f"{m[i - 1, j - 1]:.9g}" for m in
                                              (stats.joint, stats.covariance, stats.correlation)])


def _cmd_sample(args):
    model = parse_model(args.dist)
    if args.count < 1:
        raise DomainError(f"count must be positive, got {args.count}")
    out = open(args.out, "wb") if args.out else sys.stdout.buffer
    try:
        for chunk in iter_bit_chunks(model, args.bits, args.count, args.seed,
                                     substream=args.substream):
            write_bits(chunk, out)
    finally:
        if args.out:
            out.close()
        else:
            out.flush()


def _cmd_example1(args):
    grid = parse_grid(args.grid) if args.grid else C_GRID
    rows = run_example1(grid, args.out)
    print(f"{'c':>12}{'Pr[B1=1]':>14}{'Pr[B2=1]':>14}")
    for c, p1, p2 in rows:
        print(f"{c:12.6g}{p1:14.9f}{p2:14.9f}")
    print(f"Pr[B1=1] = 1/2 at c = {equiprobable_c(1):.12f}")


def _sweep_config(args):
    merged = read_config(args.config) if args.config else {}
    for key in _SWEEP_KEYS:
        value = getattr(args, key)
        if value is not None:
            merged[key] = value
    if "family" not in merged:
        raise DomainError("sweep needs --family (or family= in --config)")
    family = merged["family"]
    return SweepConfig(
        family=family,
        grid=parse_grid(merged.get("grid"), family),
        n=merged.get("bits", 3),
        samples=merged.get("samples", 100_000),
        seed=merged.get("seed", 0),
        out=merged.get("out"),
        theory_out=merged.get("theory_out"),
        template=merged.get("dist"),
        workers=merged.get("workers", 1),
        equi_threshold=merged.get("equi_threshold", 0.05),
    )


def _cmd_sweep(args):
    config = _sweep_config(args)
    result = run_sweep(config)
    header = result.header()
    print("  ".join(f"{h:>12}" for h in header))
    for rec in result.records():
        print("  ".join(f"{'':>12}" if v is None else f"{v:12.6g}" for v in rec))
    close = result.equicorrelated(config.equi_threshold)
    print(f"theoretical spread < {config.equi_threshold:g} at: "
          + (", ".join(f"{v:g}" for v in close) or "none"))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="binexpand",
        description="Bernoulli bit streams from binary expansions of [0,1] random variables.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="print the n-bit expansion of x")
    p.add_argument("x", type=float)
    p.add_argument("n", type=int)
    p.set_defaults(func=_cmd_expand)

    p = sub.add_parser("stats", help="exact bit statistics of a distribution")
    p.add_argument("--dist", required=True,
                   help='e.g. "uniform", "kind=beta alpha=2 beta=2", '
                        '"kind=piecewise breakpoints=0,0.5,1 densities=0.5,1.5"')
    p.add_argument("--bits", type=int, default=3)
    p.add_argument("--csv", help="also write the matrices as CSV")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("sample", help=f"export raw bits ({STREAM_NAME} stream)")
    p.add_argument("--dist", required=True)
    p.add_argument("--bits", type=int, default=8)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--substream", type=int, default=0)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("example1", help="Pr[B1=1], Pr[B2=1] for trapezoids with plateau [c, c+1/4]")
    p.add_argument("--grid", help="c values, e.g. 0:0.75:31 (default)")
    p.add_argument("--out", help="CSV path")
    p.set_defaults(func=_cmd_example1)

    p = sub.add_parser("sweep", help="exact vs simulated correlations over a parameter grid")
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--grid", help='numbers and start:stop:count ranges, or "default"')
    p.add_argument("--bits", type=int)
    p.add_argument("--samples", type=int, help="draws per grid point; 0 for theory only")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="CSV with theory and empirical columns")
    p.add_argument("--theory-out", dest="theory_out", help="CSV with theory columns only")
    p.add_argument("--dist", help="custom family template containing {param}")
    p.add_argument("--workers", type=int)
    p.add_argument("--equi-threshold", dest="equi_threshold", type=float)
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (DomainError, OSError) as exc:
        print(f"binexpand: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SweepError, NumericalError) as exc:
        print(f"binexpand: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
