"""Parameter sweeps comparing exact and simulated bit correlations."""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .distributions import Beta, Trapezoidal, parse_model
from .exact import bit_marginal, statistics
from .exceptions import DomainError, NumericalError
from .sampler import check_seed, draw_bits, empirical_statistics

FAMILIES = ("beta-symmetric", "trapezoid-symmetric", "trapezoid-C", "custom")

#: alpha values 0.1, 0.25, 0.75, 1, 2, 3, ..., 20
BETA_GRID = (0.1, 0.25, 0.75, 1.0) + tuple(float(a) for a in range(2, 21))
DELTA_GRID = tuple(np.linspace(0.0, 0.5, 10).tolist())
C_GRID = tuple(np.linspace(0.0, 0.75, 31).tolist())

DEFAULT_GRIDS = {
    "beta-symmetric": BETA_GRID,
    "trapezoid-symmetric": DELTA_GRID,
    "trapezoid-C": C_GRID,
}

EQUICORRELATION_THRESHOLD = 0.05


class SweepError(RuntimeError):
    """A grid point failed numerically; ``param`` names it."""

    def __init__(self, message, param):
        super().__init__(message)
        self.param = param


def parse_grid(spec, family=None):
    """Parse ``"0.1,0.25,2:20:19"``: numbers and ``start:stop:count`` ranges.

    ``"default"`` (or an empty spec) selects the family's default grid.
    """
    spec = (spec or "").strip()
    if spec in ("", "default"):
        if family not in DEFAULT_GRIDS:
            raise DomainError(f"family {family!r} has no default grid")
        return DEFAULT_GRIDS[family]
    values = []
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            if ":" in item:
                start, stop, count = item.split(":")
                count = int(count)
                if count < 1:
                    raise ValueError("range count must be positive")
                values.extend(np.linspace(float(start), float(stop), count).tolist())
            else:
                values.append(float(item))
        except ValueError as exc:
            raise DomainError(f"bad grid item {item!r}: {exc}") from None
    if not values:
        raise DomainError("grid is empty")
    return tuple(values)


def check_grid(family, grid):
    if family not in FAMILIES:
        raise DomainError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if not grid:
        raise DomainError("grid is empty")
    bounds = {
        "beta-symmetric": lambda v: v > 0.0 and np.isfinite(v),
        "trapezoid-symmetric": lambda v: 0.0 <= v <= 0.5,
        "trapezoid-C": lambda v: 0.0 <= v <= 0.75,
        "custom": np.isfinite,
    }[family]
    bad = [v for v in grid if not bounds(v)]
    if bad:
        raise DomainError(f"grid values outside the {family} domain: {bad}")


def family_model(family, value, template=None):
    if family == "beta-symmetric":
        return Beta(value, value)
    if family == "trapezoid-symmetric":
        return Trapezoidal.symmetric(value)
    if family == "trapezoid-C":
        return Trapezoidal.quarter_plateau(value)
    if family == "custom":
        if not template or "{param}" not in template:
            raise DomainError("custom family needs a --dist template containing {param}")
        return parse_model(template.replace("{param}", repr(float(value))))
    raise DomainError(f"unknown family {family!r}")


@dataclass
class SweepConfig:
    family: str
    grid: tuple
    n: int = 3
    samples: int = 100_000
    seed: int = 0
    out: str | None = None
    theory_out: str | None = None
    template: str | None = None
    workers: int = 1
    equi_threshold: float = EQUICORRELATION_THRESHOLD

    def validate(self):
        check_grid(self.family, tuple(self.grid))
        if self.family == "custom":
            family_model(self.family, self.grid[0], self.template)
        if not 2 <= self.n <= 16:
            raise DomainError(f"bits must lie in [2, 16] for a sweep, got {self.n}")
        if self.samples != 0 and self.samples < 2:
            raise DomainError("samples must be 0 (theory only) or at least 2")
        check_seed(self.seed)
        return self


@dataclass
class SweepRow:
    param: float
    rho_theory: dict
    rho_emp: dict
    marginals: tuple

    def spread(self):
        vals = [v for v in self.rho_theory.values() if np.isfinite(v)]
        return max(vals) - min(vals) if vals else float("nan")


@dataclass
class SweepResult:
    family: str
    n: int
    rows: list = field(default_factory=list)

    @property
    def pairs(self):
        return list(combinations(range(1, self.n + 1), 2))

    def header(self, theory_only=False):
        names = [f"rho{i}{j}" for i, j in self.pairs]
        cols = ["param"] + [f"{c}_theory" for c in names]
        if not theory_only:
            cols += [f"{c}_emp" for c in names]
        return cols + [f"p{k}" for k in range(1, self.n + 1)]

    def records(self, theory_only=False):
        for row in self.rows:
            rec = [row.param] + [row.rho_theory[p] for p in self.pairs]
            if not theory_only:
                rec += [row.rho_emp.get(p) for p in self.pairs]
            yield rec + list(row.marginals)

    def write_csv(self, path, theory_only=False):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.header(theory_only))
            for rec in self.records(theory_only):
                writer.writerow([_fmt(v) for v in rec])

    def equicorrelated(self, threshold=EQUICORRELATION_THRESHOLD):
        """Grid values where the theoretical pairwise correlations spread less than ``threshold``."""
        return [row.param for row in self.rows if row.spread() < threshold]


def _fmt(value):
    if value is None:
        return ""
    return f"{float(value):.9g}"


def sweep_point(config, index):
    value = config.grid[index]
    try:
        model = family_model(config.family, value, config.template)
        exact = statistics(model, config.n)
        rho_emp = {}
        if config.samples:
            run = draw_bits(model, config.n, config.samples, config.seed,
                            substream=index, store=False)
            emp = empirical_statistics(run)
            rho_emp = {(i, j): emp.rho(i, j) for i, j in exact.pairs()}
    except NumericalError as exc:
        raise SweepError(f"numerical failure at {config.family} param={value!r}: {exc}",
                         value) from exc
    return SweepRow(float(value), {(i, j): exact.rho(i, j) for i, j in exact.pairs()},
                    rho_emp, tuple(exact.marginals.tolist()))


def run_sweep(config):
    """Exact and empirical correlations at every grid point, optionally written to CSV.

    Grid point ``k`` samples from substream ``k`` of the base seed, so rows do
    not depend on evaluation order or on ``workers``.
    """
    config.validate()
    indices = range(len(config.grid))
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(lambda k: sweep_point(config, k), indices))
    else:
        rows = [sweep_point(config, k) for k in indices]
    result = SweepResult(config.family, config.n, rows)
    if config.out:
        result.write_csv(config.out)
    if config.theory_out:
        result.write_csv(config.theory_out, theory_only=True)
    return result


def example1_curve(grid):
    """``(c, Pr[B1=1], Pr[B2=1])`` for trapezoids with plateau ``[c, c + 1/4]``."""
    check_grid("trapezoid-C", tuple(grid))
    rows = []
    for c in grid:
        model = Trapezoidal.quarter_plateau(c)
        rows.append((float(c), bit_marginal(model, 1), bit_marginal(model, 2)))
    return rows


def run_example1(grid, out=None):
    rows = example1_curve(grid)
    if out:
        with open(Path(out), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["c", "p1", "p2"])
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    return rows


def equiprobable_c(bit, lo=0.0, hi=0.75, xtol=1e-12):
    """Plateau start ``c`` in ``[lo, hi]`` where ``Pr[B_bit = 1] = 1/2``.

    The bracket must contain a sign change. ``Pr[B2 = 1]`` returns to 1/2 at
    several ``c``, so narrow the bracket to pick one.
    """
    def excess(c):
        return bit_marginal(Trapezoidal.quarter_plateau(c), bit) - 0.5
    return brentq(excess, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
