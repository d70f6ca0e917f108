"""Exact bit statistics of a density's binary expansion.

Probabilities are measures of unions of dyadic intervals, computed as sums of
cdf differences over the intervals. Joint probabilities intersect the two
bits' interval lists directly, so a pair ``(i, j)`` costs
``O(2**max(i, j))`` cdf evaluations regardless of the precision requested.
Bit indices above ``dyadic.MAX_ENUMERATED_BIT`` (26) raise ``DomainError``:
their interval lists are too long to sum, and too long to sum accurately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .dyadic import bit_intervals, check_bit_index, intersect
from .exceptions import DomainError

# variances at or below this are treated as degenerate for exact statistics
_EXACT_VAR_FLOOR = 1e-14


def _measure(model, lo, hi):
    if len(lo) == 0:
        return 0.0
    return math.fsum(np.asarray(model.cdf(hi)) - np.asarray(model.cdf(lo)))


def bit_marginal(model, i):
    """``Pr[B_i = 1]`` under ``model``."""
    s = bit_intervals(check_bit_index(i), 1)
    return _measure(model, s.lo, s.hi)


def joint_probability(model, i, j, bi=1, bj=1):
    """``Pr[B_i = bi, B_j = bj]`` for ``i != j``."""
    i, j = check_bit_index(i), check_bit_index(j, "j")
    if i == j:
        raise DomainError("joint_probability needs two distinct bit indices")
    if bi not in (0, 1) or bj not in (0, 1):
        raise DomainError("bit values must be 0 or 1")
    lo, hi = intersect(bit_intervals(i, bi), bit_intervals(j, bj))
    return _measure(model, lo, hi)


@dataclass(frozen=True)
class BitStatistics:
    """Marginals, pairwise joints, covariance and correlation of ``n`` bits.

    Indices into the arrays are 0-based; ``rho(i, j)`` and friends take the
    1-based bit numbers. Correlations whose variance vanishes are ``nan``.
    """

    n: int
    marginals: np.ndarray
    joint: np.ndarray
    covariance: np.ndarray
    correlation: np.ndarray
    source: str = "exact"
    sample_count: int | None = None
    seed: int | None = None
    undefined: tuple = field(default=())

    @classmethod
    def from_moments(cls, marginals, joint, *, source="exact", sample_count=None,
                     seed=None, var_floor=_EXACT_VAR_FLOOR):
        p = np.asarray(marginals, dtype=np.float64)
        joint = np.array(joint, dtype=np.float64)
        n = p.size
        np.fill_diagonal(joint, p)
        cov = joint - np.outer(p, p)
        var = p * (1.0 - p)
        degenerate = var <= var_floor
        with np.errstate(divide="ignore", invalid="ignore"):
            corr = cov / np.sqrt(np.outer(var, var))
        corr = np.clip(corr, -1.0, 1.0)
        np.fill_diagonal(corr, 1.0)
        corr[degenerate, :] = np.nan
        corr[:, degenerate] = np.nan
        for arr in (p, joint, cov, corr):
            arr.setflags(write=False)
        return cls(n, p, joint, cov, corr, source, sample_count, seed,
                   tuple(int(k) + 1 for k in np.nonzero(degenerate)[0]))

    def pairs(self):
        return list(combinations(range(1, self.n + 1), 2))

    def rho(self, i, j):
        return float(self.correlation[i - 1, j - 1])

    def cov(self, i, j):
        return float(self.covariance[i - 1, j - 1])

    def p(self, i):
        return float(self.marginals[i - 1])

    def cell(self, i, j, bi, bj):
        """``Pr[B_i = bi, B_j = bj]`` reconstructed from marginals and the 1-1 joint."""
        pi, pj, p11 = self.p(i), self.p(j), float(self.joint[i - 1, j - 1])
        if (bi, bj) == (1, 1):
            return p11
        if (bi, bj) == (1, 0):
            return pi - p11
        if (bi, bj) == (0, 1):
            return pj - p11
        return 1.0 - pi - pj + p11

    def format(self, digits=9):
        """Aligned plain-text rendering."""
        width = digits + 8
        fmt = lambda v: f"{v:>{width}.{digits}g}"  # noqa: E731
        head = "".join(f"{'B' + str(k):>{width}}" for k in range(1, self.n + 1))
        lines = [f"source: {self.source}" + (
            f" (count={self.sample_count}, seed={self.seed})" if self.source == "empirical" else ""),
            "", f"{'':4}{head}", f"{'p':4}" + "".join(fmt(v) for v in self.marginals)]
        for name, mat in (("joint Pr[Bi=1,Bj=1]", self.joint),
                          ("covariance", self.covariance),
                          ("correlation", self.correlation)):
            lines += ["", name, f"{'':4}{head}"]
            for k in range(self.n):
                lines.append(f"{'B' + str(k + 1):4}" + "".join(fmt(v) for v in mat[k]))
        if self.undefined:
            lines += ["", "undefined correlation (zero variance) for bits: "
                      + ", ".join(map(str, self.undefined))]
        return "\n".join(lines)


def statistics(model, n):
    """Exact :class:`BitStatistics` of the first ``n`` bits."""
    n = check_bit_index(n, "n")
    p = np.array([bit_marginal(model, i) for i in range(1, n + 1)])
    joint = np.zeros((n, n))
    for i, j in combinations(range(1, n + 1), 2):
        joint[i - 1, j - 1] = joint[j - 1, i - 1] = joint_probability(model, i, j, 1, 1)
    return BitStatistics.from_moments(p, joint)


def independence_check(stats, tolerance):
    """Pairs that fail to factorise.

    Returns ``(i, j, deviation)`` for each pair whose largest
    ``|Pr[bi, bj] - Pr[bi] Pr[bj]|`` over the four cells exceeds
    ``tolerance``. An empty list means pairwise independent.
    """
    if stats.source != "exact":
        raise DomainError("independence_check expects exact statistics")
    failures = []
    for i, j in stats.pairs():
        dev = max(
            abs(stats.cell(i, j, bi, bj)
                - (stats.p(i) if bi else 1.0 - stats.p(i))
                * (stats.p(j) if bj else 1.0 - stats.p(j)))
            for bi in (0, 1) for bj in (0, 1))
        if dev > tolerance:
            failures.append((i, j, dev))
    return failures
