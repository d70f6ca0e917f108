"""Numerical integration used by the distribution catalogue."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .exceptions import NumericalError

DEFAULT_TOL = 1e-9
MAX_DEPTH = 40


def adaptive_simpson(f, a, b, tol=DEFAULT_TOL, max_depth=MAX_DEPTH):
    """Integrate scalar ``f`` over ``[a, b]`` by adaptive Simpson's rule.

    Each panel is accepted when the Richardson error estimate is within its
    share of ``tol``. A panel that reaches ``max_depth`` is accepted if its
    estimate is within the full ``tol``, otherwise a :class:`NumericalError`
    naming the panel is raised.
    """
    a, b = float(a), float(b)
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    total = 0.0
    # explicit stack: (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if not math.isfinite(delta):
            raise NumericalError(f"non-finite integrand on [{a!r}, {b!r}]", (a, b))
        if abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        elif depth >= max_depth:
            if abs(delta) > 15.0 * tol:
                raise NumericalError(
                    f"adaptive Simpson did not converge on [{a!r}, {b!r}]", (a, b))
            total += left + right + delta / 15.0
        else:
            stack.append((m, b, fm, frm, fb, right, 0.5 * eps, depth + 1))
            stack.append((a, m, fa, flm, fm, left, 0.5 * eps, depth + 1))
    return total


@lru_cache(maxsize=64)
def jacobi_rule(order, exponent):
    """Nodes and weights for ``int_0^1 t**exponent * g(t) dt``, ``exponent > -1``.

    Golub-Welsch: eigen-decomposition of the Jacobi matrix of the polynomials
    orthogonal for ``(1 + z)**exponent`` on [-1, 1], mapped to [0, 1]. This
    stays accurate to ~1e-14 for exponents near -1, where scipy's
    ``roots_jacobi`` loses about three digits.
    """
    b = float(exponent)
    k = np.arange(order, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = b * b / ((2.0 * k + b) * (2.0 * k + b + 2.0))
    diag[0] = b / (b + 2.0)
    kk = np.arange(1, order, dtype=np.float64)
    off = np.sqrt(4.0 * kk * kk * (kk + b) * (kk + b)
                  / ((2.0 * kk + b) ** 2 * (2.0 * kk + b + 1.0) * (2.0 * kk + b - 1.0)))
    z, vecs = eigh_tridiagonal(diag, off)
    # total weight of t**b on [0, 1]
    w = vecs[0] ** 2 / (b + 1.0)
    t = 0.5 * (1.0 + z)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w
