"""Continuous distributions supported on [0, 1].

Every model evaluates ``pdf``, ``cdf`` and ``inverse_cdf`` on scalars or numpy
arrays. Arrays are processed elementwise with no cross-element reductions, so a
value's result never depends on which batch it was computed in; the sampler
relies on this for reproducibility under chunking.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy.special import xlog1py, xlogy

from .exceptions import DomainError, NumericalError
from .quadrature import adaptive_simpson, jacobi_rule

#: Density reported at a singular endpoint is the density at this offset.
ENDPOINT_CAP = 1e-12

#: Number of equally spaced offsets used by the grid symmetry test.
SYMMETRY_GRID = 1025

# root-finding stop rules for numerically inverted cdfs
_FTOL = 1e-14
_MAX_ITER = 200


def _unit_array(x, name="x"):
    arr = np.asarray(x, dtype=np.float64)
    if np.any(~((arr >= 0.0) & (arr <= 1.0))):
        raise DomainError(f"{name} must lie in [0, 1]")
    return arr


def _ret(value, scalar):
    return float(value) if scalar else value


class DistributionModel:
    """Base class for densities on [0, 1].

    Subclasses implement the array kernels ``_pdf``, ``_cdf`` and optionally
    ``_ppf`` and ``_symmetric``; the public methods add domain checking and
    scalar/array dispatch.
    """

    kind = "abstract"

    def pdf(self, x):
        arr = _unit_array(x)
        return _ret(self._pdf(np.atleast_1d(arr)).reshape(arr.shape), arr.ndim == 0)

    def cdf(self, x):
        arr = _unit_array(x)
        out = np.clip(self._cdf(np.atleast_1d(arr)), 0.0, 1.0)
        return _ret(out.reshape(arr.shape), arr.ndim == 0)

    def inverse_cdf(self, u):
        arr = _unit_array(u, "u")
        out = np.clip(self._ppf(np.atleast_1d(arr)), 0.0, 1.0)
        return _ret(out.reshape(arr.shape), arr.ndim == 0)

    ppf = inverse_cdf

    def is_symmetric(self, tolerance=1e-9):
        return _grid_symmetric(self, tolerance)

    def params(self):
        return {}

    def to_config(self):
        """Flat ``key=value`` description accepted by :func:`parse_model`."""
        items = {"kind": self.kind, **self.params()}
        parts = []
        for key, value in items.items():
            if isinstance(value, (list, tuple, np.ndarray)):
                value = ",".join(repr(float(v)) for v in value)
            elif isinstance(value, float):
                value = repr(value)
            parts.append(f"{key}={value}")
        return " ".join(parts)

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return repr(self) == repr(other)

    def __hash__(self):
        return hash(repr(self))

    # generic numerical inversion, used by models without a closed form
    def _ppf(self, u):
        return _invert(self, u)

    def _bracket_table(self):
        table = getattr(self, "_table", None)
        if table is None:
            ends = 2.0 ** -np.arange(9, 1075, 2, dtype=np.float64)
            xs = np.unique(np.concatenate(
                [np.linspace(0.0, 1.0, 257), ends, 1.0 - ends]))
            fs = np.maximum.accumulate(np.clip(self._cdf(xs), 0.0, 1.0))
            fs[0], fs[-1] = 0.0, 1.0
            table = (xs, fs)
            self._table = table
        return table


def _grid_symmetric(model, tolerance):
    eps = np.linspace(0.0, 0.5, SYMMETRY_GRID)
    left = model.pdf(0.5 - eps)
    right = model.pdf(0.5 + eps)
    return bool(np.max(np.abs(left - right)) <= tolerance)


def _invert(model, u):
    """Safeguarded Newton iteration for ``cdf(x) = u``, elementwise.

    Each element starts from a bracket read off a fixed cdf table and stops
    once ``|cdf(x) - u| <= 1e-14`` or its bracket endpoints are adjacent
    floats.
    A Newton step that leaves the bracket, or is more than half the step
    before it, is replaced by bisection.
    """
    u = np.asarray(u, dtype=np.float64)
    xs, fs = model._bracket_table()
    k = np.clip(np.searchsorted(fs, u, side="right") - 1, 0, len(xs) - 2)
    out = np.empty_like(u)
    out[u <= 0.0] = 0.0
    out[u >= 1.0] = 1.0
    active = np.nonzero((u > 0.0) & (u < 1.0))[0]
    lo, hi = xs[k[active]], xs[k[active] + 1]
    target = u[active]
    x = 0.5 * (lo + hi)
    step_old = hi - lo
    for _ in range(_MAX_ITER):
        if active.size == 0:
            break
        resid = model._cdf(x) - target
        below = resid < 0.0
        lo = np.where(below, x, lo)
        hi = np.where(below, hi, x)
        done = (np.abs(resid) <= _FTOL) | (hi - lo <= np.spacing(hi))
        out[active[done]] = x[done]
        keep = ~done
        active, x, lo, hi = active[keep], x[keep], lo[keep], hi[keep]
        resid, target, step_old = resid[keep], target[keep], step_old[keep]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            step = resid / model._pdf(x)
        newton = x - step
        ok = (np.isfinite(newton) & (newton > lo) & (newton < hi)
              & (np.abs(step) <= 0.5 * np.abs(step_old)))
        mid = 0.5 * (lo + hi)
        step_old = np.where(ok, step, x - mid)
        x = np.where(ok, newton, mid)
    if active.size:
        raise NumericalError(
            f"inverse cdf of {model!r} did not converge for {active.size} values",
            (float(lo.min()), float(hi.max())))
    return out


class Uniform(DistributionModel):
    kind = "uniform"

    def _pdf(self, x):
        return np.ones_like(x)

    def _cdf(self, x):
        return x.copy()

    def _ppf(self, u):
        return u.copy()

    def is_symmetric(self, tolerance=1e-9):
        return True


class Beta(DistributionModel):
    """Beta(alpha, beta) on [0, 1].

    The cdf is evaluated as an incomplete beta integral with the endpoint
    power singularity factored out: for ``x <= 1/2``,

    ``F(x) = x**alpha / B(alpha, beta) * int_0^1 t**(alpha-1) (1 - x t)**(beta-1) dt``

    and the remaining integrand is analytic on [0, 1] (its singularity sits at
    ``t = 1/x >= 2``), so a fixed Gauss-Jacobi rule is accurate to rounding.
    For ``x > 1/2`` the mirrored formula is used on ``1 - x``.
    """

    kind = "beta"
    ORDER = 32

    def __init__(self, alpha, beta):
        alpha, beta = float(alpha), float(beta)
        if not (alpha > 0.0 and beta > 0.0 and math.isfinite(alpha) and math.isfinite(beta)):
            raise DomainError(f"Beta parameters must be positive, got ({alpha}, {beta})")
        self.alpha = alpha
        self.beta = beta
        self._log_b = math.lgamma(alpha) + math.lgamma(beta) - math.lgamma(alpha + beta)

    def params(self):
        return {"alpha": self.alpha, "beta": self.beta}

    def _logpdf(self, x):
        return xlogy(self.alpha - 1.0, x) + xlog1py(self.beta - 1.0, -x) - self._log_b

    def _pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.alpha < 1.0:
            x = np.maximum(x, ENDPOINT_CAP)
        if self.beta < 1.0:
            x = np.minimum(x, 1.0 - ENDPOINT_CAP)
        return np.exp(self._logpdf(x))

    def _lower_tail(self, x, a, b):
        # int_0^x s^(a-1) (1-s)^(b-1) ds / B, for x <= 1/2
        if b == 1.0:
            return x ** a
        if a == 1.0:
            return -np.expm1(b * np.log1p(-x))
        t, w = jacobi_rule(self.ORDER, a - 1.0)
        acc = np.zeros_like(x)
        for tk, wk in zip(t, w):
            acc += wk * (1.0 - x * tk) ** (b - 1.0)
        with np.errstate(divide="ignore"):
            scale = np.exp(a * np.log(x) - self._log_b)
        return scale * acc

    def _cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        left = x <= 0.5
        out = np.empty_like(x)
        out[left] = self._lower_tail(x[left], self.alpha, self.beta)
        out[~left] = 1.0 - self._lower_tail(1.0 - x[~left], self.beta, self.alpha)
        return out

    def is_symmetric(self, tolerance=1e-9):
        return abs(self.alpha - self.beta) <= tolerance


class Trapezoidal(DistributionModel):
    """Trapezoidal density: linear rise on [0, c], plateau on [c, d], linear fall on [d, 1].

    The density is zero at both ends and the plateau height is
    ``2 / (1 + d - c)``. ``c = 0, d = 1`` is the uniform density and
    ``c = d = 1/2`` the symmetric triangle.
    """

    kind = "trapezoid"

    def __init__(self, c, d):
        c, d = float(c), float(d)
        if not 0.0 <= c <= d <= 1.0:
            raise DomainError(f"trapezoid needs 0 <= c <= d <= 1, got c={c}, d={d}")
        self.c = c
        self.d = d
        self.height = 2.0 / (1.0 + d - c)

    @classmethod
    def symmetric(cls, delta):
        """Plateau ``[1/2 - delta, 1/2 + delta]``."""
        delta = float(delta)
        if not 0.0 <= delta <= 0.5:
            raise DomainError(f"delta must lie in [0, 1/2], got {delta}")
        return cls(0.5 - delta, 0.5 + delta)

    @classmethod
    def quarter_plateau(cls, c):
        """Plateau ``[c, c + 1/4]`` for ``c`` in [0, 3/4]."""
        c = float(c)
        if not 0.0 <= c <= 0.75:
            raise DomainError(f"c must lie in [0, 3/4], got {c}")
        return cls(c, c + 0.25)

    def params(self):
        return {"c": self.c, "d": self.d}

    def _pdf(self, x):
        c, d, h = self.c, self.d, self.height
        with np.errstate(divide="ignore", invalid="ignore"):
            rise = h * x / c
            fall = h * (1.0 - x) / (1.0 - d)
        return np.where(x < c, rise, np.where(x <= d, h, fall))

    def _cdf(self, x):
        c, d, h = self.c, self.d, self.height
        with np.errstate(divide="ignore", invalid="ignore"):
            rise = h * x * x / (2.0 * c)
            fall = 1.0 - h * (1.0 - x) ** 2 / (2.0 * (1.0 - d))
        flat = h * c / 2.0 + h * (x - c)
        return np.where(x < c, rise, np.where(x <= d, flat, fall))

    def _ppf(self, u):
        c, d, h = self.c, self.d, self.height
        u_c = h * c / 2.0
        u_d = u_c + h * (d - c)
        rise = np.sqrt(2.0 * c * u / h)
        flat = c + (u - u_c) / h
        fall = 1.0 - np.sqrt(np.maximum(2.0 * (1.0 - d) * (1.0 - u) / h, 0.0))
        return np.where(u <= u_c, rise, np.where(u <= u_d, flat, fall))

    def is_symmetric(self, tolerance=1e-9):
        return abs(self.c + self.d - 1.0) <= tolerance


class PiecewiseConstant(DistributionModel):
    """Step density: ``densities[k]`` on ``[breakpoints[k], breakpoints[k+1])``.

    The last piece is closed at 1.
    """

    kind = "piecewise"

    def __init__(self, breakpoints, densities, *, atol=1e-9):
        b = np.array(breakpoints, dtype=np.float64)
        f = np.array(densities, dtype=np.float64)
        if b.ndim != 1 or b.size < 2 or b[0] != 0.0 or b[-1] != 1.0:
            raise DomainError("breakpoints must run from 0 to 1")
        if np.any(np.diff(b) <= 0.0):
            raise DomainError("breakpoints must be strictly increasing")
        if f.shape != (b.size - 1,):
            raise DomainError(
                f"need {b.size - 1} densities for {b.size} breakpoints, got {f.size}")
        if np.any(~np.isfinite(f)) or np.any(f < 0.0):
            raise DomainError("densities must be finite and nonnegative")
        mass = f * np.diff(b)
        if abs(mass.sum() - 1.0) > atol:
            raise DomainError(f"densities integrate to {mass.sum()!r}, not 1")
        b.setflags(write=False)
        f.setflags(write=False)
        self.breakpoints = b
        self.densities = f
        cum = np.concatenate([[0.0], np.cumsum(mass)])
        cum[-1] = 1.0
        self._cum = cum

    @classmethod
    def from_weights(cls, breakpoints, weights):
        """Build from unnormalised nonnegative heights."""
        b = np.asarray(breakpoints, dtype=np.float64)
        w = np.asarray(weights, dtype=np.float64)
        total = float(np.sum(w * np.diff(b)))
        if not total > 0.0:
            raise DomainError("weights must have positive total mass")
        return cls(b, w / total)

    def params(self):
        return {"breakpoints": self.breakpoints.tolist(), "densities": self.densities.tolist()}

    def _piece(self, x):
        k = np.searchsorted(self.breakpoints, x, side="right") - 1
        return np.clip(k, 0, self.densities.size - 1)

    def _pdf(self, x):
        return self.densities[self._piece(x)]

    def _cdf(self, x):
        k = self._piece(x)
        return self._cum[k] + self.densities[k] * (x - self.breakpoints[k])

    def _ppf(self, u):
        # first piece whose cumulative mass reaches u; has positive mass when u > 0
        k = np.clip(np.searchsorted(self._cum[1:], u, side="left"), 0, self.densities.size - 1)
        dens = self.densities[k]
        with np.errstate(divide="ignore", invalid="ignore"):
            x = self.breakpoints[k] + (u - self._cum[k]) / dens
        x = np.where(dens > 0.0, x, self.breakpoints[k])
        return np.where(u <= 0.0, 0.0, np.minimum(x, self.breakpoints[k + 1]))

    def is_symmetric(self, tolerance=1e-9):
        b, f = self.breakpoints, self.densities
        return bool(np.all(np.abs(b + b[::-1] - 1.0) <= tolerance)
                    and np.all(np.abs(f - f[::-1]) <= tolerance))


class CustomPdf(DistributionModel):
    """A user-supplied density on [0, 1].

    Parameters
    ----------
    density : callable
        Scalar function ``x -> f(x) >= 0``.
    hints : sequence of float
        Points in (0, 1) where ``density`` is discontinuous or has a kink.
        Quadrature panels are split there.
    normalize : bool
        Rescale ``density`` to unit mass instead of requiring it.
    tol : float
        Absolute quadrature tolerance of the cdf.
    """

    kind = "custom"

    def __init__(self, density: Callable[[float], float], hints: Sequence[float] = (),
                 *, normalize=False, tol=1e-11, name="custom"):
        knots = sorted({0.0, 1.0, *(float(h) for h in hints)})
        if knots[0] < 0.0 or knots[-1] > 1.0:
            raise DomainError("integration hints must lie in [0, 1]")
        self._density = density
        self.name = name
        self.tol = tol
        self.knots = np.array(knots)
        self._scale = 1.0
        pieces = [adaptive_simpson(self._f, a, b, tol / len(knots))
                  for a, b in zip(knots[:-1], knots[1:])]
        total = float(sum(pieces))
        if normalize:
            if not total > 0.0:
                raise DomainError("density has no mass on [0, 1]")
            self._scale = 1.0 / total
            pieces = [p / total for p in pieces]
        elif abs(total - 1.0) > 1e-8:
            raise DomainError(f"density integrates to {total!r}, not 1")
        self._cum = np.concatenate([[0.0], np.cumsum(pieces)])
        self._cum[-1] = 1.0

    def params(self):
        return {"name": self.name}

    def to_config(self):
        raise DomainError("custom densities cannot be written as a config fragment")

    def _f(self, x):
        value = float(self._density(x)) * self._scale
        if value < 0.0:
            raise DomainError(f"density is negative at x={x!r}")
        return value

    def _pdf(self, x):
        return np.array([self._f(float(v)) for v in x.ravel()]).reshape(x.shape)

    def _cdf(self, x):
        out = np.empty(x.shape)
        k = np.clip(np.searchsorted(self.knots, x, side="right") - 1, 0, len(self.knots) - 2)
        for idx, (xv, kv) in enumerate(zip(x.ravel(), k.ravel())):
            a = self.knots[kv]
            out.flat[idx] = self._cum[kv] + adaptive_simpson(self._f, a, xv, self.tol)
        return out


_KIND_ALIASES = {
    "uniform": "uniform",
    "beta": "beta",
    "trapezoid": "trapezoid",
    "trapezoidal": "trapezoid",
    "piecewise": "piecewise",
    "piecewise-constant": "piecewise",
    "piecewiseconstant": "piecewise",
}


def _floats(value):
    if isinstance(value, str):
        return [float(v) for v in value.replace(";", ",").split(",") if v.strip()]
    return [float(v) for v in value]


def model_from_config(config):
    """Construct a model from a flat mapping.

    Recognised keys: ``kind`` (uniform, beta, trapezoid, piecewise), ``alpha``,
    ``beta``, ``c``, ``d``, ``delta``, ``breakpoints``, ``densities``. List
    values are comma-separated strings or sequences.
    """
    cfg = {str(k).strip().lower(): v for k, v in config.items()}
    kind = _KIND_ALIASES.get(str(cfg.pop("kind", "")).strip().lower())
    if kind is None:
        raise DomainError(f"unknown or missing distribution kind in {config!r}")
    try:
        if kind == "uniform":
            model = Uniform()
        elif kind == "beta":
            alpha = float(cfg.pop("alpha"))
            model = Beta(alpha, float(cfg.pop("beta", alpha)))
        elif kind == "trapezoid":
            if "delta" in cfg:
                model = Trapezoidal.symmetric(float(cfg.pop("delta")))
            else:
                c = float(cfg.pop("c"))
                model = Trapezoidal(c, float(cfg.pop("d", c + 0.25)))
        else:
            model = PiecewiseConstant(_floats(cfg.pop("breakpoints")),
                                      _floats(cfg.pop("densities")))
    except KeyError as exc:
        raise DomainError(f"{kind} distribution needs key {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"bad {kind} parameters: {exc}") from None
    if cfg:
        raise DomainError(f"unexpected keys for {kind}: {sorted(cfg)}")
    return model


def parse_model(text):
    """Parse a fragment such as ``"kind=beta alpha=2 beta=2"``.

    A bare kind (``"uniform"``) is accepted, as is ``kind:key=value ...``.
    Pairs are separated by whitespace.
    """
    text = text.strip()
    if not text:
        raise DomainError("empty distribution description")
    head, sep, rest = text.partition(":")
    if sep and "=" not in head:
        text = f"kind={head} {rest}"
    elif "=" not in text:
        text = f"kind={text}"
    config = {}
    for token in text.split():
        key, eq, value = token.partition("=")
        if not eq or not key:
            raise DomainError(f"expected key=value, got {token!r}")
        config[key] = value
    return model_from_config(config)


# module-level forms of the model methods

def pdf(model, x):
    return model.pdf(x)


def cdf(model, x):
    return model.cdf(x)


def inverse_cdf(model, u):
    return model.inverse_cdf(u)


def is_symmetric(model, tolerance=1e-9):
    return model.is_symmetric(tolerance)
