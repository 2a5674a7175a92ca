"""Parametric Orlicz functions and their growth descriptors.

Three closed families are supported::

    Power(p)        t^p                          p >= 1
    PowerLog(a, b)  t^a log(1 + t^b)             a > 1, b > 0
    PowerSin(p, c)  t^p (1 + c sin(p log t))     0 < c < 1/2, p > 1/(1 - 2c)

Every family evaluates in log coordinates (``log_value``) so that growth
ratios Phi(ts)/Phi(s) stay finite far outside the range where Phi itself
would overflow or underflow.  ``CustomOrlicz`` wraps an arbitrary callable
for tests; it carries no index guarantees.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import quad_vec

from .errors import DivergentIntegralError, InvalidParameterError

# (lower, upper, points): log-uniform grid for sups over s or t
STANDARD_GRID = (1e-6, 1e6, 2000)
# wide grid for index extrapolation; log factors converge too slowly on STANDARD_GRID
INDEX_GRID = (1e-60, 1e60, 20001)
INDEX_T_LOW = (1e-3, 1e-4, 1e-5)
INDEX_T_HIGH = (1e3, 1e4, 1e5)
UNBOUNDED_THRESHOLD = 1e12
QUAD_TOL = 1e-10


def _log_grid(grid=STANDARD_GRID) -> np.ndarray:
    lo, hi, n = grid
    return np.linspace(math.log(lo), math.log(hi), n)


def _log_softplus_log(z):
    """log(log(1 + e^z)), stable for large |z|."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = z < -30.0
    out[small] = z[small]
    big = ~small
    out[big] = np.log(np.logaddexp(0.0, z[big]))
    return out


class OrliczFunction:
    """Base class. Subclasses define ``log_value`` and ``elasticity``."""

    family = "abstract"

    def log_value(self, log_t):
        raise NotImplementedError

    def elasticity(self, t):
        """t Phi'(t) / Phi(t) for t > 0."""
        raise NotImplementedError

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("Orlicz functions are evaluated on t >= 0")
        out = np.zeros_like(t)
        pos = t > 0
        with np.errstate(over="ignore"):
            out[pos] = np.exp(self.log_value(np.log(t[pos])))
        return out if out.ndim else float(out)

    def derivative(self, t):
        """Right derivative Phi'(t); the limit from the right at t = 0."""
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, self._derivative_at_zero())
        pos = t > 0
        tp = t[pos]
        out[pos] = self.elasticity(tp) * self(tp) / tp
        return out if out.ndim else float(out)

    def _derivative_at_zero(self) -> float:
        return 0.0

    def spec(self) -> str:
        """Mini-language string that ``parse_phi`` maps back to this function."""
        raise NotImplementedError


@dataclass(frozen=True)
class Power(OrliczFunction):
    p: float
    family = "power"

    def __post_init__(self):
        if not (math.isfinite(self.p) and self.p >= 1):
            raise InvalidParameterError(f"power: p must be >= 1, got p={self.p}")

    def log_value(self, log_t):
        return self.p * np.asarray(log_t, dtype=float)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("Orlicz functions are evaluated on t >= 0")
        with np.errstate(over="ignore"):
            out = t ** self.p
        return out if out.ndim else float(out)

    def elasticity(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.p)

    def _derivative_at_zero(self):
        return 1.0 if self.p == 1 else 0.0

    def spec(self):
        return f"power:p={self.p!r}"


@dataclass(frozen=True)
class PowerLog(OrliczFunction):
    a: float
    b: float
    family = "powerlog"

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 1):
            raise InvalidParameterError(f"powerlog: a must be > 1, got a={self.a}")
        if not (math.isfinite(self.b) and self.b > 0):
            raise InvalidParameterError(f"powerlog: b must be > 0, got b={self.b}")

    def log_value(self, log_t):
        log_t = np.asarray(log_t, dtype=float)
        return self.a * log_t + _log_softplus_log(self.b * log_t)

    def elasticity(self, t):
        t = np.asarray(t, dtype=float)
        z = self.b * np.log(t)
        # u / ((1 + u) log(1 + u)) with u = t^b, written to survive u -> 0 and u -> inf
        with np.errstate(over="ignore", under="ignore"):
            u = np.exp(np.minimum(z, 700.0))
            frac = np.where(
                z < -30.0,
                1.0 - u / 2.0,
                u / ((1.0 + u) * np.log1p(u)),
            )
            frac = np.where(z > 700.0, 1.0 / z, frac)
        return self.a + self.b * frac

    def spec(self):
        return f"powerlog:a={self.a!r},b={self.b!r}"


@dataclass(frozen=True)
class PowerSin(OrliczFunction):
    p: float
    c: float
    family = "powersin"

    def __post_init__(self):
        if not (0 < self.c < 0.5):
            raise InvalidParameterError(f"powersin: c must lie in (0, 1/2), got c={self.c}")
        if not self.p > 1.0 / (1.0 - 2.0 * self.c):
            raise InvalidParameterError(
                f"powersin: p must exceed 1/(1-2c) = {1.0 / (1.0 - 2.0 * self.c)}, got p={self.p}"
            )

    def log_value(self, log_t):
        log_t = np.asarray(log_t, dtype=float)
        return self.p * log_t + np.log1p(self.c * np.sin(self.p * log_t))

    def elasticity(self, t):
        theta = self.p * np.log(np.asarray(t, dtype=float))
        s, co = np.sin(theta), np.cos(theta)
        return self.p * (1.0 + self.c * s + self.c * co) / (1.0 + self.c * s)

    def spec(self):
        return f"powersin:p={self.p!r},c={self.c!r}"


@dataclass(frozen=True, eq=False)
class CustomOrlicz(OrliczFunction):
    """Test-only wrapper around an arbitrary increasing convex callable."""

    func: Callable = field(repr=False)
    name: str = "custom"
    family = "custom"

    def log_value(self, log_t):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            return np.log(np.asarray(self.func(np.exp(np.asarray(log_t, dtype=float))), dtype=float))

    def elasticity(self, t):
        t = np.asarray(t, dtype=float)
        h = 1e-6
        with np.errstate(over="ignore", invalid="ignore"):
            return (self.log_value(np.log(t) + h) - self.log_value(np.log(t) - h)) / (2 * h)

    def spec(self):
        return f"custom:{self.name}"


_FAMILIES = {"power": (Power, ("p",)), "powerlog": (PowerLog, ("a", "b")), "powersin": (PowerSin, ("p", "c"))}


def parse_phi(text: str) -> OrliczFunction:
    """Parse ``power:p=2``, ``powerlog:a=1.2,b=0.5`` or ``powersin:p=4,c=0.2``."""
    family, sep, rest = text.strip().partition(":")
    family = family.strip().lower()
    if family not in _FAMILIES:
        raise InvalidParameterError(f"unknown Orlicz family {family!r} in {text!r}")
    cls, names = _FAMILIES[family]
    values = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        key = key.strip()
        if not eq:
            raise InvalidParameterError(f"malformed parameter {item!r} in {text!r} (expected key=value)")
        if key not in names:
            raise InvalidParameterError(f"unknown key {key!r} for family {family!r}")
        if key in values:
            raise InvalidParameterError(f"duplicate key {key!r} in {text!r}")
        try:
            values[key] = float(val)
        except ValueError:
            raise InvalidParameterError(f"key {key!r} has non-numeric value {val.strip()!r}") from None
    missing = [k for k in names if k not in values]
    if missing:
        raise InvalidParameterError(f"missing key {missing[0]!r} for family {family!r}")
    return cls(**values)


# ---------------------------------------------------------------------------
# growth descriptors


def growth_function(phi: OrliczFunction, t: float, grid=STANDARD_GRID) -> float:
    """M(t, Phi) = sup_s Phi(ts)/Phi(s), estimated on a log-uniform s-grid."""
    return math.exp(float(_log_growth(phi, math.log(t), grid)[0][0]))


def _log_growth(phi, log_t, grid):
    ls = _log_grid(grid)
    base = phi.log_value(ls)
    ok = np.isfinite(base)
    clamped = not ok.all()
    log_t = np.atleast_1d(np.asarray(log_t, dtype=float))
    ratios = phi.log_value(ls[ok][None, :] + log_t[:, None]) - base[ok][None, :]
    ratios = np.where(np.isfinite(ratios), ratios, np.nan)
    if np.isnan(ratios).any():
        clamped = True
    with np.errstate(invalid="ignore"):
        out = np.nanmax(ratios, axis=1)
    return out, clamped


@dataclass(frozen=True)
class IndexEstimate:
    p_phi: float
    q_phi: float
    s_grid: tuple
    t_low: tuple
    t_high: tuple
    residual_low: float
    residual_high: float
    clamped: bool = False


@lru_cache(maxsize=256)
def indices(phi: OrliczFunction) -> IndexEstimate:
    """Estimate the Matuszewska indices (p_Phi, q_Phi).

    log M(t) is regressed on log t through the origin (M(1) = 1 exactly) over
    three decades on each side.
    """

    def fit(ts):
        lt = np.log(np.asarray(ts))
        lm, clamped = _log_growth(phi, lt, INDEX_GRID)
        slope = float(lt @ lm / (lt @ lt))
        resid = float(np.max(np.abs(lm - slope * lt)))
        return slope, resid, clamped

    p, rp, c0 = fit(INDEX_T_LOW)
    q, rq, c1 = fit(INDEX_T_HIGH)
    p = max(p, 1.0)
    q = max(q, p) if math.isfinite(q) else math.inf
    return IndexEstimate(p, q, INDEX_GRID, INDEX_T_LOW, INDEX_T_HIGH, rp, rq, c0 or c1)


@lru_cache(maxsize=256)
def delta2_constant(phi: OrliczFunction) -> float:
    """sup_t Phi(2t)/Phi(t) over the standard grid; ``math.inf`` if unbounded."""
    lt = _log_grid()
    with np.errstate(invalid="ignore"):
        r = phi.log_value(lt + math.log(2.0)) - phi.log_value(lt)
    if not np.all(np.isfinite(r)):
        return math.inf
    k = math.exp(float(np.max(r)))
    return k if k <= UNBOUNDED_THRESHOLD else math.inf


@lru_cache(maxsize=256)
def elasticity_sup(phi: OrliczFunction) -> float:
    """sup_t t Phi'(t)/Phi(t) over the standard grid."""
    with np.errstate(invalid="ignore", over="ignore"):
        e = phi.elasticity(np.exp(_log_grid()))
    return float(np.max(e)) if np.all(np.isfinite(e)) else math.inf


def _index_bound(phi, exponent, sign):
    lt = _log_grid()
    base = phi.log_value(lt)

    def integrand(w):
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(sign * exponent * w + phi.log_value(lt - sign * w) - base)

    vals, _ = quad_vec(integrand, 0.0, np.inf, epsabs=QUAD_TOL, epsrel=QUAD_TOL)
    return float(np.max(vals))


@lru_cache(maxsize=256)
def index_integral_bound_low(phi: OrliczFunction, p: float) -> float:
    """sup_t t^p (int_0^t s^(-p-1) Phi(s) ds) / Phi(t) over the standard grid.

    Finite exactly when p < p_Phi. Computed after substituting s = t e^(-w),
    which turns each ratio into int_0^inf e^(p w) Phi(t e^(-w))/Phi(t) dw.
    """
    if p >= indices(phi).p_phi - 1e-9:
        raise DivergentIntegralError(f"p={p} >= p_Phi={indices(phi).p_phi:.6g}: integral diverges at 0")
    val = _index_bound(phi, p, +1.0)
    if not math.isfinite(val):
        raise DivergentIntegralError(f"low index integral is not finite for p={p}")
    return val


@lru_cache(maxsize=256)
def index_integral_bound_high(phi: OrliczFunction, q: float) -> float:
    """sup_t t^q (int_t^inf s^(-q-1) Phi(s) ds) / Phi(t); finite exactly when q > q_Phi."""
    if q <= indices(phi).q_phi + 1e-9:
        raise DivergentIntegralError(f"q={q} <= q_Phi={indices(phi).q_phi:.6g}: integral diverges at infinity")
    val = _index_bound(phi, q, -1.0)
    if not math.isfinite(val):
        raise DivergentIntegralError(f"high index integral is not finite for q={q}")
    return val
