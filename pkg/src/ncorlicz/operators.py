"""Functional calculus on the tracial matrix algebra (M_d, tr/d).

Operators are plain square complex ``numpy`` arrays.  All traces are
normalized so that the identity has trace one.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DimensionError
from .orlicz import OrliczFunction

TIE_TOL = 1e-12


@dataclass(frozen=True)
class TracialMatrixAlgebra:
    """M_d with the normalized trace."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    def trace(self, x) -> complex:
        return trace(check(x, self.dim))

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def zeros(self) -> np.ndarray:
        return np.zeros((self.dim, self.dim), dtype=complex)


def check(x, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite square complex matrix, optionally of a given size."""
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {x.shape}")
    if dim is not None and x.shape[0] != dim:
        raise DimensionError(f"expected dimension {dim}, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("operator has non-finite entries")
    return x


def _same_dim(*xs):
    mats = [check(x) for x in xs]
    dims = {m.shape[0] for m in mats}
    if len(dims) > 1:
        raise DimensionError(f"operators from different algebras: dimensions {sorted(dims)}")
    return mats


def trace(x) -> complex:
    x = np.asarray(x)
    return complex(np.trace(x)) / x.shape[0]


def adjoint(x) -> np.ndarray:
    return check(x).conj().T


def multiply(x, y) -> np.ndarray:
    x, y = _same_dim(x, y)
    return x @ y


def add(x, y) -> np.ndarray:
    x, y = _same_dim(x, y)
    return x + y


def psd_sqrt(h) -> np.ndarray:
    """Square root of a positive semidefinite matrix (negative rounding noise clipped)."""
    h = np.asarray(h, dtype=complex)
    h = (h + h.conj().T) / 2
    w, v = np.linalg.eigh(h)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def abs_op(x) -> np.ndarray:
    """|x| = (x* x)^(1/2)."""
    x = check(x)
    return psd_sqrt(x.conj().T @ x)


def svals(x) -> np.ndarray:
    """Singular values, descending."""
    return np.linalg.svd(np.asarray(x, dtype=complex), compute_uv=False)


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous nonincreasing step function on [0, 1).

    ``values[i]`` holds on ``[breakpoints[i], breakpoints[i+1])``; the last
    breakpoint is 1.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        idx = np.clip(idx, 0, len(self.values) - 1)
        return self.values[idx]

    def integral(self, power: float = 1.0) -> float:
        widths = np.diff(self.breakpoints)
        return float(np.sum(widths * self.values ** power))


def singular_values(x) -> StepFunction:
    """mu_t(x): each singular value occupies an interval of length 1/d."""
    s = svals(check(x))
    d = len(s)
    return StepFunction(np.arange(d + 1) / d, s)


def distribution(x, s: float) -> float:
    """lambda_s(x): normalized count of singular values strictly above s."""
    return float(np.mean(svals(check(x)) > s))


def spectral_projection(x, s: float) -> np.ndarray:
    """Projection onto the eigenspaces of |x| with eigenvalue > s.

    Eigenvalues within ``TIE_TOL * ||x||_inf`` of ``s`` count as <= s.
    """
    x = check(x)
    w, v = np.linalg.eigh(x.conj().T @ x)
    mods = np.sqrt(np.clip(w, 0.0, None))
    scale = mods.max(initial=0.0)
    keep = mods > s + TIE_TOL * scale
    vk = v[:, keep]
    return vk @ vk.conj().T


def trace_phi_moment(phi: OrliczFunction, x) -> float:
    """tau(Phi(|x|)) = (1/d) sum_i Phi(sigma_i)."""
    return float(np.mean(phi(svals(check(x)))))


def layer_cake_trace(phi: OrliczFunction, x) -> float:
    """int_0^inf lambda_s(x) dPhi(s), summed over the jumps of lambda.

    lambda is constant on [u_{j-1}, u_j) between consecutive distinct singular
    values, where it equals the fraction of singular values >= u_j.
    """
    s = np.sort(svals(check(x)))
    d = len(s)
    u = np.unique(s[s > 0])
    if u.size == 0:
        return 0.0
    frac = (d - np.searchsorted(s, u, side="left")) / d
    phis = phi(u)
    jumps = np.diff(np.concatenate([[0.0], phis]))
    return float(np.sum(frac * jumps))


def orlicz_norm(phi: OrliczFunction, x, rtol: float = 1e-10) -> float:
    """Luxemburg norm inf{c > 0 : tau(Phi(|x|/c)) <= 1}."""
    s = svals(check(x))
    if s[0] == 0:
        return 0.0

    def excess(log_c):
        return float(np.mean(phi(s / np.exp(log_c)))) - 1.0

    lo = hi = np.log(s[0])
    while excess(lo) <= 0:
        lo -= 1.0
    while excess(hi) > 0:
        hi += 1.0
    root = brentq(excess, lo, hi, xtol=rtol / 4, rtol=rtol / 4)
    c = float(np.exp(root))
    # step to the side where the modular is <= 1
    while excess(np.log(c)) > 0:
        c *= 1 + rtol / 4
    return c


def lp_norm(x, p: float) -> float:
    s = svals(check(x))
    if np.isinf(p):
        return float(s[0])
    if p <= 0:
        raise ValueError("p must be positive")
    return float(np.mean(s ** p) ** (1.0 / p))


def column_square(xs: Sequence) -> np.ndarray:
    """(sum_k x_k* x_k)^(1/2)."""
    mats = _same_dim(*xs)
    return psd_sqrt(sum(m.conj().T @ m for m in mats))


def row_square(xs: Sequence) -> np.ndarray:
    """(sum_k x_k x_k*)^(1/2)."""
    mats = _same_dim(*xs)
    return psd_sqrt(sum(m @ m.conj().T for m in mats))


def column_square_moment(phi, xs) -> float:
    """tau(Phi((sum |x_k|^2)^(1/2))), via eigenvalues of sum x_k* x_k."""
    mats = _same_dim(*xs)
    return _sqrt_moment(phi, sum(m.conj().T @ m for m in mats))


def row_square_moment(phi, xs) -> float:
    mats = _same_dim(*xs)
    return _sqrt_moment(phi, sum(m @ m.conj().T for m in mats))


def _sqrt_moment(phi, h):
    w = np.linalg.eigvalsh((h + h.conj().T) / 2)
    return float(np.mean(phi(np.sqrt(np.clip(w, 0.0, None)))))


def hermitian_parts(x) -> tuple[np.ndarray, np.ndarray]:
    """(y, z) Hermitian with x = y + i z."""
    x = check(x)
    xs = x.conj().T
    return (x + xs) / 2, (x - xs) / 2j


def random_operator(rng: np.random.Generator, dim: int, hermitian: bool = False) -> np.ndarray:
    """Complex Gaussian matrix with E|x_ij|^2 = 1, optionally Hermitized."""
    x = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    if hermitian:
        x = (x + x.conj().T) / np.sqrt(2)
    return x


# matrix exchange format: {"dim": d, "entries": [[re, im], ...]} row-major


def to_json(x) -> str:
    x = check(x)
    entries = [[float(v.real), float(v.imag)] for v in x.ravel()]
    return json.dumps({"dim": x.shape[0], "entries": entries})


def from_json(text: str) -> np.ndarray:
    obj = json.loads(text)
    d = int(obj["dim"])
    entries = obj["entries"]
    if len(entries) != d * d:
        raise DimensionError(f"expected {d * d} entries for dim {d}, got {len(entries)}")
    arr = np.array([complex(re, im) for re, im in entries], dtype=complex)
    return check(arr.reshape(d, d), d)
