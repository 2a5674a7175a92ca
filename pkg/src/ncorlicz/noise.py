"""Rademacher averages and operator-valued trigonometric polynomials."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError
from .operators import check
from .orlicz import OrliczFunction

EXACT_MAX_TERMS = 14
LACUNARY_MAX_TERMS = 20


def _batched_phi_moment(phi, ys):
    """tau(Phi(|y|)) for a stack of matrices, via eigenvalues of y* y."""
    h = np.conj(np.swapaxes(ys, -1, -2)) @ ys
    w = np.linalg.eigvalsh(h)
    return np.mean(phi(np.sqrt(np.clip(w, 0.0, None))), axis=-1)


def _canonical(xs):
    """Sign-normalize each term and sort, so the average is bit-invariant
    under permutations and sign flips of the input."""
    out = []
    for x in xs:
        x = np.ascontiguousarray(x)
        flat = x.view(float).ravel()
        nz = np.flatnonzero(flat)
        if nz.size and flat[nz[0]] < 0:
            x = -x
        out.append(x)
    out.sort(key=lambda m: m.tobytes())
    return out


def _sign_matrix(n):
    idx = np.arange(2 ** n)[:, None]
    bits = (idx >> np.arange(n)[None, :]) & 1
    return 1.0 - 2.0 * bits


def rademacher_phi_moment(phi: OrliczFunction, xs: Sequence, mode: str = "exact",
                          samples: int = 4096, seed: int = 0) -> float:
    """E tau(Phi(|sum_k eps_k x_k|)) over independent random signs.

    ``mode="exact"`` averages all 2^n sign patterns (n <= 14);
    ``mode="mc"`` draws ``samples`` seeded patterns.
    """
    if mode == "exact":
        return _rademacher_exact(phi, xs)
    if mode == "mc":
        return rademacher_phi_moment_mc(phi, xs, samples, seed)[0]
    raise ValueError(f"unknown Rademacher mode {mode!r}")


def _stack(xs):
    if len(xs) == 0:
        raise ValueError("need at least one operator")
    mats = [check(x) for x in xs]
    if len({m.shape for m in mats}) != 1:
        raise DimensionError("operators from different algebras")
    return mats


def _rademacher_exact(phi, xs):
    mats = _stack(xs)
    n = len(mats)
    if n > EXACT_MAX_TERMS:
        raise ValueError(
            f"exact enumeration is limited to {EXACT_MAX_TERMS} terms (got {n}); use mode='mc'"
        )
    mats = np.stack(_canonical(mats))
    # eps and -eps give the same modulus, so fix the first sign to +1
    signs = _sign_matrix(n - 1)
    signs = np.hstack([np.ones((len(signs), 1)), signs])
    vals = []
    for start in range(0, len(signs), 1024):
        ys = np.einsum("sk,kij->sij", signs[start:start + 1024], mats)
        vals.extend(_batched_phi_moment(phi, ys).tolist())
    return math.fsum(vals) / len(vals)


def rademacher_phi_moment_mc(phi: OrliczFunction, xs: Sequence, samples: int, seed: int) -> tuple[float, float]:
    """Monte Carlo estimate and its standard error."""
    mats = np.stack(_stack(xs))
    rng = np.random.default_rng(seed)
    signs = rng.choice([-1.0, 1.0], size=(samples, len(mats)))
    vals = np.concatenate([
        _batched_phi_moment(phi, np.einsum("sk,kij->sij", signs[i:i + 1024], mats))
        for i in range(0, samples, 1024)
    ])
    stderr = float(np.std(vals, ddof=1) / math.sqrt(samples)) if samples > 1 else math.inf
    return float(np.mean(vals)), stderr


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """f(z) = sum_k c_k z^k with operator coefficients c_k in M_d."""

    dim: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        for k, c in self.coeffs.items():
            check(c, self.dim)
            if not isinstance(k, (int, np.integer)):
                raise TypeError("frequencies must be integers")

    @property
    def frequencies(self) -> list:
        return sorted(self.coeffs)

    def max_abs_frequency(self) -> int:
        return max((abs(k) for k in self.coeffs), default=0)

    def __call__(self, z):
        """Evaluate at one point or a 1-D array of points on the circle."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.zeros((len(z), self.dim, self.dim), dtype=complex)
        for k, c in self.coeffs.items():
            out += (z ** k)[:, None, None] * c
        return out

    def values_at_roots(self, n_points: int) -> np.ndarray:
        """f(w^j), j < n_points, with w = exp(2 pi i / n_points)."""
        j = np.arange(n_points)
        out = np.zeros((n_points, self.dim, self.dim), dtype=complex)
        for k, c in self.coeffs.items():
            phase = np.exp(2j * np.pi * ((j * k) % n_points) / n_points)
            out += phase[:, None, None] * c
        return out


def lacunary_embed(xs: Sequence, dim: int | None = None) -> TrigPolynomial:
    """sum_k x_k z^(3^k)."""
    if len(xs) > LACUNARY_MAX_TERMS:
        raise ValueError(f"at most {LACUNARY_MAX_TERMS} terms (frequency 3^{LACUNARY_MAX_TERMS})")
    mats = [check(x) for x in xs]
    if dim is None:
        if not mats:
            raise ValueError("dim is required for an empty sequence")
        dim = mats[0].shape[0]
    return TrigPolynomial(dim, {3 ** k: m for k, m in enumerate(mats)})


def in_block(freq: int, n: int) -> bool:
    """freq in I_n = (3^n / 2, 3^n]."""
    return 2 * freq > 3 ** n and freq <= 3 ** n


def multiplier_block(f: TrigPolynomial, n: int) -> TrigPolynomial:
    """Fourier multiplier by the indicator of I_n."""
    if n < 0:
        raise ValueError("block index must be nonnegative")
    return TrigPolynomial(f.dim, {k: c for k, c in f.coeffs.items() if in_block(k, n)})


def _blocks(f):
    """Indices n of all blocks I_n containing a frequency of f."""
    out = set()
    for k in f.coeffs:
        if k >= 1:
            n = 0
            while 3 ** n < k:
                n += 1
            if in_block(k, n):
                out.add(n)
    return sorted(out)


def _check_quad(f, quad_points):
    need = 2 * f.max_abs_frequency() + 1
    if quad_points is None:
        return need
    if quad_points < need:
        raise ValueError(f"need at least {need} quadrature points for this polynomial, got {quad_points}")
    return int(quad_points)


def circle_phi_average(phi: OrliczFunction, f: TrigPolynomial, quad_points: int | None = None) -> float:
    """int_T tau(Phi(|f(z)|)) dm(z) by the rectangle rule at roots of unity."""
    n = _check_quad(f, quad_points)
    vals = np.concatenate([
        _batched_phi_moment(phi, f_chunk) for f_chunk in _chunks(f.values_at_roots(n))
    ])
    return math.fsum(vals.tolist()) / n


def circle_refinement_error(phi: OrliczFunction, f: TrigPolynomial, quad_points: int | None = None) -> float:
    """|A_N - A_2N| / A_2N for the circle average."""
    n = _check_quad(f, quad_points)
    a, b = circle_phi_average(phi, f, n), circle_phi_average(phi, f, 2 * n)
    return abs(a - b) / b if b else abs(a - b)


def _chunks(arr, size=4096):
    for i in range(0, len(arr), size):
        yield arr[i:i + size]


def block_square_moment(phi: OrliczFunction, f: TrigPolynomial, quad_points: int | None = None) -> float:
    """int_T tau(Phi[(sum_n |Delta_n f(z)|^2)^(1/2)]) dm(z)."""
    n = _check_quad(f, quad_points)
    blocks = _blocks(f)
    if not blocks:
        return 0.0
    h = np.zeros((n, f.dim, f.dim), dtype=complex)
    for b in blocks:
        vals = multiplier_block(f, b).values_at_roots(n)
        h += np.conj(np.swapaxes(vals, -1, -2)) @ vals
    w = np.linalg.eigvalsh(h)
    per_point = np.mean(phi(np.sqrt(np.clip(w, 0.0, None))), axis=-1)
    return math.fsum(per_point.tolist()) / n
