"""Phi-moment interpolation for operators of weak types (p0, p0) and (p1, p1).

The certified constant follows the layer-cake argument::

    tau(Phi(|Tx|)) = int lambda_{2a}(Tx) dPhi(2a)
                  <= int [A0^p0 a^-p0 ||x0^a||_p0^p0 + A1^p1 a^-p1 ||x1^a||_p1^p1] dPhi(2a)

with x = x0^a + x1^a split at the spectral level a of |x|.  Bounding
dPhi(2a) <= D K Phi(a) da/a (D = sup t Phi'/Phi, K = Delta_2 constant) and
the two a-integrals by the index integral bounds B0(p0), B1(p1) gives

    C = D K (A0^p0 B0(p0) + A1^p1 B1(p1)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import RegimeError
from .martingale import martingale_from_final, stein_map, transform
from .operators import check, spectral_projection, svals, trace_phi_moment
from .orlicz import (
    OrliczFunction,
    delta2_constant,
    elasticity_sup,
    growth_function,
    index_integral_bound_high,
    index_integral_bound_low,
    indices,
)

DEGENERATE_MODULAR = 1e-14


@dataclass(frozen=True, eq=False)
class SublinearOperator:
    """A map on operators with optional declared weak-type data."""

    func: Callable[[np.ndarray], np.ndarray]
    name: str = "T"
    p0: float | None = None
    A0: float | None = None
    p1: float | None = None
    A1: float | None = None
    serial: bool = False

    def __post_init__(self):
        if self.p0 is not None and self.p1 is not None and not self.p0 < self.p1:
            raise ValueError("need p0 < p1")
        for a in (self.A0, self.A1):
            if a is not None and a <= 0:
                raise ValueError("weak-type constants must be positive")

    def __call__(self, x):
        return self.func(x)


def split(x, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """x0 = x E_(alpha, inf)(|x|) and x1 = x - x0, so that ||x1||_inf <= alpha."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    x = check(x)
    x0 = x @ spectral_projection(x, alpha)
    return x0, x - x0


def _weak_sup(y, p):
    """sup_a a^p lambda_a(y): the supremum over a of a step distribution,
    approached as a increases to each singular value."""
    s = svals(y)
    d = len(s)
    return float(np.max(s ** p * np.arange(1, d + 1) / d))


def _weak_grid(y, p, scale, n_alpha):
    s = svals(y)
    alphas = np.geomspace(1e-3, 1e3, n_alpha) * scale
    lam = np.mean(s[None, :] > alphas[:, None], axis=1)
    return float(np.max(alphas ** p * lam))


def weak_type_ratio(T: Callable, p: float, ensemble: Sequence, n_alpha: int | None = None) -> float:
    """sup over x in the ensemble and alpha of alpha^p lambda_alpha(|Tx|) / ||x||_p^p.

    This is the measured A^p.  With ``n_alpha=None`` the sup over alpha is exact
    (attained as a left limit at the singular values of Tx); otherwise alpha
    runs over ``n_alpha`` log-spaced points in [1e-3, 1e3] * ||x||_p.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    best = 0.0
    for x in ensemble:
        s = svals(x)
        norm_pp = float(np.mean(s ** p))
        if norm_pp == 0:
            continue
        y = T(x)
        if n_alpha is None:
            num = _weak_sup(y, p)
        else:
            num = _weak_grid(y, p, norm_pp ** (1 / p), n_alpha)
        best = max(best, num / norm_pp)
    return best


def weak_type_constant(T: Callable, p: float, ensemble: Sequence, n_alpha: int | None = None) -> float:
    """Measured A, i.e. ``weak_type_ratio(...) ** (1/p)``."""
    return weak_type_ratio(T, p, ensemble, n_alpha) ** (1.0 / p)


def check_regime(phi: OrliczFunction, p0: float, p1: float) -> None:
    idx = indices(phi)
    if not p0 < idx.p_phi:
        raise RegimeError(f"need p0 < p_Phi, got p0={p0} and p_Phi={idx.p_phi:.6g}")
    if not idx.q_phi < p1:
        raise RegimeError(f"need q_Phi < p1, got q_Phi={idx.q_phi:.6g} and p1={p1}")


def certified_constant(phi: OrliczFunction, p0: float, p1: float, A0: float, A1: float) -> float:
    """C with tau(Phi(|Tx|)) <= C tau(Phi(|x|)) for T of weak types (p0, A0), (p1, A1).

    ``p1 = inf`` means ||Tx||_inf <= A1 ||x||_inf; then
    C = D M(A1, Phi) (A0/A1)^p0 B0(p0).
    """
    check_regime(phi, p0, p1)
    D = elasticity_sup(phi)
    B0 = index_integral_bound_low(phi, p0)
    if math.isinf(p1):
        return D * growth_function(phi, A1) * (A0 / A1) ** p0 * B0
    K = delta2_constant(phi)
    B1 = index_integral_bound_high(phi, p1)
    return D * K * (A0 ** p0 * B0 + A1 ** p1 * B1)


def auto_exponents(phi: OrliczFunction) -> tuple[float, float]:
    """Default (p0, p1) = ((1 + p_Phi)/2, 2 q_Phi)."""
    idx = indices(phi)
    return (1.0 + idx.p_phi) / 2.0, 2.0 * idx.q_phi


def split_pieces(ensemble: Sequence, quantiles=(0.25, 0.5, 0.75)) -> list:
    """Ensemble members together with their split pieces at singular-value quantiles.

    The weak-type bounds in the layer-cake argument are applied to the pieces
    x0^a, x1^a, so constants are measured on them as well.
    """
    out = []
    for x in ensemble:
        out.append(x)
        s = svals(x)
        for q in quantiles:
            x0, x1 = split(x, float(np.quantile(s, q)))
            out.extend([x0, x1])
    return out


@dataclass
class InterpolationResult:
    ratios: list
    lhs: list
    rhs: list
    skipped: int
    A0: float
    A1: float
    p0: float
    p1: float
    constant: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = all(r <= self.constant for r in self.ratios)

    @property
    def max_ratio(self) -> float:
        return max(self.ratios, default=math.nan)


def verify_interpolation(T: Callable, phi: OrliczFunction, p0: float, p1: float,
                         ensemble: Sequence, A0: float | None = None,
                         A1: float | None = None) -> InterpolationResult:
    """Compare every ratio tau(Phi(|Tx|))/tau(Phi(|x|)) with the certified constant.

    A0, A1 are measured on the ensemble and its split pieces unless given.
    """
    check_regime(phi, p0, p1)
    pieces = None
    if A0 is None or A1 is None:
        pieces = split_pieces(ensemble)
    if A0 is None:
        A0 = weak_type_constant(T, p0, pieces)
    if A1 is None:
        if math.isinf(p1):
            A1 = max(svals(T(x))[0] / svals(x)[0] for x in pieces if svals(x)[0] > 0)
        else:
            A1 = weak_type_constant(T, p1, pieces)
    C = certified_constant(phi, p0, p1, A0, A1)
    ratios, lhs, rhs = [], [], []
    skipped = 0
    for x in ensemble:
        den = trace_phi_moment(phi, x)
        if den < DEGENERATE_MODULAR:
            skipped += 1
            continue
        num = trace_phi_moment(phi, T(x))
        lhs.append(num)
        rhs.append(den)
        ratios.append(num / den)
    return InterpolationResult(ratios, lhs, rhs, skipped, A0, A1, p0, p1, C)


# linear maps used by the verifiers


def transform_operator(filtration, alpha) -> SublinearOperator:
    """x -> sum_n alpha_n dx_n for the martingale generated by x."""
    alpha = list(alpha)

    def func(x):
        # x + sum (alpha_n - 1) dx_n: bit-exact for alpha = 1
        m = martingale_from_final(filtration, x)
        delta = transform(m, [a - 1 for a in alpha])
        return np.asarray(x, dtype=complex) + sum(d for a, d in zip(alpha, delta.diffs) if a != 1)

    return SublinearOperator(func, name="transform")


def column_embed(a: Sequence) -> np.ndarray:
    """Column matrix with blocks a_0, a_1, ... in the first block column."""
    n, d = len(a), a[0].shape[0]
    out = np.zeros((n * d, n * d), dtype=complex)
    for k, ak in enumerate(a):
        out[k * d:(k + 1) * d, :d] = ak
    return out


def row_embed(a: Sequence) -> np.ndarray:
    n, d = len(a), a[0].shape[0]
    out = np.zeros((n * d, n * d), dtype=complex)
    for k, ak in enumerate(a):
        out[:d, k * d:(k + 1) * d] = ak
    return out


def column_blocks(x, n: int) -> list:
    d = x.shape[0] // n
    return [x[k * d:(k + 1) * d, :d] for k in range(n)]


def row_blocks(x, n: int) -> list:
    d = x.shape[0] // n
    return [x[:d, k * d:(k + 1) * d] for k in range(n)]


def stein_operator(filtration, row: bool = False) -> SublinearOperator:
    """The Stein map acting on column (or row) embedded sequences.

    On the embedding algebra the normalized trace is rescaled by the number of
    levels; the modular ratios and weak-type ratios are invariant under this.
    """
    n = filtration.n_levels
    blocks, embed = (row_blocks, row_embed) if row else (column_blocks, column_embed)

    def func(x):
        return embed(stein_map(filtration, blocks(x, n)))

    return SublinearOperator(func, name="stein_row" if row else "stein_col")


def identity_operator() -> SublinearOperator:
    return SublinearOperator(lambda x: np.array(x, dtype=complex), name="identity")
