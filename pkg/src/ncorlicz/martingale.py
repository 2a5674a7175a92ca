"""Filtrations of subalgebras of M_d, conditional expectations and martingales.

Two filtration models:

* tensor: M_d = M_2^{(x) n}.  Level k keeps the first k+1 tensor factors and
  replaces the rest by their normalized partial trace times the identity.
  Diagonal operators then carry classical dyadic martingales.
* partition: block-diagonal pinchings along an increasing chain of partitions
  of {0, ..., d-1}; the last level is a single block (the full algebra).

``scalar_level=True`` prepends the trivial algebra C.1 as level 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError
from .operators import check, column_square, random_operator, row_square

MARTINGALE_TOL = 1e-10


@dataclass(frozen=True)
class Filtration:
    model: str
    dim: int
    n_factors: int = 0
    partitions: tuple = ()
    scalar_level: bool = False
    _masks: tuple = field(default=(), repr=False, compare=False)

    @classmethod
    def tensor(cls, n_factors: int, scalar_level: bool = False) -> "Filtration":
        if n_factors < 1:
            raise ValueError("tensor filtration needs at least one factor")
        return cls("tensor", 2 ** n_factors, n_factors=n_factors, scalar_level=scalar_level)

    @classmethod
    def partition(cls, levels: Sequence[Sequence[Sequence[int]]], scalar_level: bool = False) -> "Filtration":
        parts = tuple(tuple(tuple(sorted(int(i) for i in block)) for block in level) for level in levels)
        if not parts:
            raise ValueError("partition filtration needs at least one level")
        dim = sum(len(b) for b in parts[-1])
        labels = []
        for k, level in enumerate(parts):
            lab = np.full(dim, -1)
            for j, block in enumerate(level):
                for i in block:
                    if not 0 <= i < dim or lab[i] != -1:
                        raise ValueError(f"level {k} is not a partition of range({dim})")
                    lab[i] = j
            if (lab < 0).any():
                raise ValueError(f"level {k} is not a partition of range({dim})")
            if labels:
                prev = labels[-1]
                # each previous block must sit inside one block of this level
                for j in np.unique(prev):
                    if len(np.unique(lab[prev == j])) != 1:
                        raise ValueError(f"level {k} does not coarsen level {k - 1}")
            labels.append(lab)
        if len(parts[-1]) != 1:
            raise ValueError("last partition level must be a single block")
        masks = tuple(lab[:, None] == lab[None, :] for lab in labels)
        return cls("partition", dim, partitions=parts, scalar_level=scalar_level, _masks=masks)

    @classmethod
    def dyadic_partition(cls, n_factors: int, scalar_level: bool = False) -> "Filtration":
        """Blocks of size 2^k at level k, from singletons up to the full algebra."""
        d = 2 ** n_factors
        levels = [[list(range(i, i + 2 ** k)) for i in range(0, d, 2 ** k)] for k in range(n_factors + 1)]
        return cls.partition(levels, scalar_level=scalar_level)

    @classmethod
    def from_descriptor(cls, desc: dict) -> "Filtration":
        """Build from ``{"model": "tensor", "factors": 4}`` or ``{"model": "partition", "levels": [...]}``."""
        desc = dict(desc)
        model = desc.pop("model", None)
        scalar = bool(desc.pop("scalar_level", False))
        if model == "tensor":
            f = cls.tensor(int(desc.pop("factors")), scalar)
        elif model == "partition":
            if "levels" in desc:
                f = cls.partition(desc.pop("levels"), scalar)
            else:
                f = cls.dyadic_partition(int(desc.pop("factors")), scalar)
        else:
            raise ValueError(f"unknown filtration model {model!r}")
        if desc:
            raise ValueError(f"unknown filtration keys: {sorted(desc)}")
        return f

    def descriptor(self) -> dict:
        if self.model == "tensor":
            out = {"model": "tensor", "factors": self.n_factors}
        else:
            out = {"model": "partition", "levels": [[list(b) for b in lvl] for lvl in self.partitions]}
        if self.scalar_level:
            out["scalar_level"] = True
        return out

    @property
    def n_levels(self) -> int:
        base = self.n_factors if self.model == "tensor" else len(self.partitions)
        return base + int(self.scalar_level)

    def expectation(self, n: int, x) -> np.ndarray:
        """E_n(x), the trace-preserving conditional expectation onto level n."""
        if not 0 <= n < self.n_levels:
            raise IndexError(f"level {n} outside 0..{self.n_levels - 1}")
        x = check(x, self.dim)
        if self.scalar_level:
            if n == 0:
                return np.trace(x) / self.dim * np.eye(self.dim, dtype=complex)
            n -= 1
        if self.model == "partition":
            return np.where(self._masks[n], x, 0)
        keep = 2 ** (n + 1)
        rest = self.dim // keep
        if rest == 1:
            return x.copy()
        reduced = np.einsum("iaja->ij", x.reshape(keep, rest, keep, rest)) / rest
        return np.kron(reduced, np.eye(rest))


def conditional_expectation(f: Filtration, n: int, x) -> np.ndarray:
    return f.expectation(n, x)


@dataclass(frozen=True, eq=False)
class Martingale:
    """Finite martingale stored through its difference sequence."""

    filtration: Filtration
    diffs: tuple

    def __post_init__(self):
        if len(self.diffs) != self.filtration.n_levels:
            raise DimensionError(
                f"need {self.filtration.n_levels} differences, got {len(self.diffs)}"
            )

    @property
    def elements(self) -> list:
        return list(np.cumsum(np.stack(self.diffs), axis=0))

    @property
    def final(self) -> np.ndarray:
        return np.sum(np.stack(self.diffs), axis=0)

    def validate(self, tol: float = MARTINGALE_TOL) -> None:
        """Raise ValueError unless E_n(x_{n+1}) = x_n and E_n(x_n) = x_n."""
        xs = self.elements
        f = self.filtration
        for n, x in enumerate(xs):
            scale = max(1.0, np.linalg.norm(x))
            if np.linalg.norm(f.expectation(n, x) - x) > tol * scale:
                raise ValueError(f"x_{n} is not in level {n}")
            if n + 1 < len(xs) and np.linalg.norm(f.expectation(n, xs[n + 1]) - x) > tol * scale:
                raise ValueError(f"E_{n}(x_{n + 1}) != x_{n}")


def martingale_from_final(f: Filtration, x_final) -> Martingale:
    """x_n = E_n(x_final)."""
    x_final = check(x_final, f.dim)
    xs = [f.expectation(n, x_final) for n in range(f.n_levels)]
    diffs = [xs[0]] + [xs[n] - xs[n - 1] for n in range(1, len(xs))]
    return Martingale(f, tuple(diffs))


def martingale_from_sequence(f: Filtration, xs: Sequence) -> Martingale:
    """Wrap an adapted sequence, checking the martingale property."""
    xs = [check(x, f.dim) for x in xs]
    diffs = [xs[0]] + [xs[n] - xs[n - 1] for n in range(1, len(xs))]
    m = Martingale(f, tuple(diffs))
    m.validate()
    return m


def differences(m: Martingale) -> list:
    return list(m.diffs)


def square_function_col(m: Martingale, n: int | None = None) -> np.ndarray:
    """S_{C,n} = (sum_{k<=n} |dx_k|^2)^(1/2); n defaults to the last level."""
    n = len(m.diffs) - 1 if n is None else n
    return column_square(m.diffs[: n + 1])


def square_function_row(m: Martingale, n: int | None = None) -> np.ndarray:
    n = len(m.diffs) - 1 if n is None else n
    return row_square(m.diffs[: n + 1])


def transform(m: Martingale, alpha: Sequence[complex]) -> Martingale:
    """Martingale transform with differences alpha_n dx_n."""
    alpha = list(alpha)
    if len(alpha) < len(m.diffs):
        raise ValueError(f"symbol needs {len(m.diffs)} entries, got {len(alpha)}")
    if not all(np.isfinite(a) for a in alpha):
        raise ValueError("symbol entries must be finite")
    return Martingale(m.filtration, tuple(a * d for a, d in zip(alpha, m.diffs)))


def stein_map(f: Filtration, a: Sequence) -> list:
    """(E_n(a_n))_n."""
    if len(a) > f.n_levels:
        raise ValueError(f"sequence of length {len(a)} exceeds {f.n_levels} levels")
    return [f.expectation(n, an) for n, an in enumerate(a)]


def martingale_difference_projection(f: Filtration, k: int, y) -> np.ndarray:
    """E_k(y) - E_{k-1}(y): the part of y that is a level-k martingale difference."""
    y = f.expectation(k, y)
    return y - f.expectation(k - 1, y) if k > 0 else y


def random_martingale(f: Filtration, rng: np.random.Generator, hermitian: bool = False,
                      diagonal: bool = False) -> Martingale:
    """Project a complex Gaussian final element through the filtration."""
    if diagonal:
        x = np.diag(rng.standard_normal(f.dim)).astype(complex)
    else:
        x = random_operator(rng, f.dim, hermitian=hermitian)
    return martingale_from_final(f, x)


def filtration_for_dim(dim: int, model: str = "tensor", scalar_level: bool = False) -> Filtration:
    n = int(round(math.log2(dim)))
    if 2 ** n != dim:
        raise ValueError(f"default filtrations need a power-of-two dimension, got {dim}")
    if model == "tensor":
        return Filtration.tensor(n, scalar_level)
    return Filtration.dyadic_partition(n, scalar_level)
