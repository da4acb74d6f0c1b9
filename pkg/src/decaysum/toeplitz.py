"""Lower-triangular Toeplitz square roots of M_f and the sliding-window block layout."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .decay import DecayFunction, constant
from .errors import DimensionError, DomainError, SizeGuardError
from .series import coefficients

DENSE_LIMIT = 8192


@dataclass(frozen=True)
class ToeplitzFactor:
    """Lower-triangular Toeplitz L given by its first column r(1..T), r(1) = 1."""

    first_column: np.ndarray

    def __post_init__(self):
        r = np.array(self.first_column, dtype=float)
        if r.ndim != 1 or r.size == 0:
            raise DimensionError("first column must be a non-empty vector")
        r.setflags(write=False)
        object.__setattr__(self, "first_column", r)

    @property
    def horizon(self) -> int:
        return self.first_column.size

    @property
    def column_norm(self) -> float:
        """||L||_{1->2} = sqrt(sum r(i)**2)."""
        return math.sqrt(math.fsum(self.first_column**2))

    def prefix_norms_sq(self) -> np.ndarray:
        """sum_{i<=t} r(i)**2 for t = 1..T, i.e. the diagonal of L L^T."""
        return np.cumsum(self.first_column**2)

    def dense(self) -> np.ndarray:
        return lower_toeplitz(self.first_column)


def lower_toeplitz(column) -> np.ndarray:
    """Dense lower-triangular Toeplitz matrix with the given first column."""
    c = np.asarray(column, dtype=float)
    T = c.size
    if T > DENSE_LIMIT:
        raise SizeGuardError(f"refusing to build a dense {T}x{T} matrix (limit {DENSE_LIMIT})")
    idx = np.arange(T)[:, None] - np.arange(T)[None, :]
    out = np.zeros((T, T))
    mask = idx >= 0
    out[mask] = c[idx[mask]]
    return out


def build_factor(f: DecayFunction, T: int) -> ToeplitzFactor:
    """Factor L with r(i) = a_{i-1}; L @ L equals M_f."""
    if f.is_window:
        raise DomainError("sliding-window decay: use build_block_factor")
    if T < 1:
        raise DomainError("T must be >= 1")
    return ToeplitzFactor(coefficients(f, T).coeffs)


def toeplitz_matvec(factor: ToeplitzFactor, x) -> np.ndarray:
    """out[t] = sum_{i<=t} r(t-i+1) x[i], computed as a direct convolution."""
    x = np.asarray(x, dtype=float)
    if x.shape != (factor.horizon,):
        raise DimensionError(f"expected a vector of length {factor.horizon}, got shape {x.shape}")
    return np.convolve(factor.first_column, x)[: factor.horizon]


def reconstruct_mf(factor: ToeplitzFactor) -> np.ndarray:
    """Dense L @ L (test helper; quadratic memory)."""
    L = lower_toeplitz(factor.first_column)
    return L @ L


def mf_matrix(f: DecayFunction, T: int) -> np.ndarray:
    """Dense M_f with entries f(i - j + 1) on and below the diagonal."""
    return lower_toeplitz(f.values(T))


def symbol_product(a, b, T: int | None = None) -> np.ndarray:
    """First column of the product of two lower Toeplitz operators (symbol product)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    T = min(a.size, b.size) if T is None else T
    return np.convolve(a, b)[:T]


@dataclass(frozen=True)
class BlockFactor:
    """Block-diagonal factor with copies of the w x w counting square root."""

    window: int
    horizon: int
    base_factor: ToeplitzFactor

    @property
    def block_count(self) -> int:
        return -(-self.horizon // self.window)

    @property
    def tail_size(self) -> int:
        return self.horizon % self.window

    @property
    def column_norm(self) -> float:
        return self.base_factor.column_norm

    def block_sizes(self) -> list[int]:
        full, tail = divmod(self.horizon, self.window)
        return [self.window] * full + ([tail] if tail else [])

    def matvec(self, x) -> np.ndarray:
        """Apply the block-diagonal factor to a length-T vector."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.horizon,):
            raise DimensionError(f"expected a vector of length {self.horizon}, got shape {x.shape}")
        r = self.base_factor.first_column
        out = np.empty_like(x)
        for start in range(0, self.horizon, self.window):
            blk = x[start : start + self.window]
            out[start : start + blk.size] = np.convolve(r[: blk.size], blk)[: blk.size]
        return out

    def dense(self) -> np.ndarray:
        if self.horizon > DENSE_LIMIT:
            raise SizeGuardError(f"refusing to build a dense {self.horizon}x{self.horizon} matrix")
        out = np.zeros((self.horizon, self.horizon))
        L1 = self.base_factor.dense()
        for start in range(0, self.horizon, self.window):
            k = min(self.window, self.horizon - start)
            out[start : start + k, start : start + k] = L1[:k, :k]
        return out


def build_block_factor(w: int, T: int) -> BlockFactor:
    """Block factor for window w over horizon T; a short tail block uses the
    leading principal submatrix of the counting factor."""
    if w < 1:
        raise DomainError("window must be >= 1")
    if T < 1:
        raise DomainError("T must be >= 1")
    if w > T:
        raise DomainError(f"window {w} exceeds horizon {T}")
    return BlockFactor(w, T, build_factor(constant(), w))


def counting_norm_cap(w: int) -> float:
    """1 + log(w)/pi + 2/w.

    Only an upper bound on the squared column norm of the counting factor for
    w <= 31; from w = 32 on the true value exceeds it (the excess tends to
    about 0.066). See :func:`counting_harmonic_cap` for a cap valid for all w.
    """
    return 1.0 + math.log(w) / math.pi + 2.0 / w


def counting_harmonic_cap(w: int) -> float:
    """1 + H_{w-1}/pi, valid for every w since a_n <= 1/sqrt(pi n)."""
    return 1.0 + math.fsum(1.0 / n for n in range(1, w)) / math.pi
