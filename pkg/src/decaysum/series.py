"""Square-root power series of the weight generating function.

Given g(x) = 1 + f(2) x + f(3) x^2 + ..., find h(x) = a_0 + a_1 x + ... with
h(x)**2 = g(x). The coefficients a_n form the first column of the lower
triangular Toeplitz factor L with L @ L = M_f.

Three routes are provided:

* :func:`sqrt_series` -- coefficient matching, O(T^2); the production path.
* :func:`closed_form_coeff` -- Faa di Bruno expansion over partial Bell
  polynomials; exact rational arithmetic, capped at n = 30.
* :func:`exponential_coeff` -- analytic form for f(n) = alpha**(1 - n).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .decay import DecayFunction
from .errors import DomainError, EmptyInputError, NormalizationError

BELL_MAX_N = 30
_NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class SqrtSeries:
    """Coefficients a_0..a_{T-1} of the square-root symbol (read-only)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def horizon(self) -> int:
        return len(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, n):
        return self.coeffs[n]

    def square(self) -> np.ndarray:
        """Convolution square truncated to the horizon; should reproduce g."""
        return np.convolve(self.coeffs, self.coeffs)[: self.horizon]


def series_input(f: DecayFunction, T: int) -> np.ndarray:
    """g_n = f(n + 1) for n = 0..T-1."""
    return f.values(T)


def sqrt_series(g_coeffs: Sequence[float]) -> SqrtSeries:
    """Coefficients of sqrt(g) by matching powers of x in increasing order.

    a_0 = 1 and a_n = (g_n - sum_{k=1}^{n-1} a_k a_{n-k}) / 2.
    """
    g = np.asarray(g_coeffs, dtype=float)
    T = g.size
    if T == 0:
        raise EmptyInputError("horizon must be at least 1")
    if abs(g[0] - 1.0) > _NORMALIZATION_TOL:
        raise NormalizationError(f"g_0 must equal 1 (normalize so f(1) = 1), got {g[0]!r}")
    a = np.zeros(T)
    a[0] = 1.0
    for n in range(1, T):
        a[n] = 0.5 * (g[n] - np.dot(a[1:n], a[n - 1 : 0 : -1]))
    return SqrtSeries(a)


@lru_cache(maxsize=128)
def coefficients(f: DecayFunction, T: int) -> SqrtSeries:
    """Cached :func:`sqrt_series` for a decay function and horizon."""
    return sqrt_series(series_input(f, T))


def check_monotone(series: SqrtSeries, name: str = "series", atol: float = 0.0) -> bool:
    """Warn (do not raise) if a_n increases by more than ``atol``; returns True if not."""
    bad = np.flatnonzero(np.diff(series.coeffs) > atol)
    if bad.size:
        warnings.warn(
            f"{name}: coefficients increase at n={int(bad[0]) + 1} "
            f"({bad.size} violation(s))",
            RuntimeWarning,
            stacklevel=2,
        )
        return False
    return True


def _bell_table(n: int, s: Sequence[Fraction]) -> list[list[Fraction]]:
    # B[m][k] for 0 <= k <= m <= n; s is 1-indexed (s[0] unused).
    B = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
    B[0][0] = Fraction(1)
    for m in range(1, n + 1):
        for k in range(1, m + 1):
            acc = Fraction(0)
            for ell in range(k - 1, m):
                if B[ell][k - 1]:
                    acc += math.comb(m, ell) * s[m - ell] * B[ell][k - 1]
            B[m][k] = acc / k
    return B


def _check_bell_args(n, k):
    if n > BELL_MAX_N:
        raise DomainError(f"Bell route is limited to n <= {BELL_MAX_N}, got n={n}")
    if n < 0 or k < 0 or k > n or (k == 0 and n > 0):
        raise DomainError(f"need 1 <= k <= n, got n={n}, k={k}")


def bell_polynomial(n: int, k: int, s: Sequence[float]) -> float:
    """Partial exponential Bell polynomial B_{n,k}(s_1, s_2, ...).

    ``s[0]`` is s_1. Evaluated with the recurrence
    B_{n,k} = (1/k) sum_{l=k-1}^{n-1} C(n, l) s_{n-l} B_{l,k-1}
    in exact rational arithmetic (float inputs convert exactly).
    """
    _check_bell_args(n, k)
    need = n - k + 1
    if len(s) < need:
        raise DomainError(f"B_{{{n},{k}}} needs {need} arguments, got {len(s)}")
    sf = [Fraction(0)] + [Fraction(float(v)) for v in s[:n]]
    sf += [Fraction(0)] * (n + 1 - len(sf))
    return float(_bell_table(n, sf)[n][k])


def closed_form_coeff(f: DecayFunction, n: int) -> float:
    """a_n = (1/n!) sum_k B_{n,k}(1! f(2), 2! f(3), ...) prod_{m<k} (1/2 - m)."""
    if n == 0:
        return 1.0
    _check_bell_args(n, 1)
    vals = f.values(n + 1)
    s = [Fraction(0)] + [math.factorial(m) * Fraction(float(vals[m])) for m in range(1, n + 1)]
    B = _bell_table(n, s)
    total = Fraction(0)
    falling = Fraction(1)
    for k in range(1, n + 1):
        falling *= Fraction(1, 2) - (k - 1)
        total += B[n][k] * falling
    return float(total / math.factorial(n))


def exponential_coeff(alpha: float, n: int) -> float:
    """Coefficient a_n for f(n) = alpha**(1 - n): alpha**-n |binom(-1/2, n)|."""
    if not alpha >= 1:
        raise DomainError(f"alpha must be >= 1, got {alpha}")
    if n < 0:
        raise DomainError("n must be non-negative")
    out = 1.0
    for j in range(1, n + 1):
        # running product keeps every partial value in range for large n
        out *= (2 * j - 1) / (2 * j * alpha)
    return out


def exponential_series(alpha: float, T: int) -> SqrtSeries:
    """All T coefficients of the exponential-decay square root."""
    if not alpha >= 1:
        raise DomainError(f"alpha must be >= 1, got {alpha}")
    j = np.arange(1, T, dtype=float)
    return SqrtSeries(np.concatenate(([1.0], np.cumprod((2 * j - 1) / (2 * j * alpha)))))
