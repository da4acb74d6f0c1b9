"""Factorization-norm bounds for M_f and the baselines they are compared to.

Conventions: ``harmonic_sum(T, p)`` is sum_{n=1}^{T-1} n**-p and
``exp_harmonic_sum(T, alpha)`` is sum_{n=1}^{T-1} 1 / (n alpha**(2n)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .decay import CONSTANT, EXPONENTIAL, POLYNOMIAL, DecayFunction
from .errors import DomainError
from .series import coefficients

ZETA_EVEN = {
    1: math.pi**2 / 6,
    2: math.pi**4 / 90,
    3: math.pi**6 / 945,
    4: math.pi**8 / 9450,
    5: math.pi**10 / 93555,
}


@dataclass(frozen=True)
class NormBounds:
    gamma2_lower: float
    gamma2_upper: float
    gammaF_upper: float
    horizon: int
    baseline_gamma2: float | None = None


def zeta_even(c: int) -> float:
    """zeta(2c); closed form for c <= 5, partial sums below 1e-15 otherwise."""
    if c < 1:
        raise DomainError("c must be a positive integer")
    if c in ZETA_EVEN:
        return ZETA_EVEN[c]
    total, n = 0.0, 1
    while True:
        term = n ** (-2.0 * c)
        if term < 1e-15:
            return total + term
        total += term
        n += 1


def harmonic_sum(T: int, p: float) -> float:
    """H(T, p) = sum_{n=1}^{T-1} n**-p."""
    if T <= 1:
        return 0.0
    n = np.arange(1, T, dtype=float)
    return math.fsum(n**-p)


def exp_harmonic_sum(T: int, alpha: float) -> float:
    """S(T, 2 alpha) = sum_{n=1}^{T-1} 1 / (n alpha**(2n))."""
    if T <= 1:
        return 0.0
    n = np.arange(1, T, dtype=float)
    # alpha**(2n) overflows for large n; the terms underflow to 0 instead
    return math.fsum(np.exp(-2.0 * n * math.log(alpha)) / n)


def exp_harmonic_cap(T: int, alpha: float) -> float:
    """Geometric-series cap on S(T, 2 alpha), valid for alpha > 1."""
    if not alpha > 1:
        raise DomainError("geometric cap needs alpha > 1")
    a2 = alpha * alpha
    tail = math.exp(math.log(a2) * (1 - T)) / (T * (a2 - 1))
    return a2 / (a2 - 1) ** 2 - tail


def _require_factorizable(f: DecayFunction):
    if f.is_window:
        raise DomainError("sliding-window decay is handled by the block factorization")


def gamma2_lower_bound(f: DecayFunction) -> float:
    """2 / sqrt(4 - f(2)**2), from a 2x2 Schur-multiplier witness."""
    _require_factorizable(f)
    f2 = f.values(2)[1]
    if not abs(f2) < 2:
        raise DomainError("need |f(2)| < 2")
    return 2.0 / math.sqrt(4.0 - f2 * f2)


def gamma2_upper_bound(f: DecayFunction, T: int) -> float:
    """1 + sum_{n=1}^{T-1} a_n**2 = squared column norm of the Toeplitz square root."""
    _require_factorizable(f)
    if T < 1:
        raise DomainError("T must be >= 1")
    a = coefficients(f, T).coeffs
    return math.fsum(a * a)


def gammaF_upper_bound(f: DecayFunction, T: int) -> float:
    return math.sqrt(T) * gamma2_upper_bound(f, T)


def closed_form_upper(f: DecayFunction, T: int) -> float:
    """Family-specific relaxation of :func:`gamma2_upper_bound`.

    Polynomial: 1 + sum_{n=1}^{T-1} f(n+1)**2 / 4 = 1 + (H(T+1, 2c) - 1) / 4.
    Exponential (and constant): 1 + S(T, 2 alpha) / pi.
    """
    if f.kind == POLYNOMIAL:
        return 1.0 + (harmonic_sum(T + 1, 2 * f.param) - 1.0) / 4.0 if T > 1 else 1.0
    if f.kind in (EXPONENTIAL, CONSTANT):
        alpha = 1.0 if f.kind == CONSTANT else f.param
        return 1.0 + exp_harmonic_sum(T, alpha) / math.pi
    raise DomainError(f"no closed form for {f.kind} decay")


def relaxed_upper(f: DecayFunction, T: int) -> float:
    """Horizon-free style caps (looser than :func:`closed_form_upper`).

    Polynomial: 1 + (1 - (T+1)**(1-2c)) / (4(2c-1)).
    Exponential alpha > 1: 1 + cap(S(T, 2 alpha)) / pi.
    """
    if f.kind == POLYNOMIAL:
        k = 2 * f.param - 1
        return 1.0 + (1.0 - (T + 1.0) ** (-k)) / (4.0 * k)
    if f.kind == EXPONENTIAL and f.param > 1:
        return 1.0 + exp_harmonic_cap(T, f.param) / math.pi
    raise DomainError(f"no relaxed closed form for {f.describe()}")


def zeta_cap(c: int) -> float:
    """T-independent polynomial cap 1 + (zeta(2c) - 1) / 4."""
    return 1.0 + (zeta_even(c) - 1.0) / 4.0


def baseline_bounds(f: DecayFunction, T: int) -> float:
    """Previously known gamma_2 bound used for comparison.

    Polynomial: sqrt(sum_{n=1}^{T} n**-c). Exponential: sum_{n=0}^{T-1} alpha**(-2n).
    """
    if f.kind == POLYNOMIAL:
        return math.sqrt(harmonic_sum(T + 1, f.param))
    if f.kind in (EXPONENTIAL, CONSTANT):
        alpha = 1.0 if f.kind == CONSTANT else f.param
        n = np.arange(T, dtype=float)
        return math.fsum(float(alpha) ** (-2 * n))
    raise DomainError(f"no baseline bound for {f.kind} decay")


def gaussian_sensitivity(f: DecayFunction, T: int) -> float:
    """l2-sensitivity sqrt(sum_{n=1}^T f(n)**2) of releasing all T decayed sums."""
    v = f.values(T)
    return math.sqrt(math.fsum(v * v))


def prior_sensitivity_floor(c: int) -> float:
    """Lower bound 1 + 1/c on the sensitivity of the earlier polynomial-decay mechanism."""
    return 1.0 + 1.0 / c


def norm_bounds(f: DecayFunction, T: int) -> NormBounds:
    upper = gamma2_upper_bound(f, T)
    lower = gamma2_lower_bound(f) if T >= 2 else 1.0
    try:
        base = baseline_bounds(f, T)
    except DomainError:
        base = None
    return NormBounds(lower, upper, math.sqrt(T) * upper, T, base)
