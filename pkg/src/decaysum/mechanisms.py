"""Streaming (epsilon, delta)-DP mechanisms for continual decaying sums.

All mechanisms draw their base noise once at construction from
``numpy.random.default_rng(seed)``, so a fixed seed gives the same transcript
no matter how the stream is fed in. Inputs are clamped to [-clip, clip].

Factorization mechanism: with L the Toeplitz square root of M_f and
b ~ N(0, s**2 I), s = sigma_mult * clip * ||L||_{1->2}, the release at time t
is the t-th entry of L (L x' + b), so the noise is z = L b ~ N(0, s**2 L L^T).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from .bounds import gaussian_sensitivity
from .decay import DecayFunction, sliding_window
from .errors import ConfigError, DimensionError, DomainError, StreamExhaustedError
from .toeplitz import BlockFactor, ToeplitzFactor, build_block_factor, build_factor

log = logging.getLogger(__name__)

SIGMA_CONVENTIONS = ("main-text", "appendix", "analytic")


def analytic_gaussian_sigma(epsilon: float, delta: float) -> float:
    """Smallest noise multiplier s (sensitivity 1) with
    Phi(1/(2s) - eps s) - e^eps Phi(-1/(2s) - eps s) <= delta."""

    def excess(s):
        return ndtr(0.5 / s - epsilon * s) - math.exp(epsilon) * ndtr(-0.5 / s - epsilon * s) - delta

    lo, hi = 1e-6, 1.0
    while excess(hi) > 0:
        hi *= 2.0
    return brentq(excess, lo, hi, xtol=1e-14, rtol=1e-12)


@dataclass(frozen=True)
class PrivacyParams:
    epsilon: float
    delta: float
    clip_bound: float = 1.0
    sigma_convention: str = "main-text"
    unsafe_no_privacy: bool = False

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise ConfigError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.clip_bound > 0:
            raise ConfigError(f"clip bound must be positive, got {self.clip_bound}")
        if self.sigma_convention not in SIGMA_CONVENTIONS:
            raise ConfigError(f"sigma convention must be one of {SIGMA_CONVENTIONS}")

    @property
    def sigma_multiplier(self) -> float:
        """Noise multiplier sigma_{eps,delta}; zero only in unsafe test mode."""
        if self.unsafe_no_privacy:
            return 0.0
        return self.formula_sigma

    @property
    def formula_sigma(self) -> float:
        """sigma_{eps,delta} ignoring the unsafe flag (used for bound reporting)."""
        eps, delta = self.epsilon, self.delta
        if self.sigma_convention == "main-text":
            return 2.0 * math.sqrt(2.0 * math.log(1.25 / delta)) / eps
        if self.sigma_convention == "appendix":
            return 2.0 * math.sqrt(math.log(1.25 / delta)) / eps
        return analytic_gaussian_sigma(eps, delta)


class StreamMechanism:
    """Shared bookkeeping: horizon, clamping, pre-drawn base noise."""

    name = "abstract"

    def __init__(self, T: int, privacy: PrivacyParams, seed: int, noise_std: float):
        if T < 1:
            raise DomainError("T must be >= 1")
        if seed is None or seed < 0:
            raise ConfigError("an explicit non-negative seed is required")
        if privacy.unsafe_no_privacy:
            log.warning("%s running with unsafe-no-privacy: outputs are NOT private", self.name)
        self.T = T
        self.privacy = privacy
        self.seed = seed
        self.t = 0
        self.clip_events = 0
        self.noise_std = noise_std
        self._x = np.zeros(T)
        rng = np.random.default_rng(seed)
        self.base_noise = rng.standard_normal(T) * noise_std
        self.base_noise.setflags(write=False)

    def _admit(self, x: float) -> float:
        if self.t >= self.T:
            raise StreamExhaustedError(f"stream of length {self.T} already consumed")
        D = self.privacy.clip_bound
        x = float(x)
        if x > D or x < -D:
            self.clip_events += 1
            x = min(max(x, -D), D)
        return x

    def _clamp_all(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if xs.shape != (self.T,):
            raise DimensionError(f"expected a stream of length {self.T}, got shape {xs.shape}")
        D = self.privacy.clip_bound
        return np.clip(xs, -D, D)

    def step(self, x: float) -> float:
        raise NotImplementedError

    def run(self, xs) -> np.ndarray:
        """Feed every element through :meth:`step`."""
        return np.array([self.step(x) for x in xs])

    def release(self, xs) -> np.ndarray:
        """Offline transcript for a full stream, using the same base noise.

        Does not advance the state; agrees with repeated :meth:`step` up to
        floating-point rounding.
        """
        raise NotImplementedError

    def noise_variance(self) -> np.ndarray:
        """Exact variance of (output_t - true_t) for t = 1..T."""
        raise NotImplementedError


class FactorizationMechanism(StreamMechanism):
    """Online factorization mechanism with L = R = Toeplitz square root of M_f."""

    name = "factorization"

    def __init__(self, f: DecayFunction, T: int, privacy: PrivacyParams, seed: int):
        if f.is_window:
            raise DomainError("sliding-window decay: use SlidingWindowMechanism")
        self.decay = f
        self.factor: ToeplitzFactor = build_factor(f, T)
        std = privacy.sigma_multiplier * privacy.clip_bound * self.factor.column_norm
        super().__init__(T, privacy, seed, std)
        self._v = np.zeros(T)
        self._rev = self.factor.first_column[::-1].copy()

    def _kernel(self, t):
        # r(t), r(t-1), ..., r(1) aligned with positions 1..t
        return self._rev[self.T - 1 - t :]

    def step(self, x: float) -> float:
        x = self._admit(x)
        t = self.t
        self._x[t] = x
        k = self._kernel(t)
        self._v[t] = np.dot(k, self._x[: t + 1]) + self.base_noise[t]
        out = float(np.dot(k, self._v[: t + 1]))
        self.t += 1
        return out

    def release(self, xs) -> np.ndarray:
        x = self._clamp_all(xs)
        r = self.factor.first_column
        v = np.convolve(r, x)[: self.T] + self.base_noise
        return np.convolve(r, v)[: self.T]

    def noise_variance(self) -> np.ndarray:
        return self.noise_std**2 * self.factor.prefix_norms_sq()


class SlidingWindowMechanism(StreamMechanism):
    """Window sums from a block-diagonal factorization with w x w counting blocks.

    With u = L'(L' x' + b) the within-block noisy prefix sums, the release is
    u[t] for t <= w and u[t] + u[end of previous block] - u[t - w] afterwards,
    which adds back the part of the window lying in the previous block.
    """

    name = "window"

    def __init__(self, w: int, T: int, privacy: PrivacyParams, seed: int):
        self.decay = sliding_window(w)
        self.blocks: BlockFactor = build_block_factor(w, T)
        std = privacy.sigma_multiplier * privacy.clip_bound * self.blocks.column_norm
        super().__init__(T, privacy, seed, std)
        self.window = w
        self._v = np.zeros(T)
        self._u = np.zeros(T)
        self._rev = self.blocks.base_factor.first_column[::-1].copy()

    def step(self, x: float) -> float:
        x = self._admit(x)
        t, w = self.t, self.window
        start = (t // w) * w
        k = self._rev[w - 1 - (t - start) :]
        self._x[t] = x
        self._v[t] = np.dot(k, self._x[start : t + 1]) + self.base_noise[t]
        self._u[t] = np.dot(k, self._v[start : t + 1])
        self.t += 1
        if t < w:
            return float(self._u[t])
        return float(self._u[t] + self._u[start - 1] - self._u[t - w])

    def release(self, xs) -> np.ndarray:
        x = self._clamp_all(xs)
        u = self.blocks.matvec(self.blocks.matvec(x) + self.base_noise)
        return _window_combine(u, self.window)

    def noise_variance(self) -> np.ndarray:
        r = self.blocks.base_factor.first_column
        w = self.window
        diag = np.cumsum(r * r)
        # cross[k] = (L1 L1^T)[w-1, k]
        ac = np.correlate(r, r, mode="full")[w - 1 :]
        cross = ac[w - 1 - np.arange(w)]
        out = np.empty(self.T)
        for t in range(self.T):
            k = t % w
            if t < w:
                out[t] = diag[k]
            else:
                out[t] = 2 * diag[k] + diag[w - 1] - 2 * cross[k]
        return self.noise_std**2 * out


def _window_combine(u: np.ndarray, w: int) -> np.ndarray:
    out = u.copy()
    t = np.arange(w, u.size)
    prev_end = (t // w) * w - 1
    out[w:] = u[w:] + u[prev_end] - u[t - w]
    return out


class GaussianBaselineMechanism(StreamMechanism):
    """Exact decayed sum plus independent N(0, (sigma_mult * clip * L_CDS)**2) per step."""

    name = "gaussian"

    def __init__(self, f: DecayFunction, T: int, privacy: PrivacyParams, seed: int):
        self.decay = f
        self.sensitivity = gaussian_sensitivity(f, T)
        std = privacy.sigma_multiplier * privacy.clip_bound * self.sensitivity
        super().__init__(T, privacy, seed, std)
        self._rev = f.values(T)[::-1].copy()

    def step(self, x: float) -> float:
        x = self._admit(x)
        t = self.t
        self._x[t] = x
        out = float(np.dot(self._rev[self.T - 1 - t :], self._x[: t + 1]) + self.base_noise[t])
        self.t += 1
        return out

    def release(self, xs) -> np.ndarray:
        x = self._clamp_all(xs)
        return np.convolve(self.decay.values(self.T), x)[: self.T] + self.base_noise

    def noise_variance(self) -> np.ndarray:
        return np.full(self.T, self.noise_std**2)


MECHANISMS = ("factorization", "window", "gaussian")


def make_mechanism(kind: str, f: DecayFunction, T: int, privacy: PrivacyParams, seed: int) -> StreamMechanism:
    """Factory; ``factorization`` with a sliding-window decay builds the block mechanism."""
    if kind == "gaussian":
        return GaussianBaselineMechanism(f, T, privacy, seed)
    if kind in ("factorization", "window"):
        if f.is_window:
            return SlidingWindowMechanism(int(f.param), T, privacy, seed)
        if kind == "window":
            raise DomainError("window mechanism needs a sliding-window decay")
        return FactorizationMechanism(f, T, privacy, seed)
    raise ConfigError(f"unknown mechanism {kind!r}; choose from {MECHANISMS}")


def mechanism_init(f, T, privacy, seed) -> FactorizationMechanism:
    return FactorizationMechanism(f, T, privacy, seed)


def mechanism_step(state: StreamMechanism, x_t: float) -> float:
    return state.step(x_t)


def sliding_window_init(w, T, privacy, seed) -> SlidingWindowMechanism:
    return SlidingWindowMechanism(w, T, privacy, seed)


sliding_window_step = mechanism_step


def gaussian_baseline_init(f, T, privacy, seed) -> GaussianBaselineMechanism:
    return GaussianBaselineMechanism(f, T, privacy, seed)


gaussian_baseline_step = mechanism_step
