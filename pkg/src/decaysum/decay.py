"""Decay (weight) functions f: N+ -> R+ with f(1) = 1.

Exponential decay is normalized so that f(1) = 1, i.e. f(n) = alpha**(1 - n).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, DomainError, NormalizationError

CONSTANT = "constant"
POLYNOMIAL = "polynomial"
EXPONENTIAL = "exponential"
SLIDING_WINDOW = "window"
CUSTOM = "custom"

KINDS = (CONSTANT, POLYNOMIAL, EXPONENTIAL, SLIDING_WINDOW, CUSTOM)


@dataclass(frozen=True)
class DecayFunction:
    """A monotone non-increasing weight function with f(1) = 1.

    Instances are hashable so that coefficient computations can be cached
    per (f, T). Use the module-level constructors rather than building this
    directly.
    """

    kind: str
    param: float | int | None = None
    table: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown decay kind {self.kind!r}")
        if self.kind == POLYNOMIAL and (int(self.param) != self.param or self.param < 1):
            raise DomainError(f"polynomial exponent must be a positive integer, got {self.param}")
        if self.kind == EXPONENTIAL and not self.param >= 1:
            raise DomainError(f"exponential base must be >= 1, got {self.param}")
        if self.kind == SLIDING_WINDOW and (int(self.param) != self.param or self.param < 1):
            raise DomainError(f"window must be a positive integer, got {self.param}")
        if self.kind == CUSTOM:
            t = np.asarray(self.table, dtype=float)
            if t.size == 0:
                raise DomainError("custom decay table is empty")
            if t[0] != 1.0:
                raise NormalizationError(f"custom table must start with f(1) = 1, got {t[0]}")
            if np.any(t < 0) or np.any(np.diff(t) > 0):
                raise DomainError("custom table must be non-negative and non-increasing")

    @property
    def is_window(self) -> bool:
        return self.kind == SLIDING_WINDOW

    def __call__(self, n: int) -> float:
        return float(self.values(n)[n - 1])

    def values(self, T: int) -> np.ndarray:
        """Return f(1), ..., f(T) as a float array."""
        if T < 0:
            raise DomainError("T must be non-negative")
        n = np.arange(1, T + 1, dtype=float)
        if self.kind == CONSTANT:
            return np.ones(T)
        if self.kind == POLYNOMIAL:
            return n ** (-float(self.param))
        if self.kind == EXPONENTIAL:
            return float(self.param) ** (1.0 - n)
        if self.kind == SLIDING_WINDOW:
            return (n <= self.param).astype(float)
        if T > len(self.table):
            raise DomainError(f"custom table has {len(self.table)} entries, {T} requested")
        return np.asarray(self.table[:T], dtype=float)

    def describe(self) -> str:
        """Short spec string accepted by :func:`parse_decay` (custom excepted)."""
        if self.kind == CONSTANT:
            return "const"
        if self.kind == POLYNOMIAL:
            return f"poly:{int(self.param)}"
        if self.kind == EXPONENTIAL:
            return f"exp:{self.param:g}"
        if self.kind == SLIDING_WINDOW:
            return f"window:{int(self.param)}"
        return f"custom[{len(self.table)}]"


def constant() -> DecayFunction:
    return DecayFunction(CONSTANT)


def polynomial(c: int) -> DecayFunction:
    """f(n) = n**-c."""
    return DecayFunction(POLYNOMIAL, int(c))


def exponential(alpha: float) -> DecayFunction:
    """f(n) = alpha**(1 - n); alpha = 1 is the constant function."""
    return DecayFunction(EXPONENTIAL, float(alpha))


def sliding_window(w: int) -> DecayFunction:
    """f(n) = 1 for n <= w and 0 afterwards."""
    return DecayFunction(SLIDING_WINDOW, int(w))


def custom(table: Sequence[float]) -> DecayFunction:
    return DecayFunction(CUSTOM, None, tuple(float(v) for v in table))


def parse_decay(spec: str) -> DecayFunction:
    """Parse ``const``, ``poly:C``, ``exp:ALPHA``, ``window:W`` or ``custom:PATH``.

    A custom file holds one value per line; ``#`` starts a comment.
    """
    name, _, arg = spec.strip().partition(":")
    name = name.lower()
    try:
        if name in ("const", "constant"):
            return constant()
        if name in ("poly", "polynomial"):
            return polynomial(int(arg))
        if name in ("exp", "exponential"):
            return exponential(float(arg))
        if name in ("window", "sw"):
            return sliding_window(int(arg))
        if name == "custom":
            return custom(read_values(Path(arg).read_text(encoding="utf-8").splitlines()))
    except (ValueError, OSError) as exc:
        raise ConfigError(f"bad decay spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown decay spec {spec!r}")


def read_values(lines) -> list[float]:
    """Parse one real per line, skipping blanks and ``#`` comments."""
    out = []
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(float(line))
    return out
