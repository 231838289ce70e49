"""Closed-form analysis of (d,k) constraints and symbol-sliding codes.

Phrases are indexed the way the rate tables are laid out: index ``i`` in
``0..k-d`` stands for the phrase ``0^(k-i) 1`` (``k-i`` zeros then a one), so
index 0 is the longest phrase and index ``k-d`` the shortest.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, ParameterError


class Unbounded(enum.Enum):
    INFINITY = "inf"

    def __repr__(self) -> str:
        return "INFINITY"

    def __str__(self) -> str:
        return "inf"


INFINITY = Unbounded.INFINITY

KType = Union[int, Unbounded]


@dataclass(frozen=True)
class Constraint:
    """Runs of zeros between consecutive ones have length in ``[d, k]``."""

    d: int
    k: KType

    def __post_init__(self):
        if isinstance(self.d, bool) or not isinstance(self.d, (int, np.integer)) or self.d < 0:
            raise ParameterError(f"d must be a non-negative integer, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))
        if self.k is INFINITY:
            return
        if isinstance(self.k, bool) or not isinstance(self.k, (int, np.integer)):
            raise ParameterError(f"k must be an integer or INFINITY, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        if self.k <= self.d:
            raise ParameterError(f"need d < k, got d={self.d}, k={self.k}")

    @property
    def finite(self) -> bool:
        return self.k is not INFINITY

    @property
    def span(self) -> int:
        """``k - d``, the longest run the pre-stuffing stage may produce."""
        if not self.finite:
            raise ParameterError("span undefined for k = INFINITY")
        return self.k - self.d

    def __str__(self) -> str:
        return f"({self.d},{self.k})"


def parse_k(text: str | int) -> KType:
    if isinstance(text, str) and text.strip().lower() in ("inf", "infinity", "oo"):
        return INFINITY
    return int(text)


@dataclass(frozen=True)
class CapacityResult:
    lam: float
    capacity: float
    residual: float


@dataclass(frozen=True)
class PhraseDistribution:
    constraint: Constraint
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if not self.constraint.finite:
            raise ParameterError("phrase distributions need finite k")
        if probs.shape != (self.constraint.span + 1,):
            raise ParameterError("probability vector has the wrong length")
        if np.any(probs < 0) or np.any(probs > 1):
            raise ParameterError("probabilities must lie in [0, 1]")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ParameterError(f"probabilities sum to {probs.sum()!r}, not 1")
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    def phrase_length(self, i: int) -> int:
        """Length in bits of the phrase at index ``i``."""
        return self.constraint.k - i + 1

    def __len__(self) -> int:
        return self.probs.size


@dataclass(frozen=True)
class SlidingConfig:
    constraint: Constraint
    j: int
    p: float

    def __post_init__(self):
        if self.j < 0:
            raise ParameterError("sliding index must be non-negative")
        if self.constraint.finite and self.j > self.constraint.span:
            raise ParameterError(
                f"sliding index {self.j} exceeds k-d={self.constraint.span}"
            )
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"bias must lie in (0,1), got {self.p!r}")


@dataclass(frozen=True)
class RateProfile:
    j_star: int
    p_star: float
    rate: float
    efficiency: float


def _require_finite(c: Constraint) -> None:
    if not c.finite:
        raise ParameterError(f"{c} has k = INFINITY; operation needs finite k")


def char_poly_eval(c: Constraint, z: float) -> float:
    """Characteristic polynomial ``H_{d,k}(z)`` for real ``z > 1``."""
    if not z > 1.0:
        raise DomainError(f"characteristic polynomial evaluated only for z > 1, got {z}")
    if not c.finite:
        return z ** -1 + z ** -(c.d + 1)
    w = 1.0 / z
    # geometric sum w^(d+1) + ... + w^(k+1)
    return float(np.sum(w ** np.arange(c.d + 1, c.k + 2)))


def _char_poly_derivative(c: Constraint, z: float) -> float:
    if not c.finite:
        return -(z ** -2) - (c.d + 1) * z ** -(c.d + 2)
    exps = np.arange(c.d + 1, c.k + 2)
    return float(-np.sum(exps * z ** (-exps - 1.0)))


def solve_lambda(c: Constraint, tol: float = 1e-14) -> CapacityResult:
    """Largest real root ``lambda`` of ``H_{d,k}(z) = 1`` and capacity ``log2(lambda)``.

    Bisection on ``(1, 2]`` where ``H`` is strictly decreasing, followed by a
    single Newton step.
    """
    if not tol > 0:
        raise ParameterError("tolerance must be positive")
    lo, hi = 1.0 + 1e-12, 2.0
    if char_poly_eval(c, hi) >= 1.0:
        lam = hi
    else:
        while True:
            lam = 0.5 * (lo + hi)
            val = char_poly_eval(c, lam) - 1.0
            if abs(val) <= tol or hi - lo <= 4e-16:
                break
            if val > 0:
                lo = lam
            else:
                hi = lam
        newton = lam - val / _char_poly_derivative(c, lam)
        if 1.0 < newton <= 2.0 and abs(char_poly_eval(c, newton) - 1.0) < abs(val):
            lam = newton
    residual = abs(char_poly_eval(c, lam) - 1.0)
    return CapacityResult(lam=lam, capacity=math.log2(lam), residual=residual)


def capacity(c: Constraint) -> float:
    return solve_lambda(c).capacity


def maxentropic_distribution(c: Constraint, lam: float | None = None) -> PhraseDistribution:
    """Phrase probabilities ``lambda^-(k+1-i)`` of the maxentropic sequence."""
    _require_finite(c)
    if lam is None:
        lam = solve_lambda(c).lam
    i = np.arange(c.span + 1)
    probs = lam ** -(c.k + 1.0 - i)
    return PhraseDistribution(c, probs)


def sliding_distribution(cfg: SlidingConfig) -> PhraseDistribution:
    """Phrase probabilities produced by SS(j) at bias p.

    The all-zero message word (probability ``p^(k-d)``) is moved to index
    ``j`` and entries ``0..j-1`` shift up by one.
    """
    c = cfg.constraint
    _require_finite(c)
    n, j, p = c.span, cfg.j, cfg.p
    probs = np.empty(n + 1)
    for i in range(n + 1):
        if i == j:
            probs[i] = p ** n
        elif i < j:
            probs[i] = p ** (n - i - 1) * (1.0 - p)
        else:
            probs[i] = p ** (n - i) * (1.0 - p)
    return PhraseDistribution(c, probs)


def binary_entropy(p: float | np.ndarray) -> float | np.ndarray:
    """``h(p)`` in bits, extended by continuity to ``h(0) = h(1) = 0``."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise DomainError("binary entropy needs 0 <= p <= 1")
    with np.errstate(divide="ignore", invalid="ignore"):
        q = 1.0 - p
        out = -np.where(p > 0, p * np.log2(p), 0.0) - np.where(q > 0, q * np.log2(q), 0.0)
    return float(out) if out.ndim == 0 else out


def word_lengths(cfg: SlidingConfig) -> tuple[float, float]:
    """Mean message word length into, and phrase length out of, the SS(j) encoder."""
    _require_finite(cfg.constraint)
    n, j, p, d = cfg.constraint.span, cfg.j, cfg.p, cfg.constraint.d
    pn = p ** n
    l_in = (1.0 - pn) / (1.0 - p)
    l_out = (1.0 - pn + (1.0 - p) * (p ** (n - j) - j * pn + d)) / (1.0 - p)
    return l_in, l_out


def sliding_rate(cfg: SlidingConfig) -> float:
    """Average information rate of SS(j) in bits per constrained bit."""
    _require_finite(cfg.constraint)
    n, j, p, d = cfg.constraint.span, cfg.j, cfg.p, cfg.constraint.d
    pn = p ** n
    return float(binary_entropy(p) * (1.0 - pn) / (1.0 - pn + (1.0 - p) * (p ** (n - j) - j * pn + d)))


def _rate_curve(c: Constraint, j: int, p: np.ndarray) -> np.ndarray:
    n, d = c.span, c.d
    pn = p ** n
    return binary_entropy(p) * (1.0 - pn) / (1.0 - pn + (1.0 - p) * (p ** (n - j) - j * pn + d))


INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, a: float, b: float, tol: float = 1e-10) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    c = b - INV_PHI * (b - a)
    e = a + INV_PHI * (b - a)
    fc, fe = f(c), f(e)
    while b - a > tol:
        if fc >= fe:
            b, e, fe = e, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + INV_PHI * (b - a)
            fe = f(e)
    x = 0.5 * (a + b)
    return float(x), float(f(x))


SCAN_POINTS = 200
TIE_TOLERANCE = 1e-12


def _best_p(c: Constraint, j: int) -> tuple[float, float]:
    grid = np.linspace(0.0, 1.0, SCAN_POINTS + 2)[1:-1]
    rates = _rate_curve(c, j, grid)
    i = int(np.argmax(rates))
    lo = grid[i - 1] if i > 0 else 1e-12
    hi = grid[i + 1] if i < grid.size - 1 else 1.0 - 1e-12
    return golden_section_max(lambda p: float(_rate_curve(c, j, np.float64(p))), lo, hi)


def optimize_rate(c: Constraint, j: int | str | None = None) -> RateProfile:
    """Maximize the SS(j) rate over the bias, and over ``j`` when ``j`` is None/"all".

    A coarse scan of p seeds a golden-section refinement. Ties in ``j`` go to
    the smaller index.
    """
    _require_finite(c)
    if j is None or j == "all":
        candidates = range(c.span + 1)
    else:
        if not 0 <= int(j) <= c.span:
            raise ParameterError(f"sliding index {j} outside 0..{c.span}")
        candidates = [int(j)]
    cap = solve_lambda(c).capacity
    best = None
    for jj in candidates:
        p, r = _best_p(c, jj)
        if best is None or r > best[2] + TIE_TOLERANCE:
            best = (jj, p, r)
    jj, p, r = best
    return RateProfile(j_star=jj, p_star=p, rate=r, efficiency=r / cap)


def rate_comparison_threshold(j: int) -> float:
    """Positive root of ``p^j + p = 1``; SS(j) beats SS(j-1) exactly when p exceeds it."""
    if j < 1:
        raise ParameterError("threshold defined for j >= 1")
    if j == 1:
        return 0.5
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid ** j + mid - 1.0 < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-17:
            break
    return 0.5 * (lo + hi)
