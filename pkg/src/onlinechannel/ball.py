"""Membership and size of the two-step confusion ball.

After the jammer spends ``q_n`` of its ``p_n`` flips on the first
``alpha_n`` bits, the ball around the corrupted word ``z`` collects every
word ``y`` that the remaining suffix-only budget could still bring into
nearest-neighbor contention: y belongs iff some w agrees with z on the
prefix, lies within p_n - q_n of z, and within p_n of y.

Sizes are exact big integers up to ``EXACT_LIMIT`` bits and log2-space
above (log-binomials summed with a max-shifted log-sum-exp).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._bits import round_half_up, to_bits
from .bounds import binary_entropy, exponent_gap
from .exceptions import ValidationError

__all__ = [
    "EXACT_LIMIT",
    "BallSpec",
    "BallSize",
    "ExponentCheckRow",
    "ball_contains",
    "ball_size",
    "ball_size_upper_bound",
    "ball_exponent_check",
]

#: Above this length ``mode="auto"`` switches from exact integers to log2.
EXACT_LIMIT = 256


@dataclass(frozen=True)
class BallSpec:
    """Integer parameters (n, alpha_n, p_n, q_n) of one confusion ball."""

    n: int
    alpha_n: int
    p_n: int
    q_n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError(f"n must be nonnegative, got {self.n}")
        if not 0 <= self.alpha_n <= self.n:
            raise ValidationError(f"alpha_n must lie in [0, n], got {self.alpha_n}")
        if not 0 <= self.q_n <= self.p_n <= self.n:
            raise ValidationError(
                f"need 0 <= q_n <= p_n <= n, got q_n={self.q_n} p_n={self.p_n}"
            )
        if self.q_n > self.alpha_n:
            raise ValidationError(
                f"q_n={self.q_n} exceeds the prefix length alpha_n={self.alpha_n}"
            )

    @property
    def suffix_n(self) -> int:
        return self.n - self.alpha_n


@dataclass(frozen=True)
class BallSize:
    """A count, either exact (arbitrary precision) or as log2."""

    mode: str  # "exact" | "log2"
    log2_value: float
    exact: int | None = None

    @classmethod
    def from_exact(cls, count: int) -> "BallSize":
        log2 = math.log2(count) if count > 0 else float("-inf")
        return cls(mode="exact", log2_value=log2, exact=count)

    @classmethod
    def from_log2(cls, log2_value: float) -> "BallSize":
        return cls(mode="log2", log2_value=log2_value, exact=None)


def ball_contains(z, y, spec: BallSpec) -> bool:
    """Membership test in closed form.

    With i the prefix distance and j the suffix distance between z and y,
    membership is i + max(0, j - (p_n - q_n)) <= p_n; equivalently i <= p_n
    and i + j <= 2 p_n - q_n.
    """
    z = to_bits(z, spec.n)
    y = to_bits(y, spec.n)
    a = spec.alpha_n
    i = int(np.count_nonzero(z[:a] != y[:a]))
    j = int(np.count_nonzero(z[a:] != y[a:]))
    return i + max(0, j - (spec.p_n - spec.q_n)) <= spec.p_n


def _log2_comb(m: int, k: int) -> float:
    if k < 0 or k > m:
        return float("-inf")
    return (math.lgamma(m + 1) - math.lgamma(k + 1) - math.lgamma(m - k + 1)) / math.log(2)


def _log2_sum(terms: list[float]) -> float:
    peak = max(terms, default=float("-inf"))
    if peak == float("-inf"):
        return peak
    return peak + math.log2(sum(2.0 ** (t - peak) for t in terms))


def _resolve_mode(spec: BallSpec, mode: str) -> str:
    if mode == "auto":
        return "exact" if spec.n <= EXACT_LIMIT else "log2"
    if mode not in ("exact", "log2"):
        raise ValidationError(f"unknown mode {mode!r}")
    return mode


def _term_indices(spec: BallSpec):
    """(i, j) pairs with i <= p_n and i + j <= 2 p_n - q_n, in range."""
    for i in range(min(spec.alpha_n, spec.p_n) + 1):
        j_max = min(spec.suffix_n, 2 * spec.p_n - spec.q_n - i)
        for j in range(j_max + 1):
            yield i, j


def ball_size(spec: BallSpec, mode: str = "auto") -> BallSize:
    """Exact (or log2) number of words in the ball; independent of its center."""
    resolved = _resolve_mode(spec, mode)
    if resolved == "exact":
        total = 0
        for i, j in _term_indices(spec):
            total += math.comb(spec.alpha_n, i) * math.comb(spec.suffix_n, j)
        return BallSize.from_exact(total)
    terms = [_log2_comb(spec.alpha_n, i) + _log2_comb(spec.suffix_n, j)
             for i, j in _term_indices(spec)]
    return BallSize.from_log2(_log2_sum(terms))


def ball_size_upper_bound(spec: BallSpec, mode: str = "auto") -> BallSize:
    """Relaxed double sum over total distance k <= (2p-q)n and prefix
    distance i <= min(p_n, k); never smaller than ``ball_size``."""
    resolved = _resolve_mode(spec, mode)
    k_max = min(2 * spec.p_n - spec.q_n, spec.n)
    if resolved == "exact":
        total = 0
        for k in range(k_max + 1):
            for i in range(min(spec.p_n, k) + 1):
                total += math.comb(spec.alpha_n, i) * math.comb(spec.suffix_n, k - i)
        return BallSize.from_exact(total)
    terms = []
    for k in range(k_max + 1):
        for i in range(min(spec.p_n, k) + 1):
            t = _log2_comb(spec.alpha_n, i) + _log2_comb(spec.suffix_n, k - i)
            if t > float("-inf"):
                terms.append(t)
    return BallSize.from_log2(_log2_sum(terms))


@dataclass(frozen=True)
class ExponentCheckRow:
    """One (n, alpha, q) sample of the ball-growth exponent against its bound.

    ``rate`` is log2(size)/n, ``exponent_bound`` is H(2p) - exponent_gap(p),
    ``correction`` the polynomial slack c*log2(n)/n, and
    ``slack = exponent_bound + correction - rate`` (expected nonnegative).
    """

    n: int
    alpha: float
    q: float
    alpha_n: int
    p_n: int
    q_n: int
    rate: float
    exponent_bound: float
    correction: float
    slack: float


def ball_exponent_check(
    p: float,
    n_grid,
    q_values=None,
    alpha_values=None,
    alpha_points: int = 5,
    slack_constant: float = 2.0,
    mode: str = "auto",
) -> list[ExponentCheckRow]:
    """Sweep ball sizes over the admissible (alpha, q) region for given lengths.

    Requires H(2p) in (0, 1/2).  alpha defaults to a grid over
    [1 - H(2p), 1 - 2p]; q defaults to {0, p/2, p}.
    """
    gap = exponent_gap(p)  # validates the region
    h2 = binary_entropy(2 * p)
    alpha_lo, alpha_hi = 1 - h2, 1 - 2 * p
    if alpha_values is None:
        alpha_values = np.linspace(alpha_lo, alpha_hi, alpha_points)
    for alpha in alpha_values:
        if not (alpha_lo - 1e-9 <= alpha <= alpha_hi + 1e-9):
            raise ValidationError(
                f"alpha={alpha} outside [{alpha_lo:.6f}, {alpha_hi:.6f}]"
            )
    if q_values is None:
        q_values = (0.0, p / 2, p)
    for q in q_values:
        if not 0.0 <= q <= p + 1e-12:
            raise ValidationError(f"q={q} outside [0, p={p}]")

    bound = h2 - gap
    rows = []
    for n in n_grid:
        n = int(n)
        if n <= 0:
            raise ValidationError(f"lengths must be positive, got {n}")
        p_n = round_half_up(p * n)
        for alpha in alpha_values:
            alpha_n = round_half_up(float(alpha) * n)
            for q in q_values:
                q_n = min(round_half_up(float(q) * n), p_n, alpha_n)
                spec = BallSpec(n=n, alpha_n=alpha_n, p_n=p_n, q_n=q_n)
                rate = ball_size(spec, mode).log2_value / n
                correction = slack_constant * math.log2(n) / n
                rows.append(ExponentCheckRow(
                    n=n, alpha=float(alpha), q=float(q),
                    alpha_n=alpha_n, p_n=p_n, q_n=q_n,
                    rate=rate, exponent_bound=bound,
                    correction=correction,
                    slack=bound + correction - rate,
                ))
    return rows
