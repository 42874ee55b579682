"""Entropy-based capacity bound curves for the causal-jammer channel.

Everything here is a pure function of the flip fraction ``p``.  Rates are in
bits per channel use.  The interesting regime is H(2p) < 1/2 (roughly
p < 0.055), where the gap constants ``exponent_gap`` and ``rate_margin``
are defined and strictly positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "binary_entropy",
    "binary_entropy_inverse",
    "split_entropy",
    "capacity_bounds",
    "exponent_gap",
    "exponent_gap_parts",
    "rate_margin",
    "BoundsRow",
    "ExponentGapParts",
    "GAP_P_LIMIT",
]


def binary_entropy(x: float) -> float:
    """H(x) = -x log2 x - (1-x) log2 (1-x), with H(0) = H(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"entropy argument must lie in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def binary_entropy_inverse(y: float) -> float:
    """Inverse of ``binary_entropy`` restricted to the increasing branch [0, 1/2].

    Bisection; 200 halvings push the bracket far below the 1e-12 tolerance
    the rest of the package relies on.
    """
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"entropy value must lie in [0, 1], got {y}")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if binary_entropy(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


#: Largest p with H(2p) < 1/2; ``exponent_gap`` and ``rate_margin`` exist on
#: the open interval (0, GAP_P_LIMIT).
GAP_P_LIMIT = binary_entropy_inverse(0.5) / 2


def split_entropy(alpha: float, p: float) -> float:
    """alpha*H(p/alpha) + (1-alpha)*H(p/(1-alpha)).

    Growth exponent of a pair of Hamming balls of radius p*n placed on a
    prefix of alpha*n bits and the complementary suffix.  By strict
    concavity this is at most H(2p), with equality only at alpha = 1/2.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if p < 0 or p > alpha or p > 1 - alpha:
        raise ValueError(f"p={p} outside [0, min(alpha, 1-alpha)] for alpha={alpha}")
    return alpha * binary_entropy(p / alpha) + (1 - alpha) * binary_entropy(p / (1 - alpha))


@dataclass(frozen=True)
class ExponentGapParts:
    """The two candidate gaps whose minimum is ``exponent_gap``.

    ``shrunk_radius``: H(2p) - H((2-2*gamma)*p), the gap earned when the
    jammer has already spent a constant fraction of its budget on the prefix.
    ``prefix_split``: H(2p) - split_entropy(alpha_star, p), the gap earned
    from splitting the remaining budget across prefix and suffix, evaluated
    at alpha_star = 1 - 2p.
    """

    shrunk_radius: float
    prefix_split: float
    gamma: float
    alpha_star: float


def _entropy_2p_in_gap_region(p: float) -> float:
    if not 0.0 <= p <= 0.5:
        raise ValueError(f"p must lie in [0, 1/2], got {p}")
    # H(2p) also drops below 1/2 again as p approaches 1/2; the gap region
    # is the left branch only.
    if not 0.0 < p < GAP_P_LIMIT:
        raise ValueError(
            f"p={p} outside the gap region: need H(2p) in (0, 1/2) with 2p < 1/2, "
            f"i.e. 0 < p < {GAP_P_LIMIT:.6f}"
        )
    return binary_entropy(2 * p)


def exponent_gap_parts(p: float) -> ExponentGapParts:
    h2 = _entropy_2p_in_gap_region(p)
    # gamma is the distance of the prefix fraction from 1/2: alpha ranges over
    # [1 - H(2p), 1 - 2p], so alpha >= 1/2 + gamma with gamma = 1/2 - H(2p),
    # the largest valid choice.
    gamma = 0.5 - h2
    shrunk = h2 - binary_entropy((2 - 2 * gamma) * p)
    alpha_star = 1 - 2 * p
    split = h2 - split_entropy(alpha_star, p)
    return ExponentGapParts(shrunk_radius=shrunk, prefix_split=split,
                            gamma=gamma, alpha_star=alpha_star)


def exponent_gap(p: float) -> float:
    """Positive gap between H(2p) and the confusion-ball growth exponent.

    Defined for 0 < p < GAP_P_LIMIT as the minimum of the two parts in
    ``exponent_gap_parts``.
    """
    parts = exponent_gap_parts(p)
    return min(parts.shrunk_radius, parts.prefix_split)


def rate_margin(p: float) -> float:
    """How far above the distance-2pn packing rate a causal-channel code can go.

    min(4/7 * exponent_gap(p), H(2p) - 2p); strictly positive on the gap
    region since 4p < H(2p) there.
    """
    h2 = _entropy_2p_in_gap_region(p)
    return min(4.0 / 7.0 * exponent_gap(p), h2 - 2 * p)


@dataclass(frozen=True)
class BoundsRow:
    """One point of the capacity-bound curves.

    ``gv_lower`` is the sphere-packing (distance 2pn+1) achievable rate,
    zero from p = 1/4 on.  ``online_upper`` is the tighter of the
    random-flip bound ``shannon_upper`` and the causal-channel bound
    ``four_p_upper``.  ``exponent_gap`` / ``rate_margin`` are None outside
    the gap region H(2p) in (0, 1/2).
    """

    p: float
    gv_lower: float
    shannon_upper: float
    four_p_upper: float
    online_upper: float
    exponent_gap: float | None
    rate_margin: float | None


def capacity_bounds(p: float) -> BoundsRow:
    if not 0.0 <= p <= 0.5:
        raise ValueError(f"p must lie in [0, 1/2], got {p}")
    gv = max(0.0, 1.0 - binary_entropy(2 * p)) if p <= 0.25 else 0.0
    shannon = 1.0 - binary_entropy(p)
    four_p = max(1.0 - 4.0 * p, 0.0)
    gap = margin = None
    if 0.0 < p < GAP_P_LIMIT:
        gap = exponent_gap(p)
        margin = rate_margin(p)
    return BoundsRow(
        p=p,
        gv_lower=gv,
        shannon_upper=shannon,
        four_p_upper=four_p,
        online_upper=min(shannon, four_p),
        exponent_gap=gap,
        rate_margin=margin,
    )
