"""Nearest-neighbor decoding with explicit tie handling.

A plain linear scan over the codebook; correctness-first, no index
structures.  The harness enforces the message-count ceiling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._bits import to_bits
from .codebook import Codebook
from .exceptions import ValidationError

__all__ = ["Decoded", "nearest_neighbor", "TIE_RULES"]

TIE_RULES = ("lowest_index", "uniform_random")


@dataclass(frozen=True)
class Decoded:
    message: int
    distance: int
    tie_count: int


def nearest_neighbor(code: Codebook, received, tie_rule: str = "uniform_random",
                     rng: np.random.Generator | None = None) -> Decoded:
    """Message whose codeword is closest to ``received``.

    Ties are broken by the smallest message index or uniformly at random
    with the supplied generator.  The default rule is uniform_random, the
    natural choice for a randomized receiver; lowest_index gives fully
    deterministic regressions.
    """
    if code.num_messages == 0:
        raise ValidationError("cannot decode against an empty code")
    received = to_bits(received, code.n)
    distances = np.count_nonzero(code.words != received, axis=1)
    best = int(distances.min())
    ties = np.flatnonzero(distances == best)
    if tie_rule == "lowest_index":
        pick = int(ties[0])
    elif tie_rule == "uniform_random":
        if rng is None:
            rng = np.random.default_rng()
        pick = int(ties[rng.integers(ties.size)])
    else:
        raise ValidationError(f"unknown tie rule {tie_rule!r}")
    return Decoded(message=pick, distance=best, tie_count=int(ties.size))
