"""Jammer strategies and the transmit harnesses that enforce their limits.

Three strategy families:

* causal: decides bit by bit, seeing only the bits sent so far;
* two-step: commits a prefix error after seeing the first alpha_n bits,
  then a suffix error after seeing the whole codeword (strictly stronger
  than causal; any causal strategy embeds via ``CausalAsTwoStep``);
* full-knowledge: sees the codeword up front (the classical jammer,
  kept as a baseline).

``optimal_two_step`` exhaustively searches the best two-step attack against
nearest-neighbor decoding on desk-scale instances.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ._bits import bits_to_string, to_bits, weight
from .codebook import Codebook, min_distance, prefix_classes
from .exceptions import BudgetViolation, ScaleCeilingError, ValidationError

__all__ = [
    "ChannelBudget",
    "TwoStepError",
    "TransmitTrace",
    "CausalAdversary",
    "NeverFlip",
    "AlwaysFlip",
    "FixedPattern",
    "BscMimic",
    "TwoPatternMixture",
    "causal_transmit",
    "TwoStepAdversary",
    "CausalAsTwoStep",
    "two_step_transmit",
    "AffinePair",
    "affine_attacker",
    "OmniscientDistanceAttacker",
    "OptimalTwoStepResult",
    "optimal_two_step",
]


@dataclass
class ChannelBudget:
    """Flip budget for one transmission; overspending is never silent."""

    limit: int
    spent: int = 0

    @property
    def remaining(self) -> int:
        return self.limit - self.spent

    def try_spend(self) -> bool:
        if self.spent < self.limit:
            self.spent += 1
            return True
        return False


@dataclass(frozen=True)
class TwoStepError:
    """Errors of the two steps as full-length vectors with disjoint supports."""

    e1: np.ndarray
    e2: np.ndarray
    alpha_n: int
    p_n: int

    def __post_init__(self):
        e1 = to_bits(self.e1)
        e2 = to_bits(self.e2, e1.size)
        a = self.alpha_n
        if weight(e1[a:]):
            raise BudgetViolation("step-1 error must be supported on the prefix")
        if weight(e2[:a]):
            raise BudgetViolation("step-2 error must be supported on the suffix")
        if weight(e1) + weight(e2) > self.p_n:
            raise BudgetViolation(
                f"total weight {weight(e1) + weight(e2)} exceeds budget {self.p_n}"
            )

    @property
    def step1_flips(self) -> int:
        return weight(self.e1)

    @property
    def step2_flips(self) -> int:
        return weight(self.e2)


@dataclass
class TransmitTrace:
    """Outcome of one transmission: what was asked for and what was applied."""

    received: np.ndarray
    requested: np.ndarray
    applied: np.ndarray
    rejected: int

    @property
    def flips_used(self) -> int:
        return int(self.applied.sum())


class CausalAdversary:
    """Per-bit jammer interface.

    ``step`` is called once per position with the prefix transmitted so far
    (including the current bit) and must return whether to flip the current
    bit.  ``begin`` runs once per transmission for per-trial state.
    """

    def begin(self, n: int, rng: np.random.Generator) -> None:
        pass

    def step(self, prefix: np.ndarray, flips_left: int,
             rng: np.random.Generator) -> bool:
        raise NotImplementedError


class NeverFlip(CausalAdversary):
    def step(self, prefix, flips_left, rng):
        return False


class AlwaysFlip(CausalAdversary):
    def step(self, prefix, flips_left, rng):
        return True


class FixedPattern(CausalAdversary):
    """Applies a constant pattern; trivially causal."""

    def __init__(self, pattern):
        self.pattern = to_bits(pattern)

    def begin(self, n, rng):
        if self.pattern.size != n:
            raise ValidationError(
                f"pattern length {self.pattern.size} != codeword length {n}"
            )

    def step(self, prefix, flips_left, rng):
        return bool(self.pattern[len(prefix) - 1])


class BscMimic(CausalAdversary):
    """Flips each bit independently with probability p, quietly suppressed
    once the budget is exhausted (the draw is still consumed so the stream
    stays aligned)."""

    def __init__(self, p: float):
        if not 0.0 <= p <= 1.0:
            raise ValidationError(f"flip probability must lie in [0, 1], got {p}")
        self.p = p

    def step(self, prefix, flips_left, rng):
        want = rng.random() < self.p
        return bool(want) and flips_left > 0


class TwoPatternMixture(CausalAdversary):
    """Picks one of two constant patterns with probability 1/2 before the
    transmission starts; each realization is causal."""

    def __init__(self, pattern_a, pattern_b):
        self.patterns = np.stack([to_bits(pattern_a), to_bits(pattern_b)])
        self._active: np.ndarray | None = None

    def begin(self, n, rng):
        if self.patterns.shape[1] != n:
            raise ValidationError("pattern length mismatch")
        self._active = self.patterns[int(rng.integers(2))]

    def step(self, prefix, flips_left, rng):
        return bool(self._active[len(prefix) - 1])


def causal_transmit(x, adversary: CausalAdversary, p_n: int,
                    rng: np.random.Generator) -> TransmitTrace:
    """Run a causal jammer over one codeword.

    The harness shows the strategy exactly the prefix sent so far and clips
    any flip beyond the budget, recording it as rejected.
    """
    x = to_bits(x)
    n = x.size
    budget = ChannelBudget(limit=p_n)
    requested = np.zeros(n, dtype=np.uint8)
    applied = np.zeros(n, dtype=np.uint8)
    rejected = 0
    adversary.begin(n, rng)
    for i in range(n):
        want = bool(adversary.step(x[: i + 1], budget.remaining, rng))
        if want:
            requested[i] = 1
            if budget.try_spend():
                applied[i] = 1
            else:
                rejected += 1
    return TransmitTrace(received=x ^ applied, requested=requested,
                         applied=applied, rejected=rejected)


class TwoStepAdversary:
    """Two-step jammer interface.

    ``choose_e1`` sees only the alpha_n-bit prefix and returns a prefix-length
    error; ``choose_e2`` sees the full codeword and the applied e1 and returns
    a suffix-length error.  Weights are enforced by ``two_step_transmit``.
    """

    def choose_e1(self, prefix: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def choose_e2(self, x: np.ndarray, e1: np.ndarray,
                  rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError


class CausalAsTwoStep(TwoStepAdversary):
    """Replay a causal strategy in the two-step interface.

    Step decisions for the prefix depend only on the prefix, so the causal
    run can be split at alpha_n; the flip trace then matches
    ``causal_transmit`` bit for bit (including budget clipping).
    """

    def __init__(self, causal: CausalAdversary, n: int, p_n: int):
        self.causal = causal
        self.n = n
        self.p_n = p_n
        self._budget: ChannelBudget | None = None
        self._alpha_n: int | None = None

    def choose_e1(self, prefix, rng):
        self._budget = ChannelBudget(limit=self.p_n)
        self._alpha_n = prefix.size
        self.causal.begin(self.n, rng)
        e1 = np.zeros(prefix.size, dtype=np.uint8)
        for i in range(prefix.size):
            if bool(self.causal.step(prefix[: i + 1], self._budget.remaining, rng)):
                if self._budget.try_spend():
                    e1[i] = 1
        return e1

    def choose_e2(self, x, e1, rng):
        if self._budget is None or self._alpha_n is None:
            raise ValidationError("choose_e2 called before choose_e1")
        a = self._alpha_n
        e2 = np.zeros(x.size - a, dtype=np.uint8)
        for i in range(a, x.size):
            if bool(self.causal.step(x[: i + 1], self._budget.remaining, rng)):
                if self._budget.try_spend():
                    e2[i - a] = 1
        return e2


def two_step_transmit(x, strategy: TwoStepAdversary, alpha_n: int, p_n: int,
                      rng: np.random.Generator) -> tuple[np.ndarray, TwoStepError]:
    """Run a two-step jammer; support and weight violations raise."""
    x = to_bits(x)
    n = x.size
    if not 0 <= alpha_n <= n:
        raise ValidationError(f"alpha_n must lie in [0, n], got {alpha_n}")
    e1p = to_bits(strategy.choose_e1(x[:alpha_n].copy(), rng), alpha_n)
    if weight(e1p) > p_n:
        raise BudgetViolation(f"step-1 weight {weight(e1p)} exceeds budget {p_n}")
    e1 = np.zeros(n, dtype=np.uint8)
    e1[:alpha_n] = e1p
    e2s = to_bits(strategy.choose_e2(x.copy(), e1.copy(), rng), n - alpha_n)
    e2 = np.zeros(n, dtype=np.uint8)
    e2[alpha_n:] = e2s
    err = TwoStepError(e1=e1, e2=e2, alpha_n=alpha_n, p_n=p_n)
    return x ^ e1 ^ e2, err


@dataclass(frozen=True)
class AffinePair:
    """The codeword pair and midpoint behind the linear-code attack."""

    message_a: int
    message_b: int
    x0: np.ndarray
    y0: np.ndarray
    z: np.ndarray
    pattern_a: np.ndarray  # z xor y0
    pattern_b: np.ndarray  # z xor x0


def affine_attacker(code: Codebook, p_n: int) -> tuple[TwoPatternMixture, AffinePair]:
    """Attack on any linear code whose minimum distance is at most 2*p_n.

    Takes the lexicographically first minimum-distance codeword pair
    (x0, y0), builds the midpoint z by flipping the first ceil(d/2)
    differing coordinates of x0 toward y0, and flips every transmission by
    z^y0 or z^x0 with probability 1/2.  Both patterns weigh at most p_n and
    map any codeword w onto a word equidistant-or-closer to w ^ x0 ^ y0,
    which is again a codeword, so any decoder errs with probability >= 1/2.
    """
    d = min_distance(code)
    if d > 2 * p_n:
        raise ValidationError(
            f"attack needs a codeword pair within 2*p_n={2 * p_n}, minimum distance is {d}"
        )
    pair = None
    for ua in range(code.num_messages - 1):
        dists = np.count_nonzero(code.words[ua + 1:] != code.words[ua], axis=1)
        hits = np.flatnonzero(dists == d)
        if hits.size:
            pair = (ua, ua + 1 + int(hits[0]))
            break
    assert pair is not None
    ua, ub = pair
    x0 = code.words[ua].copy()
    y0 = code.words[ub].copy()
    differ = np.flatnonzero(x0 != y0)
    z = x0.copy()
    z[differ[: math.ceil(d / 2)]] = y0[differ[: math.ceil(d / 2)]]
    pattern_a = z ^ y0
    pattern_b = z ^ x0
    strategy = TwoPatternMixture(pattern_a, pattern_b)
    info = AffinePair(message_a=ua, message_b=ub, x0=x0, y0=y0, z=z,
                      pattern_a=pattern_a, pattern_b=pattern_b)
    return strategy, info


class OmniscientDistanceAttacker:
    """Classical full-knowledge baseline: moves the sent codeword toward its
    nearest distinct codeword, flipping up to p_n of the differing
    coordinates (lowest positions first)."""

    def __init__(self, code: Codebook, p_n: int):
        if code.num_messages < 2:
            raise ValidationError("attack needs at least two codewords")
        self.code = code
        self.p_n = p_n

    def error_pattern(self, message: int) -> np.ndarray:
        x = self.code.words[message]
        dists = np.count_nonzero(self.code.words != x, axis=1)
        dists[message] = self.code.n + 1
        target = int(dists.argmin())
        differ = np.flatnonzero(x != self.code.words[target])
        t = min(self.p_n, differ.size)
        pattern = np.zeros(self.code.n, dtype=np.uint8)
        pattern[differ[:t]] = 1
        return pattern


def _weight_patterns(length: int, max_weight: int):
    """All 0/1 vectors of the given length and weight <= max_weight, ordered
    by (weight, positions lex)."""
    out = []
    for w in range(min(length, max_weight) + 1):
        for positions in itertools.combinations(range(length), w):
            pattern = np.zeros(length, dtype=np.uint8)
            pattern[list(positions)] = 1
            out.append(pattern)
    return out


@dataclass
class OptimalTwoStepResult:
    """Outcome of the exhaustive two-step best-response search.

    ``strict_error_rate`` counts messages the jammer breaks outright;
    ``expected_error_rate`` additionally credits forced ties with their
    (t-1)/t error probability under uniform tie-breaking.  Under the
    lowest_index rule the two coincide.  ``attack_patterns`` holds, per
    message, the full error (e1 + e2) the searched strategy would apply, so
    the result replays as a channel.
    """

    alpha_n: int
    p_n: int
    tie_rule: str
    e1_rule: str
    num_messages: int
    strict_error_rate: float
    expected_error_rate: float
    prefix_e1: dict[str, str]
    attack_patterns: np.ndarray
    per_message_error: np.ndarray
    zero_e1_prefix_fraction: float | None = None

    @property
    def value(self) -> float:
        return self.expected_error_rate


def _error_probability(dists: np.ndarray, u: int, tie_rule: str) -> float:
    best = int(dists.min())
    if int(dists[u]) > best:
        return 1.0
    ties = np.flatnonzero(dists == best)
    if ties.size == 1:
        return 0.0
    if tie_rule == "lowest_index":
        return 0.0 if int(ties[0]) == u else 1.0
    return (ties.size - 1) / ties.size


def optimal_two_step(code: Codebook, alpha_n: int, p_n: int,
                     tie_rule: str = "uniform_random",
                     e1_rule: str = "optimal",
                     seed: int | None = None) -> OptimalTwoStepResult:
    """Exhaustive best response against nearest-neighbor decoding.

    Per prefix class the jammer commits one prefix error e1 (the class is
    all it has seen); per message it then picks the suffix error e2 that
    maximizes the decoding-error probability.  ``e1_rule`` selects how e1
    is chosen: "optimal" maximizes the class total, "zero" forces e1 = 0
    (the save-the-budget heuristic), "random" draws one candidate uniformly
    (seeded).  The value is exact for deterministic tie rules and the exact
    expectation under uniform tie-breaking; mixing over e1 cannot beat the
    per-prefix maximum, so the deterministic search is optimal.
    """
    if tie_rule not in ("lowest_index", "uniform_random"):
        raise ValidationError(f"unknown tie rule {tie_rule!r}")
    if e1_rule not in ("optimal", "zero", "random"):
        raise ValidationError(f"unknown e1 rule {e1_rule!r}")
    if code.num_messages > 1 << 16:
        raise ScaleCeilingError("search ceiling: at most 2^16 messages")
    if p_n > 3:
        raise ScaleCeilingError("search ceiling: p_n <= 3")
    suffix = code.n - alpha_n
    if suffix > 20:
        raise ScaleCeilingError("search ceiling: suffix length <= 20")
    rng = np.random.Generator(np.random.PCG64(0 if seed is None else seed))

    words = code.words
    m_total = code.num_messages
    attack = np.zeros((m_total, code.n), dtype=np.uint8)
    per_message = np.zeros(m_total, dtype=float)
    prefix_e1: dict[str, str] = {}
    zero_optimal = 0
    classes = prefix_classes(code, alpha_n)

    for cls in classes:
        e1_candidates = _weight_patterns(alpha_n, p_n)
        if e1_rule == "zero":
            chosen_pool = [e1_candidates[0]]
        elif e1_rule == "random":
            chosen_pool = [e1_candidates[int(rng.integers(len(e1_candidates)))]]
        else:
            chosen_pool = e1_candidates

        best_total = -1.0
        best_outcome = None
        zero_total = None
        for e1p in chosen_pool:
            q = int(e1p.sum())
            e2_candidates = _weight_patterns(suffix, p_n - q)
            totals = 0.0
            outcome = []
            for u in cls.members:
                u = int(u)
                base = words[u].copy()
                base[:alpha_n] ^= e1p
                best_err = 0.0
                best_e2 = e2_candidates[0]
                for e2s in e2_candidates:
                    received = base.copy()
                    received[alpha_n:] ^= e2s
                    dists = np.count_nonzero(words != received, axis=1)
                    err = _error_probability(dists, u, tie_rule)
                    if err > best_err:
                        best_err = err
                        best_e2 = e2s
                        if err == 1.0:
                            break
                totals += best_err
                outcome.append((u, best_err, best_e2))
            if q == 0:
                zero_total = totals
            if totals > best_total:
                best_total = totals
                best_outcome = (e1p, outcome)
        e1p, outcome = best_outcome
        if zero_total is not None and zero_total >= best_total:
            zero_optimal += 1
        prefix_e1[cls.label] = bits_to_string(e1p)
        for u, err, e2s in outcome:
            per_message[u] = err
            attack[u, :alpha_n] = e1p
            attack[u, alpha_n:] = e2s

    strict = float(np.count_nonzero(per_message == 1.0)) / m_total
    expected = float(per_message.sum()) / m_total
    return OptimalTwoStepResult(
        alpha_n=alpha_n,
        p_n=p_n,
        tie_rule=tie_rule,
        e1_rule=e1_rule,
        num_messages=m_total,
        strict_error_rate=strict,
        expected_error_rate=expected,
        prefix_e1=prefix_e1,
        attack_patterns=attack,
        per_message_error=per_message,
        zero_e1_prefix_fraction=(zero_optimal / len(classes)
                                 if e1_rule == "optimal" and classes else None),
    )
