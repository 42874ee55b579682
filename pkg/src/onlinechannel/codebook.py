"""Code constructions, prefix-class bookkeeping, and combinatorial audits.

Constructions: i.i.d. random codes, greedy sphere-packing codes built by a
lexicographic sweep, and GF(2) linear codes from a generator matrix.

Audits: per-prefix class sizes, the two goodness conditions (class-size
window and cross-prefix ball-intrusion mass), the count of vulnerable
messages per (prefix, first-step error), and the close-pair deletion sets
that make each prefix class a distance-2p_n+1 packing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._bits import bits_from_int, bits_to_string, to_bits, weight
from .ball import EXACT_LIMIT, BallSpec, ball_size
from .exceptions import ScaleCeilingError, ValidationError

__all__ = [
    "Codebook",
    "PrefixClass",
    "GoodnessReport",
    "DistanceAuditReport",
    "sample_random_code",
    "gv_greedy_code",
    "linear_code",
    "random_linear_code",
    "gf2_rank",
    "min_distance",
    "prefix_classes",
    "audit_goodness",
    "audit_distance",
    "restrict_code",
    "save_codebook",
    "load_codebook",
    "CODEBOOK_FORMAT_VERSION",
]

CODEBOOK_FORMAT_VERSION = 1
KINDS = ("random", "gv_greedy", "linear", "explicit")

#: Lexicographic greedy construction enumerates all 2^n words.
GV_SWEEP_LIMIT = 18
#: Pairwise minimum-distance scans are quadratic in the message count.
PAIRWISE_SCAN_LIMIT = 4096
#: Full XOR-closure validation of loaded linear codes is quadratic too.
LINEAR_CLOSURE_CHECK_LIMIT = 4096


@dataclass
class Codebook:
    """An indexed list of equal-length binary codewords.

    ``words`` has shape (num_messages, n) and is frozen after construction.
    ``source_indices`` maps the current message index to the index in the
    code this one was restricted from (None for unrestricted codes).
    """

    n: int
    words: np.ndarray
    kind: str
    seed: int | None = None
    rate: float | None = None
    source_indices: np.ndarray | None = None

    def __post_init__(self):
        self.words = np.ascontiguousarray(self.words, dtype=np.uint8)
        if self.words.ndim != 2 or self.words.shape[1] != self.n:
            raise ValidationError(
                f"words must have shape (num_messages, {self.n}), got {self.words.shape}"
            )
        if self.words.size and self.words.max() > 1:
            raise ValidationError("codewords must be 0/1 valued")
        if self.kind not in KINDS:
            raise ValidationError(f"unknown code kind {self.kind!r}")
        if self.kind == "linear":
            self._check_linear()
        self.words.setflags(write=False)
        if self.source_indices is not None:
            self.source_indices = np.asarray(self.source_indices, dtype=np.int64)

    def _check_linear(self):
        if not (self.words.sum(axis=1) == 0).any():
            raise ValidationError("a linear code must contain the zero word")
        m = self.num_messages
        if m > LINEAR_CLOSURE_CHECK_LIMIT:
            return  # closure check skipped above the quadratic ceiling
        seen = {bits_to_string(w) for w in self.words}
        for a in range(m):
            for b in range(a + 1, m):
                if bits_to_string(self.words[a] ^ self.words[b]) not in seen:
                    raise ValidationError("linear code is not closed under XOR")

    @property
    def num_messages(self) -> int:
        return self.words.shape[0]

    def word(self, message: int) -> np.ndarray:
        return self.words[message]


def sample_random_code(n: int, num_messages: int, seed: int) -> Codebook:
    """Each codeword drawn i.i.d. uniform over {0,1}^n; deterministic in seed."""
    if num_messages < 1:
        raise ValidationError("need at least one message")
    rng = np.random.Generator(np.random.PCG64(seed))
    words = rng.integers(0, 2, size=(num_messages, n), dtype=np.uint8)
    return Codebook(n=n, words=words, kind="random", seed=seed,
                    rate=math.log2(num_messages) / n if n else None)


def gv_greedy_code(n: int, min_distance: int) -> Codebook:
    """Greedy packing: sweep {0,1}^n in lexicographic order, keep a word iff
    it is at distance >= min_distance from everything kept so far.

    The size always meets the volume bound 2^n / sum_{i<d} C(n, i).
    """
    if not 1 <= min_distance <= n:
        raise ValidationError(f"min_distance must lie in [1, n], got {min_distance}")
    if n > GV_SWEEP_LIMIT:
        raise ScaleCeilingError(
            f"greedy sweep enumerates 2^n words; n={n} exceeds the ceiling {GV_SWEEP_LIMIT}"
        )
    accepted: list[int] = []
    for cand in range(1 << n):
        if all((cand ^ kept).bit_count() >= min_distance for kept in accepted):
            accepted.append(cand)
    words = np.stack([bits_from_int(v, n) for v in accepted])
    return Codebook(n=n, words=words, kind="gv_greedy",
                    rate=math.log2(len(accepted)) / n)


def gf2_rank(matrix) -> int:
    """Rank over GF(2) by Gaussian elimination."""
    m = np.array(matrix, dtype=np.uint8) % 2
    if m.ndim != 2:
        raise ValidationError("generator must be a 2-D bit matrix")
    rank = 0
    rows, cols = m.shape
    for col in range(cols):
        pivot = None
        for r in range(rank, rows):
            if m[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(rows):
            if r != rank and m[r, col]:
                m[r] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def linear_code(n: int, k: int, generator, seed: int | None = None) -> Codebook:
    """All 2^k XOR combinations of the k generator rows.

    The message index, written in binary MSB-first over k bits, is the
    coefficient vector (bit i selects row i).  Requires full row rank.
    """
    gen = np.array(generator, dtype=np.uint8) % 2
    if gen.shape != (k, n):
        raise ValidationError(f"generator must be {k}x{n}, got {gen.shape}")
    if gf2_rank(gen) != k:
        raise ValidationError("generator rows are not independent over GF(2)")
    coeffs = np.stack([bits_from_int(u, k) for u in range(1 << k)])
    words = (coeffs @ gen) % 2
    return Codebook(n=n, words=words.astype(np.uint8), kind="linear",
                    seed=seed, rate=k / n)


def random_linear_code(n: int, k: int, seed: int) -> Codebook:
    """Linear code from a random generator matrix, redrawn until full rank."""
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(1000):
        gen = rng.integers(0, 2, size=(k, n), dtype=np.uint8)
        if gf2_rank(gen) == k:
            return linear_code(n, k, gen, seed=seed)
    raise ValidationError(f"could not draw a rank-{k} generator for n={n}")


def min_distance(code: Codebook, method: str = "auto") -> int:
    """Minimum pairwise Hamming distance.

    ``weight`` uses the minimum nonzero codeword weight (valid for linear
    codes); ``pairwise`` scans all pairs; ``auto`` picks by code kind.
    """
    if code.num_messages < 2:
        raise ValidationError("minimum distance needs at least two messages")
    if method == "auto":
        method = "weight" if code.kind == "linear" else "pairwise"
    if method == "weight":
        weights = code.words.sum(axis=1)
        nonzero = weights[weights > 0]
        if nonzero.size == 0:
            raise ValidationError("all codewords are zero")
        return int(nonzero.min())
    if method != "pairwise":
        raise ValidationError(f"unknown method {method!r}")
    m = code.num_messages
    if m > PAIRWISE_SCAN_LIMIT:
        raise ScaleCeilingError(
            f"pairwise scan over {m} messages exceeds the ceiling {PAIRWISE_SCAN_LIMIT}"
        )
    best = code.n
    for u in range(m - 1):
        d = np.count_nonzero(code.words[u + 1:] != code.words[u], axis=1).min()
        best = min(best, int(d))
    return best


@dataclass
class PrefixClass:
    """Messages whose codewords share one alpha_n-bit prefix."""

    prefix: np.ndarray
    members: np.ndarray
    complement_size: int

    @property
    def label(self) -> str:
        return bits_to_string(self.prefix)


def prefix_classes(code: Codebook, alpha_n: int) -> list[PrefixClass]:
    """Partition of message indices by codeword prefix, in prefix lex order."""
    if not 0 <= alpha_n <= code.n:
        raise ValidationError(f"alpha_n must lie in [0, n], got {alpha_n}")
    m = code.num_messages
    prefixes = code.words[:, :alpha_n]
    uniq, inverse = np.unique(prefixes, axis=0, return_inverse=True)
    classes = []
    for idx in range(uniq.shape[0]):
        members = np.flatnonzero(inverse == idx)
        classes.append(PrefixClass(prefix=uniq[idx], members=members,
                                   complement_size=m - members.size))
    return classes


@lru_cache(maxsize=4096)
def _ball_volume_cum(length: int, radius: int) -> int:
    """sum_{j<=radius} C(length, j); 0 for radius < 0."""
    if radius < 0:
        return 0
    return sum(math.comb(length, j) for j in range(min(radius, length) + 1))


@dataclass
class GoodnessReport:
    """Audit of one (prefix m, first-step error e) pair.

    ``class_ok`` checks 2^(eps_n - 1) <= |class| <= 2^(eps_n + 1).
    ``intrusion_sum`` is the total, over all words x with prefix m, of
    off-prefix codewords landing in the ball around x + e; ``intrusion_ok``
    compares it against ball_count * 2^(eps_n + 2).
    ``vulnerable_count`` is the number of in-class messages whose own ball
    (around codeword + e) contains at least one off-prefix codeword.
    ``intrusion_sum_codewords`` restricts the x-sum to in-class codewords
    (a descriptive secondary statistic).
    """

    prefix: str
    error: str
    spec: BallSpec
    epsilon_n: float
    class_size: int
    class_lower: float
    class_upper: float
    class_ok: bool
    intrusion_sum: int
    intrusion_threshold: float
    intrusion_ok: bool
    vulnerable_count: int
    intrusion_sum_codewords: int
    ball_count: int


def audit_goodness(code: Codebook, m, e, epsilon_n: float,
                   spec: BallSpec) -> GoodnessReport:
    """Compute all goodness quantities for a (prefix, first-step error) pair.

    The intrusion sum over all 2^(n - alpha_n) words with prefix m is folded,
    per off-prefix codeword, into a suffix ball volume: a codeword at prefix
    distance i0 from m + e lies in the ball around x + e for exactly
    sum_{j <= 2 p_n - q_n - i0} C(suffix, j) choices of the suffix of x
    (none if i0 > p_n).
    """
    a = spec.alpha_n
    m = to_bits(m, a)
    e = to_bits(e, code.n)
    if spec.n != code.n:
        raise ValidationError(f"spec length {spec.n} != code length {code.n}")
    if weight(e[a:]):
        raise ValidationError("first-step error must be supported on the prefix")
    if weight(e) != spec.q_n:
        raise ValidationError(
            f"error weight {weight(e)} does not match spec q_n={spec.q_n}"
        )
    if code.n > EXACT_LIMIT:
        raise ScaleCeilingError("goodness audits need exact ball counts (n <= 256)")

    ball_count = ball_size(spec).exact
    assert ball_count is not None
    words = code.words
    in_class = (words[:, :a] == m).all(axis=1) if a else np.ones(len(words), bool)
    class_idx = np.flatnonzero(in_class)
    comp_idx = np.flatnonzero(~in_class)

    p_n, q_n, s = spec.p_n, spec.q_n, spec.suffix_n
    z_pref = m ^ e[:a]
    # prefix distance of each off-prefix codeword to the corrupted prefix
    if a:
        i0 = np.count_nonzero(words[comp_idx, :a] != z_pref, axis=1)
    else:
        i0 = np.zeros(comp_idx.size, dtype=int)

    intrusion_sum = 0
    for dist in i0:
        if dist <= p_n:
            intrusion_sum += _ball_volume_cum(s, 2 * p_n - q_n - dist)

    budget = p_n - q_n
    vulnerable = 0
    t_total = 0
    comp_suffix = words[comp_idx, a:]
    for u in class_idx:
        z_suf = words[u, a:] ^ e[a:]
        j = np.count_nonzero(comp_suffix != z_suf, axis=1) if s else np.zeros(
            comp_idx.size, dtype=int)
        member = (i0 + np.maximum(0, j - budget)) <= p_n
        t_u = int(member.sum())
        t_total += t_u
        vulnerable += t_u >= 1

    class_lower = 2.0 ** (epsilon_n - 1)
    class_upper = 2.0 ** (epsilon_n + 1)
    threshold = ball_count * 2.0 ** (epsilon_n + 2)
    return GoodnessReport(
        prefix=bits_to_string(m),
        error=bits_to_string(e),
        spec=spec,
        epsilon_n=epsilon_n,
        class_size=class_idx.size,
        class_lower=class_lower,
        class_upper=class_upper,
        class_ok=bool(class_lower <= class_idx.size <= class_upper),
        intrusion_sum=intrusion_sum,
        intrusion_threshold=threshold,
        intrusion_ok=bool(intrusion_sum <= threshold),
        vulnerable_count=int(vulnerable),
        intrusion_sum_codewords=t_total,
        ball_count=ball_count,
    )


@dataclass
class DistanceAuditReport:
    """Per-prefix deletion sets that leave no same-prefix pair within 2*p_n.

    ``removals`` maps each prefix label to the messages greedily removed
    (higher index of each close pair, pairs visited in lex order).
    ``oversized_prefixes`` are those whose removal set reached the
    2^(eps_n - gamma*n) threshold; their removals are not applied.
    ``kept_messages`` is the restricted message domain.
    """

    alpha_n: int
    p_n: int
    gamma: float
    epsilon_n: float
    removal_threshold: float
    removals: dict[str, np.ndarray]
    oversized_prefixes: set[str]
    kept_messages: np.ndarray
    num_messages: int


def audit_distance(code: Codebook, alpha_n: int, p_n: int,
                   gamma: float) -> DistanceAuditReport:
    if gamma < 0:
        raise ValidationError(f"gamma must be nonnegative, got {gamma}")
    if p_n < 0:
        raise ValidationError(f"p_n must be nonnegative, got {p_n}")
    m_total = code.num_messages
    epsilon_n = math.log2(m_total) - alpha_n
    threshold = 2.0 ** (epsilon_n - gamma * code.n)

    removals: dict[str, np.ndarray] = {}
    oversized: set[str] = set()
    removed_all: list[int] = []
    for cls in prefix_classes(code, alpha_n):
        members = cls.members
        alive = set(members.tolist())
        removed = []
        for ai in range(members.size - 1):
            u1 = int(members[ai])
            if u1 not in alive:
                continue
            for bi in range(ai + 1, members.size):
                u2 = int(members[bi])
                if u2 not in alive:
                    continue
                if np.count_nonzero(code.words[u1] != code.words[u2]) <= 2 * p_n:
                    alive.discard(u2)
                    removed.append(u2)
        removals[cls.label] = np.array(sorted(removed), dtype=np.int64)
        if len(removed) >= threshold:
            oversized.add(cls.label)
        else:
            removed_all.extend(removed)

    keep_mask = np.ones(m_total, dtype=bool)
    keep_mask[removed_all] = False
    return DistanceAuditReport(
        alpha_n=alpha_n,
        p_n=p_n,
        gamma=gamma,
        epsilon_n=epsilon_n,
        removal_threshold=threshold,
        removals=removals,
        oversized_prefixes=oversized,
        kept_messages=np.flatnonzero(keep_mask),
        num_messages=m_total,
    )


def restrict_code(code: Codebook, report: DistanceAuditReport) -> Codebook:
    """Drop the removal sets of every non-oversized prefix.

    Returns the code unchanged when nothing is removed.  Otherwise the
    result has kind "explicit" (restriction does not preserve linearity)
    and carries an index map back to the original messages.
    """
    if report.num_messages != code.num_messages:
        raise ValidationError("audit report does not match this code")
    kept = report.kept_messages
    if kept.size == 0:
        raise ValidationError("restriction would remove every message")
    if kept.size == code.num_messages:
        return code
    source = code.source_indices[kept] if code.source_indices is not None else kept.copy()
    return Codebook(n=code.n, words=code.words[kept], kind="explicit",
                    seed=code.seed, rate=None, source_indices=source)


def save_codebook(code: Codebook, path) -> None:
    """Versioned text format: header ``n=<int> messages=<int> kind=<tag>
    version=<int>`` then one 0/1 string per codeword."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"n={code.n} messages={code.num_messages} kind={code.kind} "
                 f"version={CODEBOOK_FORMAT_VERSION}\n")
        for word in code.words:
            fh.write(bits_to_string(word) + "\n")


def load_codebook(path) -> Codebook:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        fields = {}
        for token in header.split():
            if "=" not in token:
                raise ValidationError(f"malformed codebook header: {header!r}")
            key, value = token.split("=", 1)
            fields[key] = value
        for key in ("n", "messages", "kind"):
            if key not in fields:
                raise ValidationError(f"codebook header missing {key!r}")
        version = int(fields.get("version", 1))
        if version != CODEBOOK_FORMAT_VERSION:
            raise ValidationError(f"unsupported codebook format version {version}")
        n = int(fields["n"])
        count = int(fields["messages"])
        kind = fields["kind"]
        if kind not in KINDS:
            raise ValidationError(f"unknown code kind {kind!r}")
        words = []
        for line in fh:
            line = line.strip()
            if line:
                words.append(to_bits(line, n))
    if len(words) != count:
        raise ValidationError(f"expected {count} codewords, found {len(words)}")
    return Codebook(n=n, words=np.stack(words) if words else
                    np.zeros((0, n), dtype=np.uint8), kind=kind)
