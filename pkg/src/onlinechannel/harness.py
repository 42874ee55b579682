"""Seeded Monte Carlo experiments: sample messages, run a jammer, decode.

Reproducibility scheme: every trial derives three independent substreams
from the master seed via ``SeedSequence(master_seed, spawn_key=(trial,
role))`` with roles message=0, channel=1, decoder=2.  Trials therefore do
not share state and can be computed in any order; the same build with the
same config and seed reproduces every record bit for bit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ._bits import bits_to_string, round_half_up, to_bits, weight
from .adversary import (
    AlwaysFlip,
    BscMimic,
    CausalAdversary,
    FixedPattern,
    NeverFlip,
    OmniscientDistanceAttacker,
    affine_attacker,
    causal_transmit,
    optimal_two_step,
)
from .ball import BallSpec
from .bounds import BoundsRow, capacity_bounds
from .codebook import (
    Codebook,
    GoodnessReport,
    audit_goodness,
    gv_greedy_code,
    load_codebook,
    prefix_classes,
    random_linear_code,
    sample_random_code,
)
from .decoder import TIE_RULES, nearest_neighbor
from .exceptions import ScaleCeilingError, ValidationError

__all__ = [
    "ROLE_MESSAGE",
    "ROLE_CHANNEL",
    "ROLE_DECODER",
    "DECODER_MESSAGE_LIMIT",
    "ADVERSARIES",
    "ExperimentConfig",
    "TrialRecord",
    "ExperimentResult",
    "substream",
    "wilson_interval",
    "build_code",
    "run_experiment",
    "GoodnessSweepResult",
    "goodness_sweep",
    "bound_curve_emit",
]

ROLE_MESSAGE, ROLE_CHANNEL, ROLE_DECODER = 0, 1, 2

#: Nearest-neighbor decoding is a linear scan; configs above this are refused.
DECODER_MESSAGE_LIMIT = 1 << 20

ADVERSARIES = (
    "never_flip",
    "always_flip",
    "fixed_pattern",
    "bsc_mimic",
    "affine",
    "omniscient_distance",
    "optimal_two_step",
    "zero_e1_two_step",
)

#: Exhaustive first-step error enumeration in goodness sweeps is gated on n.
SWEEP_EXHAUSTIVE_LIMIT = 14


def substream(master_seed: int, trial: int, role: int) -> np.random.Generator:
    """Counter-based per-trial generator; see the module docstring."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(trial, role))
    return np.random.Generator(np.random.PCG64(seq))


def wilson_interval(failures: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (sane near 0 and 1)."""
    if trials <= 0:
        raise ValidationError("trials must be positive")
    phat = failures / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass
class ExperimentConfig:
    """Flat description of one simulation; fractional alpha and p are rounded
    half-up to integer bit counts (echoed back so nothing drifts silently)."""

    n: int
    trials: int
    master_seed: int
    alpha: float = 0.5
    p: float = 0.0
    num_messages: int | None = None
    rate: float | None = None
    code_kind: str = "random"
    code_seed: int = 0
    code_file: str | None = None
    code_min_distance: int | None = None
    code_k: int | None = None
    adversary: str = "never_flip"
    adversary_params: dict = field(default_factory=dict)
    tie_rule: str = "uniform_random"

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("n must be positive")
        if self.trials < 1:
            raise ValidationError("trials must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError("alpha must lie in [0, 1]")
        if not 0.0 <= self.p <= 1.0:
            raise ValidationError("p must lie in [0, 1]")
        if self.adversary not in ADVERSARIES:
            raise ValidationError(
                f"unknown adversary {self.adversary!r}; known: {', '.join(ADVERSARIES)}"
            )
        if self.tie_rule not in TIE_RULES:
            raise ValidationError(f"unknown tie rule {self.tie_rule!r}")
        if self.code_file is None and self.code_kind == "random":
            if (self.num_messages is None) == (self.rate is None):
                raise ValidationError("give exactly one of num_messages or rate")

    @property
    def alpha_n(self) -> int:
        return round_half_up(self.alpha * self.n)

    @property
    def p_n(self) -> int:
        return round_half_up(self.p * self.n)

    def resolved(self) -> dict:
        """Flat key=value view of the config with derived integers echoed."""
        out = {
            "n": self.n,
            "alpha": self.alpha,
            "p": self.p,
            "alpha_n": self.alpha_n,
            "p_n": self.p_n,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "code_kind": self.code_kind,
            "adversary": self.adversary,
            "tie_rule": self.tie_rule,
        }
        if self.num_messages is not None:
            out["num_messages"] = self.num_messages
        if self.rate is not None:
            out["rate"] = self.rate
        if self.code_file is not None:
            out["code_file"] = self.code_file
        else:
            out["code_seed"] = self.code_seed
        if self.code_min_distance is not None:
            out["code_min_distance"] = self.code_min_distance
        if self.code_k is not None:
            out["code_k"] = self.code_k
        for key in sorted(self.adversary_params):
            out[f"adv_{key}"] = self.adversary_params[key]
        return out


@dataclass
class TrialRecord:
    trial: int
    message: int
    decoded: int
    success: bool
    distance: int
    tie_count: int
    flips_used: int
    flips_prefix: int
    rejected: int
    expected_error: float


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    code: Codebook
    trials: int
    failures: int
    error_rate: float
    wilson_low: float
    wilson_high: float
    expected_error_rate: float
    mean_flips: float
    mean_prefix_flips: float
    records: list[TrialRecord]


def build_code(config: ExperimentConfig) -> Codebook:
    if config.code_file is not None:
        code = load_codebook(config.code_file)
        if code.n != config.n:
            raise ValidationError(
                f"codebook length {code.n} does not match config n={config.n}"
            )
        return code
    kind = config.code_kind
    if kind == "random":
        m = config.num_messages
        if m is None:
            m = round_half_up(2 ** (config.rate * config.n))
        return sample_random_code(config.n, m, config.code_seed)
    if kind == "gv_greedy":
        if config.code_min_distance is None:
            raise ValidationError("gv_greedy codes need code_min_distance")
        return gv_greedy_code(config.n, config.code_min_distance)
    if kind == "linear":
        if config.code_k is None:
            raise ValidationError("linear codes need code_k")
        return random_linear_code(config.n, config.code_k, config.code_seed)
    raise ValidationError(f"unknown code kind {kind!r}")


class _CausalRunner:
    def __init__(self, strategy: CausalAdversary, p_n: int):
        self.strategy = strategy
        self.p_n = p_n

    def transmit(self, x, message, rng):
        trace = causal_transmit(x, self.strategy, self.p_n, rng)
        return trace.received, trace


class _PatternTableRunner:
    """Replays a precomputed per-message error pattern (full-knowledge or
    searched two-step attacks)."""

    def __init__(self, patterns_for, p_n: int):
        self.patterns_for = patterns_for
        self.p_n = p_n

    def transmit(self, x, message, rng):
        pattern = self.patterns_for(message)
        if int(pattern.sum()) > self.p_n:
            raise ValidationError("attack pattern exceeds the flip budget")
        from .adversary import TransmitTrace

        applied = pattern.astype(np.uint8)
        trace = TransmitTrace(received=x ^ applied, requested=applied.copy(),
                              applied=applied, rejected=0)
        return trace.received, trace


def _make_runner(config: ExperimentConfig, code: Codebook):
    name = config.adversary
    params = dict(config.adversary_params)
    p_n = config.p_n
    if name == "never_flip":
        return _CausalRunner(NeverFlip(), p_n)
    if name == "always_flip":
        return _CausalRunner(AlwaysFlip(), p_n)
    if name == "fixed_pattern":
        pattern = params.get("pattern")
        if pattern is None:
            raise ValidationError("fixed_pattern needs a pattern parameter")
        return _CausalRunner(FixedPattern(to_bits(pattern, config.n)), p_n)
    if name == "bsc_mimic":
        prob = float(params.get("p", config.p))
        return _CausalRunner(BscMimic(prob), p_n)
    if name == "affine":
        strategy, _ = affine_attacker(code, p_n)
        return _CausalRunner(strategy, p_n)
    if name == "omniscient_distance":
        attacker = OmniscientDistanceAttacker(code, p_n)
        return _PatternTableRunner(attacker.error_pattern, p_n)
    if name in ("optimal_two_step", "zero_e1_two_step"):
        e1_rule = "optimal" if name == "optimal_two_step" else "zero"
        search = optimal_two_step(code, config.alpha_n, p_n,
                                  tie_rule=config.tie_rule, e1_rule=e1_rule)
        return _PatternTableRunner(lambda u: search.attack_patterns[u], p_n)
    raise ValidationError(f"unknown adversary {name!r}")


def run_experiment(config: ExperimentConfig, keep_records: bool = True) -> ExperimentResult:
    code = build_code(config)
    if code.num_messages > DECODER_MESSAGE_LIMIT:
        raise ScaleCeilingError(
            f"{code.num_messages} messages exceed the decoder ceiling {DECODER_MESSAGE_LIMIT}"
        )
    runner = _make_runner(config, code)
    alpha_n, p_n = config.alpha_n, config.p_n

    records = []
    failures = 0
    expected_total = 0.0
    flips_total = 0
    prefix_flips_total = 0
    for trial in range(config.trials):
        rng_message = substream(config.master_seed, trial, ROLE_MESSAGE)
        message = int(rng_message.integers(code.num_messages))
        x = code.words[message]
        rng_channel = substream(config.master_seed, trial, ROLE_CHANNEL)
        received, trace = runner.transmit(x, message, rng_channel)
        flips = int(np.count_nonzero(received != x))
        if flips > p_n:
            raise RuntimeError("budget safety violated; this is a bug")
        rng_decoder = substream(config.master_seed, trial, ROLE_DECODER)
        decoded = nearest_neighbor(code, received, config.tie_rule, rng_decoder)
        true_distance = int(np.count_nonzero(received != x))
        if true_distance > decoded.distance:
            expected = 1.0
        elif decoded.tie_count > 1:
            expected = (decoded.tie_count - 1) / decoded.tie_count
        else:
            expected = 0.0
        success = decoded.message == message
        failures += not success
        expected_total += expected
        flips_total += trace.flips_used
        prefix_flips_total += int(trace.applied[:alpha_n].sum())
        if keep_records:
            records.append(TrialRecord(
                trial=trial, message=message, decoded=decoded.message,
                success=success, distance=decoded.distance,
                tie_count=decoded.tie_count, flips_used=trace.flips_used,
                flips_prefix=int(trace.applied[:alpha_n].sum()),
                rejected=trace.rejected, expected_error=expected,
            ))

    low, high = wilson_interval(failures, config.trials)
    return ExperimentResult(
        config=config,
        code=code,
        trials=config.trials,
        failures=failures,
        error_rate=failures / config.trials,
        wilson_low=low,
        wilson_high=high,
        expected_error_rate=expected_total / config.trials,
        mean_flips=flips_total / config.trials,
        mean_prefix_flips=prefix_flips_total / config.trials,
        records=records,
    )


@dataclass
class GoodnessSweepResult:
    """Aggregate of goodness audits over (prefix, first-step error) pairs.

    Purely descriptive: at desk scale the asymptotic success probabilities
    are out of reach, so the sweep reports pass fractions and the
    distribution of vulnerable-message counts without asserting rates.
    """

    alpha_n: int
    p_n: int
    epsilon_n: float
    prefixes: int
    patterns: int
    exhaustive: bool
    reports: list[GoodnessReport]
    class_ok_fraction: float
    intrusion_ok_fraction: float
    both_ok_fraction: float
    vulnerable_histogram: dict[int, int]


def _prefix_error_patterns(alpha_n: int, p_n: int, n: int):
    for w in range(min(alpha_n, p_n) + 1):
        for positions in itertools.combinations(range(alpha_n), w):
            e = np.zeros(n, dtype=np.uint8)
            e[list(positions)] = 1
            yield e, w


def goodness_sweep(code: Codebook, alpha: float, p: float, epsilon: float,
                   seed: int = 0, max_patterns: int | None = None) -> GoodnessSweepResult:
    """Audit every prefix present in the code against first-step errors of
    weight 0..p_n; errors are enumerated exhaustively for n <= 14 and
    sampled otherwise (or when ``max_patterns`` caps them)."""
    n = code.n
    alpha_n = round_half_up(alpha * n)
    p_n = round_half_up(p * n)
    epsilon_n = epsilon * n
    patterns = list(_prefix_error_patterns(alpha_n, p_n, n))
    exhaustive = n <= SWEEP_EXHAUSTIVE_LIMIT and (max_patterns is None
                                                  or len(patterns) <= max_patterns)
    if not exhaustive:
        rng = np.random.Generator(np.random.PCG64(seed))
        cap = max_patterns if max_patterns is not None else 64
        picks = rng.choice(len(patterns), size=min(cap, len(patterns)), replace=False)
        patterns = [patterns[i] for i in sorted(picks)]

    classes = prefix_classes(code, alpha_n)
    reports = []
    histogram: dict[int, int] = {}
    class_ok = intrusion_ok = both_ok = 0
    for cls in classes:
        for e, w in patterns:
            spec = BallSpec(n=n, alpha_n=alpha_n, p_n=p_n, q_n=w)
            report = audit_goodness(code, cls.prefix, e, epsilon_n, spec)
            reports.append(report)
            class_ok += report.class_ok
            intrusion_ok += report.intrusion_ok
            both_ok += report.class_ok and report.intrusion_ok
            histogram[report.vulnerable_count] = histogram.get(
                report.vulnerable_count, 0) + 1
    total = len(reports)
    return GoodnessSweepResult(
        alpha_n=alpha_n,
        p_n=p_n,
        epsilon_n=epsilon_n,
        prefixes=len(classes),
        patterns=len(patterns),
        exhaustive=exhaustive,
        reports=reports,
        class_ok_fraction=class_ok / total if total else 0.0,
        intrusion_ok_fraction=intrusion_ok / total if total else 0.0,
        both_ok_fraction=both_ok / total if total else 0.0,
        vulnerable_histogram=histogram,
    )


def bound_curve_emit(p_grid) -> list[BoundsRow]:
    """Capacity-bound rows for each p in the grid (all within [0, 1/2])."""
    rows = []
    for p in p_grid:
        rows.append(capacity_bounds(float(p)))
    return rows
