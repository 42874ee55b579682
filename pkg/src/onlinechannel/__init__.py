"""Desk-scale laboratory for binary coding against causal (online) jammers.

A causal jammer decides whether to flip bit i after seeing only bits
1..i, under a total budget of p*n flips.  The package provides the
capacity-bound curves for that channel, exact combinatorics of the
two-step confusion ball, code constructions with their packing and
goodness audits, concrete jammer strategies (including an exhaustive
two-step best response), a nearest-neighbor decoder, and a seeded Monte
Carlo harness — all sized so that brute-force oracles can check every
quantity.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundsRow,
    GAP_P_LIMIT,
    binary_entropy,
    binary_entropy_inverse,
    capacity_bounds,
    exponent_gap,
    exponent_gap_parts,
    rate_margin,
    split_entropy,
)
from .ball import (
    BallSize,
    BallSpec,
    ball_contains,
    ball_exponent_check,
    ball_size,
    ball_size_upper_bound,
)
from .codebook import (
    Codebook,
    DistanceAuditReport,
    GoodnessReport,
    PrefixClass,
    audit_distance,
    audit_goodness,
    gf2_rank,
    gv_greedy_code,
    linear_code,
    load_codebook,
    min_distance,
    prefix_classes,
    random_linear_code,
    restrict_code,
    sample_random_code,
    save_codebook,
)
from .decoder import Decoded, nearest_neighbor
from .adversary import (
    AffinePair,
    AlwaysFlip,
    BscMimic,
    CausalAdversary,
    CausalAsTwoStep,
    ChannelBudget,
    FixedPattern,
    NeverFlip,
    OmniscientDistanceAttacker,
    OptimalTwoStepResult,
    TransmitTrace,
    TwoPatternMixture,
    TwoStepAdversary,
    TwoStepError,
    affine_attacker,
    causal_transmit,
    optimal_two_step,
    two_step_transmit,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    GoodnessSweepResult,
    TrialRecord,
    bound_curve_emit,
    build_code,
    goodness_sweep,
    run_experiment,
    substream,
    wilson_interval,
)
from .exceptions import BudgetViolation, ScaleCeilingError, ValidationError
