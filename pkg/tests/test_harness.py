"""Monte Carlo engine: determinism, order independence, statistics."""

import numpy as np
import pytest

from onlinechannel import (
    ExperimentConfig,
    bound_curve_emit,
    goodness_sweep,
    run_experiment,
    sample_random_code,
    substream,
    wilson_interval,
)
from onlinechannel.exceptions import ScaleCeilingError, ValidationError
from onlinechannel.harness import ROLE_CHANNEL, ROLE_DECODER, ROLE_MESSAGE


def _config(**overrides):
    base = dict(n=12, trials=64, master_seed=5, alpha=0.5, p=2 / 12,
                num_messages=32, code_kind="random", code_seed=3,
                adversary="never_flip", tie_rule="uniform_random")
    base.update(overrides)
    return ExperimentConfig(**base)


class TestConfig:
    def test_round_half_up(self):
        cfg = _config(n=10, alpha=0.25, p=0.15)
        assert cfg.alpha_n == 3  # 2.5 rounds up
        assert cfg.p_n == 2  # 1.5 rounds up

    def test_unknown_adversary_rejected(self):
        with pytest.raises(ValidationError):
            _config(adversary="gremlin")

    def test_message_count_xor_rate(self):
        with pytest.raises(ValidationError):
            _config(rate=0.5)  # both given
        with pytest.raises(ValidationError):
            _config(num_messages=None)  # neither

    def test_resolved_echo_contains_derived_integers(self):
        resolved = _config().resolved()
        assert resolved["alpha_n"] == 6
        assert resolved["p_n"] == 2


class TestRunExperiment:
    def test_clean_channel_never_errs(self):
        result = run_experiment(_config())
        assert result.failures == 0
        assert result.error_rate == 0.0
        assert result.expected_error_rate == 0.0

    def test_conservation_and_interval(self):
        result = run_experiment(_config(adversary="bsc_mimic",
                                        adversary_params={"p": 0.3}))
        successes = sum(r.success for r in result.records)
        assert successes + result.failures == result.trials
        assert result.wilson_low <= result.error_rate <= result.wilson_high

    def test_determinism(self):
        a = run_experiment(_config(adversary="bsc_mimic"))
        b = run_experiment(_config(adversary="bsc_mimic"))
        assert [r.__dict__ for r in a.records] == [r.__dict__ for r in b.records]

    def test_seed_changes_records(self):
        a = run_experiment(_config(adversary="bsc_mimic"))
        b = run_experiment(_config(adversary="bsc_mimic", master_seed=6))
        assert [r.__dict__ for r in a.records] != [r.__dict__ for r in b.records]

    def test_order_independence_of_substreams(self):
        # recompute single trials out of order straight from the substreams
        cfg = _config(adversary="bsc_mimic", trials=16)
        result = run_experiment(cfg)
        from onlinechannel import BscMimic, causal_transmit, nearest_neighbor

        code = result.code
        for trial in reversed(range(cfg.trials)):
            rng_m = substream(cfg.master_seed, trial, ROLE_MESSAGE)
            message = int(rng_m.integers(code.num_messages))
            rng_c = substream(cfg.master_seed, trial, ROLE_CHANNEL)
            trace = causal_transmit(code.words[message], BscMimic(cfg.p),
                                    cfg.p_n, rng_c)
            rng_d = substream(cfg.master_seed, trial, ROLE_DECODER)
            decoded = nearest_neighbor(code, trace.received, cfg.tie_rule, rng_d)
            record = result.records[trial]
            assert record.message == message
            assert record.decoded == decoded.message

    def test_budget_safety_across_adversaries(self):
        for adversary, params in [("always_flip", {}),
                                  ("bsc_mimic", {"p": 0.9}),
                                  ("omniscient_distance", {})]:
            result = run_experiment(_config(adversary=adversary,
                                            adversary_params=params, trials=32))
            assert all(r.flips_used <= result.config.p_n for r in result.records)

    def test_bsc_on_packing_code_is_exactly_zero(self):
        cfg = ExperimentConfig(n=15, trials=400, master_seed=9, alpha=0.4,
                               p=2 / 15, code_kind="gv_greedy",
                               code_min_distance=5, adversary="bsc_mimic",
                               adversary_params={"p": 0.05},
                               tie_rule="lowest_index")
        result = run_experiment(cfg)
        assert result.failures == 0

    def test_decoder_ceiling_enforced(self):
        cfg = _config(n=24, num_messages=(1 << 20) + 1, trials=1)
        with pytest.raises(ScaleCeilingError):
            run_experiment(cfg)

    def test_two_step_adversaries_report_prefix_flips(self):
        cfg = _config(n=12, num_messages=48, adversary="optimal_two_step",
                      p=2 / 12, alpha=0.5, trials=48)
        result = run_experiment(cfg)
        zero = run_experiment(_config(n=12, num_messages=48,
                                      adversary="zero_e1_two_step",
                                      p=2 / 12, alpha=0.5, trials=48))
        assert result.error_rate >= 0.0
        assert zero.mean_prefix_flips == 0.0

    def test_fixed_pattern_adversary(self):
        cfg = _config(adversary="fixed_pattern",
                      adversary_params={"pattern": "110000000000"})
        result = run_experiment(cfg)
        assert all(r.flips_used == 2 for r in result.records)
        assert all(r.flips_prefix == 2 for r in result.records)


class TestWilson:
    def test_known_value(self):
        low, high = wilson_interval(5, 100)
        assert low == pytest.approx(0.021543, abs=1e-5)
        assert high == pytest.approx(0.111753, abs=1e-5)

    def test_extremes_stay_in_unit_interval(self):
        assert wilson_interval(0, 50) == (0.0, pytest.approx(0.0712, abs=1e-3))
        low, high = wilson_interval(50, 50)
        assert high == 1.0
        assert 0.9 < low < 1.0

    def test_needs_trials(self):
        with pytest.raises(ValidationError):
            wilson_interval(0, 0)


class TestGoodnessSweep:
    def test_row_count_bookkeeping(self):
        code = sample_random_code(10, 40, seed=2)
        sweep = goodness_sweep(code, alpha=0.3, p=0.1, epsilon=0.2)
        assert len(sweep.reports) == sweep.prefixes * sweep.patterns
        assert sweep.exhaustive
        assert 0.0 <= sweep.both_ok_fraction <= 1.0
        assert sum(sweep.vulnerable_histogram.values()) == len(sweep.reports)

    def test_all_distinct_prefixes_flagged(self):
        # alpha_n = n forces singleton classes; a large epsilon makes the
        # class-size window unreachable and the sweep must say so
        words = np.unique(sample_random_code(8, 30, seed=1).words, axis=0)
        from onlinechannel import Codebook

        code = Codebook(n=8, words=words, kind="explicit")
        sweep = goodness_sweep(code, alpha=1.0, p=0.0, epsilon=0.5)
        assert sweep.class_ok_fraction == 0.0
        assert all(not r.class_ok for r in sweep.reports)

    def test_zero_error_zero_budget_counts_exact_coincidences(self):
        words = np.zeros((3, 8), dtype=np.uint8)
        words[1, 0] = 1
        words[2, 7] = 1
        from onlinechannel import Codebook

        code = Codebook(n=8, words=words, kind="explicit")
        sweep = goodness_sweep(code, alpha=0.25, p=0.0, epsilon=0.1)
        # with p_n = 0 the ball is a single word: intrusions are exact hits
        by_prefix = {r.prefix: r for r in sweep.reports}
        assert by_prefix["00"].intrusion_sum == 0
        assert by_prefix["10"].intrusion_sum == 0
        # message 2 shares prefix 00 with message 0 but differs in suffix only
        assert by_prefix["00"].vulnerable_count == 0

    def test_sampled_patterns_above_limit(self):
        code = sample_random_code(16, 32, seed=3)
        sweep = goodness_sweep(code, alpha=0.5, p=3 / 16, epsilon=0.1,
                               max_patterns=7)
        assert not sweep.exhaustive
        assert sweep.patterns == 7


class TestBoundCurve:
    def test_single_point(self):
        rows = bound_curve_emit([0.1])
        assert len(rows) == 1

    def test_quarter_point_upper_is_zero(self):
        rows = bound_curve_emit([0.25])
        assert rows[0].online_upper == 0.0

    def test_packing_rate_monotone_nonincreasing(self):
        rows = bound_curve_emit(np.linspace(0.0, 0.5, 101))
        gv = [r.gv_lower for r in rows]
        assert all(a >= b for a, b in zip(gv, gv[1:]))

    def test_grid_outside_domain_rejected(self):
        with pytest.raises(ValueError):
            bound_curve_emit([0.6])
