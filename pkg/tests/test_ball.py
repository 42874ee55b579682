"""Confusion-ball counting against brute-force enumeration."""

import math

import numpy as np
import pytest

from onlinechannel import (
    BallSpec,
    ball_contains,
    ball_exponent_check,
    ball_size,
    ball_size_upper_bound,
    binary_entropy,
)
from onlinechannel._bits import bits_from_int
from onlinechannel.exceptions import ValidationError

from oracles import (
    ball_members_bruteforce,
    ball_members_literal,
    valid_ball_specs,
)


class TestBallSpec:
    def test_rejects_bad_parameters(self):
        with pytest.raises(ValidationError):
            BallSpec(n=4, alpha_n=5, p_n=1, q_n=0)
        with pytest.raises(ValidationError):
            BallSpec(n=4, alpha_n=2, p_n=5, q_n=0)
        with pytest.raises(ValidationError):
            BallSpec(n=4, alpha_n=2, p_n=2, q_n=3)
        with pytest.raises(ValidationError):
            BallSpec(n=8, alpha_n=1, p_n=3, q_n=2)  # q_n > alpha_n


class TestMembership:
    def test_center_always_inside(self):
        for spec in valid_ball_specs(6, max_p=2):
            z = bits_from_int(37 & ((1 << 6) - 1), 6)
            assert ball_contains(z, z, spec)

    def test_length_mismatch(self):
        spec = BallSpec(n=4, alpha_n=2, p_n=1, q_n=0)
        with pytest.raises(ValidationError):
            ball_contains([0, 0, 0, 0], [0, 0, 0], spec)

    def test_matches_literal_double_loop(self):
        # existential over every (y, w) pair, tiny lengths only
        for n in (4, 5, 6):
            for spec in valid_ball_specs(n, max_p=2):
                for z in (0, 21 & ((1 << n) - 1)):
                    members = ball_members_literal(spec, z)
                    z_bits = bits_from_int(z, n)
                    for y in range(1 << n):
                        got = ball_contains(z_bits, bits_from_int(y, n), spec)
                        assert got == (y in members), (spec, z, y)


class TestBallSize:
    def test_known_small_case(self):
        size = ball_size(BallSpec(n=4, alpha_n=2, p_n=1, q_n=0))
        assert size.exact == 10

    def test_zero_budget(self):
        for n in (1, 5, 9):
            spec = BallSpec(n=n, alpha_n=n // 2, p_n=0, q_n=0)
            assert ball_size(spec).exact == 1

    def test_budget_spent_reduces_to_hamming_ball(self):
        for n in (4, 7, 10):
            for p_n in (1, 2, 3):
                for alpha_n in (p_n, max(p_n, n // 2), n):
                    spec = BallSpec(n=n, alpha_n=alpha_n, p_n=p_n, q_n=p_n)
                    want = sum(math.comb(n, i) for i in range(p_n + 1))
                    assert ball_size(spec).exact == want
                    assert len(ball_members_bruteforce(spec)) == want

    def test_matches_bruteforce_sample(self):
        # the exhaustive grid lives in the acceptance suite
        for n in (5, 8):
            for spec in valid_ball_specs(n, max_p=2):
                assert ball_size(spec).exact == len(ball_members_bruteforce(spec))

    def test_center_independence(self):
        spec = BallSpec(n=8, alpha_n=3, p_n=2, q_n=1)
        rng = np.random.default_rng(3)
        sizes = {len(ball_members_bruteforce(spec, int(z)))
                 for z in rng.integers(0, 1 << 8, size=100)}
        assert len(sizes) == 1
        assert sizes.pop() == ball_size(spec).exact

    def test_monotone_in_budget(self):
        for n in (6, 10):
            for alpha_n in (2, n // 2):
                sizes = [ball_size(BallSpec(n=n, alpha_n=alpha_n, p_n=p, q_n=0)).exact
                         for p in range(4)]
                assert all(a <= b for a, b in zip(sizes, sizes[1:]))

    def test_antitone_in_spent_budget(self):
        for n in (6, 10):
            spec0 = None
            sizes = [ball_size(BallSpec(n=n, alpha_n=3, p_n=3, q_n=q)).exact
                     for q in range(4)]
            assert all(a >= b for a, b in zip(sizes, sizes[1:]))

    def test_exact_and_log_paths_agree_at_boundary(self):
        spec = BallSpec(n=256, alpha_n=150, p_n=12, q_n=4)
        exact = ball_size(spec, mode="exact")
        logs = ball_size(spec, mode="log2")
        assert exact.exact is not None and logs.exact is None
        assert abs(exact.log2_value - logs.log2_value) <= 1e-9

    def test_auto_mode_switch(self):
        assert ball_size(BallSpec(n=256, alpha_n=100, p_n=3, q_n=0)).mode == "exact"
        assert ball_size(BallSpec(n=257, alpha_n=100, p_n=3, q_n=0)).mode == "log2"


class TestUpperBound:
    def test_dominates_exact_on_grid(self):
        for n in (4, 6, 9):
            for spec in valid_ball_specs(n, max_p=2):
                assert (ball_size_upper_bound(spec).exact
                        >= ball_size(spec).exact)

    def test_trivial_cases(self):
        assert ball_size_upper_bound(BallSpec(n=6, alpha_n=3, p_n=0, q_n=0)).exact == 1
        assert ball_size_upper_bound(BallSpec(n=4, alpha_n=2, p_n=1, q_n=0)).exact >= 10

    def test_log_path_consistency(self):
        spec = BallSpec(n=200, alpha_n=130, p_n=6, q_n=2)
        exact = ball_size_upper_bound(spec, mode="exact")
        logs = ball_size_upper_bound(spec, mode="log2")
        assert abs(exact.log2_value - logs.log2_value) <= 1e-9


class TestExponentCheck:
    def test_rows_and_slack(self):
        rows = ball_exponent_check(0.03, [100, 200], alpha_points=3)
        assert len(rows) == 2 * 3 * 3
        for row in rows:
            assert row.slack >= 0
            assert row.exponent_bound < binary_entropy(0.06)

    def test_spent_budget_rows_track_small_ball(self):
        # with q = p the ball is a plain radius-p_n Hamming ball, so its
        # exponent approaches H(p), well under the H(2p)-based bound
        rows = [r for r in ball_exponent_check(0.03, [300]) if r.q == 0.03]
        for row in rows:
            assert abs(row.rate - binary_entropy(0.03)) < 0.03
            assert row.rate < row.exponent_bound

    def test_degenerate_p_rejected(self):
        with pytest.raises(ValueError):
            ball_exponent_check(0.2, [100])

    def test_alpha_outside_region_rejected(self):
        with pytest.raises(ValidationError):
            ball_exponent_check(0.03, [100], alpha_values=[0.5])

    def test_bad_q_rejected(self):
        with pytest.raises(ValidationError):
            ball_exponent_check(0.03, [100], q_values=[0.2])
