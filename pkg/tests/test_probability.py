"""Tests for the birthday problem with a transverse map and the coupon collector."""

import math
from fractions import Fraction

import numpy as np
import pytest

from hypsurf.errors import InvalidParameter
from hypsurf.random_models.probability import (
    BirthdayConfig,
    TransverseKind,
    birthday_exact,
    birthday_mc,
    birthday_sweep,
    coupon_collector_mc,
    coupon_sweep,
    harmonic_expectation,
    sweep_ell,
)


# ── birthday problem ────────────────────────────────────────────


class TestBirthdayConfig:
    def test_transverse_from_string(self):
        cfg = BirthdayConfig(n=5, ell=2, transverse="identity")
        assert cfg.transverse is TransverseKind.IDENTITY

    def test_good_set(self):
        cfg = BirthdayConfig(n=10, ell=2, alpha=0.25)
        assert cfg.good_size == 3
        np.testing.assert_array_equal(cfg.transverse_map(), [1, 2, 3, -1, -1, -1, -1, -1, -1, -1])

    def test_shift_wraps(self):
        np.testing.assert_array_equal(BirthdayConfig(n=3, ell=2).transverse_map(), [1, 2, 0])

    def test_table(self):
        cfg = BirthdayConfig(n=4, ell=2, alpha=0.5, transverse="table", table=(3, 0))
        np.testing.assert_array_equal(cfg.transverse_map(), [3, 0, -1, -1])

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n": 0, "ell": 2},
            {"n": 5, "ell": 0},
            {"n": 5, "ell": 2, "alpha": 0.0},
            {"n": 5, "ell": 2, "alpha": 1.5},
            {"n": 5, "ell": 2, "trials": 0},
            {"n": 4, "ell": 2, "alpha": 0.5, "transverse": "table"},
            {"n": 4, "ell": 2, "alpha": 0.5, "transverse": "table", "table": (1, 1)},
            {"n": 4, "ell": 2, "alpha": 0.5, "transverse": "table", "table": (0, 4)},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidParameter):
            BirthdayConfig(**kwargs)

    def test_unknown_transverse(self):
        with pytest.raises(ValueError):
            BirthdayConfig(n=4, ell=2, transverse="rotate")

    def test_poisson_estimate(self):
        cfg = BirthdayConfig(n=100, ell=10, alpha=0.5)
        assert cfg.poisson_estimate() == pytest.approx(math.exp(-50 * 10 * 9 / 100**2))


class TestBirthdayExact:
    def test_shift(self):
        assert birthday_exact(BirthdayConfig(n=3, ell=2)) == Fraction(1, 3)

    def test_identity_with_diagonal(self):
        assert birthday_exact(BirthdayConfig(n=3, ell=2, transverse="identity", allow_diagonal=True)) == 0

    def test_identity_without_diagonal(self):
        cfg = BirthdayConfig(n=3, ell=2, transverse="identity", allow_diagonal=False)
        assert birthday_exact(cfg) == Fraction(2, 3)

    def test_single_draw_without_diagonal_never_detects(self):
        cfg = BirthdayConfig(n=4, ell=1, transverse="identity", allow_diagonal=False)
        assert birthday_exact(cfg) == 1

    def test_default_allows_the_diagonal(self):
        assert birthday_exact(BirthdayConfig(n=3, ell=2, transverse="identity")) == 0

    def test_enumeration_cap(self):
        with pytest.raises(InvalidParameter):
            birthday_exact(BirthdayConfig(n=1000, ell=3))


class TestBirthdayMC:
    def test_matches_exact(self):
        cfg = BirthdayConfig(n=5, ell=3, alpha=0.6, trials=20_000, seed=3)
        exact = float(birthday_exact(cfg))
        p, se = birthday_mc(cfg, chunk_size=3000)
        assert abs(p - exact) <= 4.0 * math.sqrt(exact * (1.0 - exact) / cfg.trials)
        assert se > 0.0

    def test_threads_do_not_change_the_estimate(self):
        cfg = BirthdayConfig(n=50, ell=6, trials=5000, seed=1)
        assert birthday_mc(cfg, threads=1, chunk_size=600) == birthday_mc(cfg, threads=4, chunk_size=600)

    def test_sweep(self):
        rows = birthday_sweep(100, [0.5, 1.0], trials=2000, seed=2)
        assert [r.ell for r in rows] == [sweep_ell(100, 0.5), sweep_ell(100, 1.0)] == [5, 10]
        for r in rows:
            assert 0.0 <= r.p_hat <= 1.0
            assert r.poisson == pytest.approx(math.exp(-r.ell * (r.ell - 1) / 100))


# ── coupon collector ────────────────────────────────────────────


class TestCouponCollector:
    def test_harmonic(self):
        assert harmonic_expectation(1) == 1.0
        assert harmonic_expectation(3) == pytest.approx(5.5)
        assert harmonic_expectation(100) == pytest.approx(518.7378, abs=1e-4)

    def test_one_object(self):
        assert coupon_collector_mc(1, 50, seed=0) == (1.0, 0.0)

    def test_mean_near_n_h_n(self):
        mean, se = coupon_collector_mc(100, 4000, seed=6)
        assert abs(mean - harmonic_expectation(100)) <= 4.0 * se

    def test_threads_do_not_change_the_estimate(self):
        one = coupon_collector_mc(20, 3000, seed=4, threads=1, chunk_size=2000)
        many = coupon_collector_mc(20, 3000, seed=4, threads=3, chunk_size=2000)
        assert one == many

    @pytest.mark.parametrize("n, trials", [(0, 10), (5, 0)])
    def test_invalid(self, n, trials):
        with pytest.raises(InvalidParameter):
            coupon_collector_mc(n, trials, seed=0)

    def test_sweep(self):
        rows = coupon_sweep([2, 5], trials=500, seed=1)
        assert [r.n for r in rows] == [2, 5]
        assert rows[1].expected == pytest.approx(5 * (1 + 1 / 2 + 1 / 3 + 1 / 4 + 1 / 5))
