import math

import numpy as np
import pytest

from iashedge.curve import SwapQuote, YieldCurve, bootstrap
from iashedge.fixtures import reference_vol_quotes
from iashedge.shortrate import (CalibrationError, CirPlusPlusModel, HullWhiteModel, PathSet,
                                SwaptionQuote, bachelier_atm_price, bachelier_implied_vol,
                                calibrate_hull_white, model_implied_vols)

FLAT_RATE = 0.013


@pytest.fixture(scope="module")
def flat_curve():
    # flat annual par quotes make the continuous forward exactly log(1 + q)
    return bootstrap([SwapQuote(m, FLAT_RATE) for m in range(1, 31)])


@pytest.fixture(scope="module")
def flat_model(flat_curve):
    return HullWhiteModel(flat_curve, 0.264, 0.017)


class TestBondPrice:
    def test_maturity_equals_valuation(self, hw_model):
        assert hw_model.bond_price(3.0, 3.0, 0.01) == pytest.approx(1.0, abs=1e-14)

    def test_time_zero_reprices_curve(self, curve, hw_model):
        r0 = hw_model.forward_rate(0.0)
        for t in (0.5, 1.0, 4.0, 7.5, 10.0, 20.0):
            assert hw_model.bond_price(0.0, t, r0) == pytest.approx(
                curve.discount(t), abs=1e-10)

    def test_rate_sensitivity_matches_affine_coefficient(self, hw_model):
        # ln P(t, T | r) is affine in r with slope -(1 - exp(-lam tau)) / lam
        lam = hw_model.mean_reversion
        t, T = 2.0, 12.0
        p1, p2 = hw_model.bond_price(t, T, 0.01), hw_model.bond_price(t, T, 0.02)
        slope = (math.log(p2) - math.log(p1)) / 0.01
        expected = -(1.0 - math.exp(-lam * (T - t))) / lam
        assert slope == pytest.approx(expected, rel=1e-12)
        # frozen closed-form value at the published mean reversion, tau = 10
        b10 = -(1.0 - math.exp(-0.264 * 10.0)) / 0.264
        assert b10 == pytest.approx(-3.5175709486500524, abs=1e-15)

    def test_maturity_before_valuation_rejected(self, hw_model):
        with pytest.raises(ValueError):
            hw_model.bond_price(5.0, 4.0, 0.01)


class TestTheta:
    def test_flat_curve_small_vol_limit(self, flat_curve):
        model = HullWhiteModel(flat_curve, 0.264, 1e-8)
        c = math.log(1.0 + FLAT_RATE)
        for t in (0.5, 3.0, 11.0, 25.0):
            assert model.theta(t) == pytest.approx(c, abs=1e-7)

    def test_flat_curve_long_run_level(self, flat_model):
        c = math.log(1.0 + FLAT_RATE)
        expected = c + 0.017**2 / (2.0 * 0.264**2)
        assert flat_model.theta(28.0) == pytest.approx(expected, abs=1e-6)

    def test_outside_domain_rejected(self, flat_model):
        with pytest.raises(ValueError):
            flat_model.theta(31.0)


class TestSimulation:
    def test_grid_validation(self, hw_model):
        with pytest.raises(ValueError):
            hw_model.simulate([1.0, 2.0], 10, seed=1)
        with pytest.raises(ValueError):
            hw_model.simulate([0.0, 1.0, 1.0], 10, seed=1)
        with pytest.raises(ValueError):
            hw_model.simulate([0.0, 1.0], 11, seed=1)  # odd antithetic count

    def test_deterministic_given_seed(self, hw_model):
        grid = np.arange(0.0, 6.0)
        a = hw_model.simulate(grid, 512, seed=42)
        b = hw_model.simulate(grid, 512, seed=42)
        assert a.short_rate.tobytes() == b.short_rate.tobytes()
        assert a.money_market.tobytes() == b.money_market.tobytes()

    def test_antithetic_pairs_mirror_the_zero_mean_factor(self, hw_model):
        grid = np.arange(0.0, 6.0)
        ps = hw_model.simulate(grid, 64, seed=7)
        alphas = ps.short_rate.mean(axis=0) * 0.0  # placeholder shape
        alphas = np.array([hw_model.alpha(t) for t in grid])
        x = ps.short_rate - alphas[None, :]
        assert np.allclose(x[0::2], -x[1::2], atol=1e-12)

    def test_tiny_vol_paths_collapse_to_deterministic_shift(self, curve):
        model = HullWhiteModel(curve, 0.264, 1e-10)
        grid = np.arange(0.0, 11.0)
        ps = model.simulate(grid, 16, seed=3)
        alphas = np.array([model.alpha(t) for t in grid])
        assert np.allclose(ps.short_rate, alphas[None, :], atol=1e-8)
        assert np.allclose(1.0 / ps.money_market[:, -1], curve.discount(10.0), atol=1e-8)

    def test_martingale_discounted_money_market(self, curve, hw_model):
        grid = np.arange(0.0, 11.0)
        ps = hw_model.simulate(grid, 100_000, seed=42)
        inv = 1.0 / ps.money_market
        pair = 0.5 * (inv[0::2] + inv[1::2])
        for i, t in enumerate(grid[1:], start=1):
            est = pair[:, i].mean()
            se = pair[:, i].std(ddof=1) / math.sqrt(pair.shape[0])
            assert abs(est - curve.discount(float(t))) <= 3.0 * se

    def test_trapezoid_scheme_matches_its_construction(self, hw_model):
        grid = np.arange(0.0, 5.0)
        ps = hw_model.simulate(grid, 128, seed=9, money_market="trapezoid")
        log_mm = np.log(ps.money_market)
        rebuilt = np.cumsum(0.5 * (ps.short_rate[:, :-1] + ps.short_rate[:, 1:]), axis=1)
        assert np.allclose(log_mm[:, 1:], rebuilt, atol=1e-12)

    def test_pathset_validation(self):
        grid = np.arange(0.0, 3.0)
        with pytest.raises(ValueError):
            PathSet(grid, np.zeros((4, 3)), np.zeros((4, 3)), rng_seed=0)  # mm not 1


class TestBondOption:
    def test_put_call_parity(self, hw_model, curve):
        t_exp, t_bond, strike = 3.0, 8.0, 0.95
        call = hw_model.bond_option(t_exp, t_bond, strike, "call")
        put = hw_model.bond_option(t_exp, t_bond, strike, "put")
        forward = curve.discount(t_bond) - strike * curve.discount(t_exp)
        assert call - put == pytest.approx(forward, abs=1e-12)

    def test_zero_vol_intrinsic(self, curve):
        model = HullWhiteModel(curve, 0.264, 1e-13)
        value = model.bond_option(3.0, 8.0, 0.9, "call")
        assert value == pytest.approx(curve.discount(8.0) - 0.9 * curve.discount(3.0), abs=1e-9)


class TestSwaption:
    def test_atm_price_vanishes_with_vol(self, curve):
        strike = curve.swap_rate(5.0, 10.0)
        tiny = HullWhiteModel(curve, 0.264, 1e-12)
        assert tiny.swaption_price(5.0, 5.0, strike, "receiver") == pytest.approx(0.0, abs=1e-11)

    def test_zero_strike_payer_is_discounted_forward_swap(self):
        # rates far enough above zero that exercise is sure at the test vol
        curve = bootstrap([SwapQuote(m, 0.03 + 0.001 * m) for m in range(1, 11)])
        model = HullWhiteModel(curve, 0.264, 0.002)
        value = model.swaption_price(2.0, 5.0, 0.0, "payer")
        assert value == pytest.approx(curve.discount(2.0) - curve.discount(7.0), rel=1e-8)

    def test_deep_itm_receiver_asymptote(self, curve, hw_model):
        strike = 0.5
        value = hw_model.swaption_price(2.0, 5.0, strike, "receiver")
        forward_swap = strike * curve.annuity(2.0, 7.0) - (curve.discount(2.0)
                                                           - curve.discount(7.0))
        assert value == pytest.approx(forward_swap, rel=1e-9)
        intrinsic = hw_model.swaption_price(2.0, 5.0, curve.swap_rate(2.0, 7.0), "receiver")
        assert intrinsic >= 0.0

    def test_price_at_least_intrinsic(self, curve, hw_model):
        for strike in (0.0, 0.005, 0.01, 0.02):
            price = hw_model.swaption_price(5.0, 5.0, strike, "receiver")
            intrinsic = max(strike * curve.annuity(5.0, 10.0)
                            - (curve.discount(5.0) - curve.discount(10.0)), 0.0)
            assert price >= intrinsic - 1e-12

    def test_five_into_five_matches_monte_carlo(self, curve, hw_model):
        strike = curve.swap_rate(5.0, 10.0)
        analytic = hw_model.swaption_price(5.0, 5.0, strike, "receiver")
        ps = hw_model.simulate(np.arange(0.0, 6.0), 100_000, seed=17)
        r5 = ps.short_rate[:, 5]
        pay = 5.0 + np.arange(1.0, 6.0)
        bonds = hw_model.bond_price(5.0, pay[None, :], r5[:, None])
        payoff = np.maximum(strike * bonds.sum(axis=1) + bonds[:, -1] - 1.0, 0.0)
        disc = payoff / ps.money_market[:, 5]
        pair = 0.5 * (disc[0::2] + disc[1::2])
        se = pair.std(ddof=1) / math.sqrt(pair.size)
        assert abs(pair.mean() - analytic) <= 3.0 * se

    def test_annual_tenor_required(self, hw_model):
        with pytest.raises(ValueError):
            hw_model.swaption_price(5.0, 2.5, 0.01, "receiver")


class TestFloorlet:
    def test_far_out_strike_worthless(self, hw_model):
        assert hw_model.floorlet_price(1.0, 2.0, -10.0) == pytest.approx(0.0, abs=1e-300)

    def test_sure_exercise_identity(self, curve, hw_model):
        strike = 10.0
        value = hw_model.floorlet_price(1.0, 2.0, strike)
        assert value == pytest.approx(
            curve.discount(2.0) * (1.0 + strike) - curve.discount(1.0), rel=1e-12)

    def test_equals_one_period_receiver_swaption(self, hw_model):
        for strike in (-0.005, 0.0, 0.01, 0.03):
            floorlet = hw_model.floorlet_price(4.0, 5.0, strike)
            swaption = hw_model.swaption_price(4.0, 1.0, strike, "receiver")
            assert floorlet == pytest.approx(swaption, abs=1e-10)


class TestBachelier:
    def test_round_trip(self):
        annuity, vol, expiry = 8.3, 0.005, 4.0
        price = bachelier_atm_price(annuity, vol, expiry)
        assert bachelier_implied_vol(price, 0.01, annuity, expiry) == pytest.approx(
            vol, abs=1e-10)

    def test_zero_price_zero_vol(self):
        assert bachelier_implied_vol(0.0, 0.01, 5.0, 3.0) == 0.0

    def test_negative_price_rejected(self):
        with pytest.raises(ValueError):
            bachelier_implied_vol(-1e-9, 0.01, 5.0, 3.0)


class TestCalibration:
    def test_synthetic_round_trip(self, curve):
        true = HullWhiteModel(curve, 0.264, 0.017)
        pairs = [(1.0, 10.0), (3.0, 7.0), (5.0, 5.0), (7.0, 3.0), (9.0, 1.0)]
        vols = model_implied_vols(true, [SwaptionQuote(e, t, 0.01) for e, t in pairs])
        quotes = [SwaptionQuote(e, t, v) for (e, t), v in zip(pairs, vols)]
        result = calibrate_hull_white(curve, quotes)
        assert result.model.mean_reversion == pytest.approx(0.264, rel=0.01)
        assert result.model.vol == pytest.approx(0.017, rel=0.01)

    def test_needs_two_quotes(self, curve):
        with pytest.raises(ValueError):
            calibrate_hull_white(curve, [SwaptionQuote(5.0, 5.0, 0.006)])

    def test_market_fit_pattern(self, curve):
        # fitted vols rise along the counter-diagonal and cross the market:
        # rich at the short expiry, cheap in the belly
        result = calibrate_hull_white(curve, reference_vol_quotes())
        fitted, market = result.fitted_vols, result.market_vols
        assert np.all(np.diff(fitted) > 0)
        assert fitted[0] > market[0]
        assert fitted[2] < market[2]
        assert fitted[3] < market[3]


class TestCirPlusPlus:
    @pytest.fixture(scope="class")
    def cir(self, curve):
        return CirPlusPlusModel(curve, 0.185, 0.039, 0.184, 0.079)

    def test_parameter_validation(self, curve):
        with pytest.raises(ValueError):
            CirPlusPlusModel(curve, -0.1, 0.039, 0.184, 0.079)

    def test_feller_reported(self, curve, cir):
        assert cir.feller_satisfied
        assert not CirPlusPlusModel(curve, 0.01, 0.2, 0.05, 0.05).feller_satisfied

    def test_reprices_curve_at_time_zero(self, curve, cir):
        r0 = cir.x0 + cir.shift(0.0)
        for t in (1.0, 5.0, 10.0, 20.0):
            assert cir.bond_price(0.0, t, r0) == pytest.approx(curve.discount(t), rel=1e-8)

    def test_factor_stays_non_negative(self, cir):
        ps = cir.simulate(np.arange(0.0, 11.0), 2_000, seed=5)
        shifts = np.array([cir.shift(t) for t in ps.grid_times])
        assert np.all(ps.short_rate - shifts[None, :] >= 0.0)

    def test_deterministic_given_seed(self, cir):
        a = cir.simulate(np.arange(0.0, 4.0), 128, seed=11)
        b = cir.simulate(np.arange(0.0, 4.0), 128, seed=11)
        assert a.short_rate.tobytes() == b.short_rate.tobytes()
