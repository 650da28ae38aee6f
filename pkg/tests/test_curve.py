import math

import numpy as np
import pytest

from iashedge.curve import (CurveInputError, CurveNumericalError, SwapQuote, YieldCurve,
                            bootstrap, fixed_schedule)

POSITIVE_QUOTES = [SwapQuote(m, 0.01 + 0.0015 * m) for m in range(1, 11)]


def par_rate_from_curve(curve, maturity, freq=1):
    times, taus = fixed_schedule(0.0, maturity, freq)
    return (1.0 - curve.discount(float(maturity))) / float(np.sum(taus * curve.discount(times)))


class TestBootstrap:
    def test_single_quote_one_period_identity(self):
        curve = bootstrap([SwapQuote(1, 0.02)])
        assert curve.discount(1.0) == pytest.approx(1.0 / 1.02, abs=1e-12)

    def test_flat_quotes_fixed_point(self):
        curve = bootstrap([SwapQuote(m, 0.015) for m in range(1, 13)])
        for m in range(1, 13):
            assert par_rate_from_curve(curve, m) == pytest.approx(0.015, abs=1e-12)

    def test_two_quote_algebraic_oracle(self):
        # solve (1 - P2) / (P1 + P2) = q2 by hand with P1 = 1/1.01
        p1 = 1.0 / 1.01
        p2 = (1.0 - 0.015 * p1) / 1.015
        curve = bootstrap([SwapQuote(1, 0.01), SwapQuote(2, 0.015)])
        assert curve.discount(1.0) == pytest.approx(p1, abs=1e-13)
        assert curve.discount(2.0) == pytest.approx(p2, abs=1e-13)

    def test_round_trip_reprices_reference_quotes(self, curve):
        from iashedge.fixtures import REFERENCE_CURVE_QUOTES

        for q in REFERENCE_CURVE_QUOTES:
            par = par_rate_from_curve(curve, q.maturity_years, q.fixed_frequency)
            assert par == pytest.approx(q.par_rate, abs=1e-12)
            # swap struck at the recomputed par rate values to zero
            annuity = curve.annuity(0.0, q.maturity_years)
            value = par * annuity - (1.0 - curve.discount(float(q.maturity_years)))
            assert abs(value) < 1e-10

    def test_semiannual_frequency(self):
        curve = bootstrap([SwapQuote(1, 0.02, 2), SwapQuote(2, 0.025, 2)])
        assert par_rate_from_curve(curve, 2, freq=2) == pytest.approx(0.025, abs=1e-12)

    def test_non_monotone_maturities_rejected(self):
        with pytest.raises(CurveInputError):
            bootstrap([SwapQuote(2, 0.01), SwapQuote(1, 0.01)])

    def test_unbracketable_quote_is_numerical_error(self):
        with pytest.raises(CurveNumericalError):
            bootstrap([SwapQuote(1, 2.5), SwapQuote(2, 2.5)])


class TestDiscount:
    def test_at_zero_and_pillars(self, curve):
        assert curve.discount(0.0) == 1.0
        assert curve.discount(curve.pillar_times[3]) == pytest.approx(
            curve.discount_factors[3], abs=1e-15)

    def test_log_linear_midpoint(self):
        curve = YieldCurve([1.0, 2.0], [0.99, 0.97])
        expected = math.exp(0.5 * (math.log(0.99) + math.log(0.97)))
        assert curve.discount(1.5) == pytest.approx(expected, abs=1e-15)

    def test_beyond_last_pillar_raises_without_extrapolation(self, curve):
        with pytest.raises(CurveInputError):
            curve.discount(31.0)

    def test_flat_forward_extrapolation_when_enabled(self):
        curve = YieldCurve([1.0, 2.0], [0.99, 0.97], extrapolate=True)
        fwd = math.log(0.99 / 0.97)  # last-interval continuous forward
        assert curve.discount(3.0) == pytest.approx(0.97 * math.exp(-fwd), rel=1e-12)

    def test_non_increasing_on_positive_rate_fixture(self):
        curve = bootstrap(POSITIVE_QUOTES)
        grid = np.linspace(0.0, 10.0, 101)
        dfs = curve.discount(grid)
        assert np.all(np.diff(dfs) < 0)


class TestForwardLibor:
    def test_flat_continuous_curve_closed_form(self):
        times = np.arange(1.0, 11.0)
        curve = YieldCurve(times, np.exp(-0.01 * times))
        assert curve.forward_libor(1.0, 2.0) == pytest.approx(math.exp(0.01) - 1.0, rel=1e-12)

    def test_equal_discounts_give_zero(self):
        curve = YieldCurve([1.0, 2.0], [0.99, 0.99])
        assert curve.forward_libor(1.0, 2.0) == 0.0

    def test_rate_scales_inversely_with_accrual(self):
        curve = YieldCurve([1.0, 2.0], [0.995, 0.99])
        gap_rate = lambda a, b: (curve.discount(a) - curve.discount(b)) / curve.discount(b)
        assert curve.forward_libor(1.0, 1.5) == pytest.approx(2.0 * gap_rate(1.0, 1.5), rel=1e-12)

    def test_degenerate_interval_rejected(self, curve):
        with pytest.raises(CurveInputError):
            curve.forward_libor(2.0, 2.0)


class TestSwapRate:
    def test_one_period_equals_forward_libor(self, curve):
        assert curve.swap_rate(3.0, 4.0) == pytest.approx(curve.forward_libor(3.0, 4.0), rel=1e-12)

    def test_flat_curve_direct_summation_oracle(self):
        times = np.arange(1.0, 11.0)
        curve = YieldCurve(times, np.exp(-0.013 * times))
        dfs = [math.exp(-0.013 * k) for k in range(1, 11)]
        expected = (1.0 - dfs[-1]) / sum(dfs)
        assert curve.swap_rate(0.0, 10.0) == pytest.approx(expected, rel=1e-12)

    def test_spot_rate_matches_bootstrapped_quote(self, curve):
        assert curve.swap_rate(0.0, 10.0) == pytest.approx(0.008883, abs=1e-12)

    def test_between_forward_libor_extremes(self, curve):
        fwds = [curve.forward_libor(float(k), float(k + 1)) for k in range(2, 10)]
        rate = curve.swap_rate(2.0, 10.0)
        assert min(fwds) <= rate <= max(fwds)

    def test_par_swap_revalues_to_zero(self, curve):
        rate = curve.swap_rate(2.0, 7.0)
        value = rate * curve.annuity(2.0, 7.0) - (curve.discount(2.0) - curve.discount(7.0))
        assert abs(value) < 1e-15

    def test_empty_schedule_rejected(self, curve):
        with pytest.raises(CurveInputError):
            curve.swap_rate(5.0, 5.0)


class TestQuoteValidation:
    @pytest.mark.parametrize("kwargs", [
        {"maturity_years": 0, "par_rate": 0.01},
        {"maturity_years": 5, "par_rate": float("nan")},
        {"maturity_years": 5, "par_rate": 0.01, "fixed_frequency": 0},
    ])
    def test_invalid_quote_rejected(self, kwargs):
        with pytest.raises(CurveInputError):
            SwapQuote(**kwargs)
