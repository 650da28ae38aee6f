import numpy as np
import pytest

from iashedge.prepayment import (BIN_RANGE, N_BINS, ConstantCpr, CprFitError, IncentiveModel,
                                 LoanObservation, LogisticCpr, RationalCpr, bin_and_fit,
                                 cpr_to_smm, empirical_cpr_timeseries,
                                 generate_loan_observations, smm_to_cpr)


class TestConversions:
    def test_endpoints(self):
        assert smm_to_cpr(0.0) == 0.0
        assert smm_to_cpr(1.0) == 1.0
        assert cpr_to_smm(0.0) == 0.0
        assert cpr_to_smm(1.0) == 1.0

    def test_one_percent_monthly(self):
        assert smm_to_cpr(0.01) == pytest.approx(1.0 - 0.99**12, abs=1e-15)
        assert smm_to_cpr(0.01) == pytest.approx(0.1136151, abs=1e-7)

    def test_exact_inverses(self):
        # smm -> cpr -> smm amplifies rounding once (1 - smm)^12 nears machine
        # epsilon, so exactness is asserted on the economically relevant range
        smm_grid = np.linspace(0.0, 0.3, 61)
        assert np.allclose(cpr_to_smm(smm_to_cpr(smm_grid)), smm_grid, atol=1e-15)
        cpr_grid = np.linspace(0.0, 0.99, 100)
        assert np.allclose(smm_to_cpr(cpr_to_smm(cpr_grid)), cpr_grid, atol=1e-15)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            smm_to_cpr(1.1)
        with pytest.raises(ValueError):
            cpr_to_smm(-0.01)


class TestCprModels:
    def test_rational_below_threshold(self):
        model = RationalCpr(0.3, 0.0)
        assert model.cpr(-0.01) == 0.0
        assert model.cpr(0.0) == 0.0  # strict trigger
        assert model.cpr(1e-9) == 0.3

    def test_logistic_plateaus(self):
        model = LogisticCpr(0.04, 0.14, -300.0, 2.0)
        assert model.cpr(1e6) == pytest.approx(0.18, abs=1e-12)
        assert model.cpr(-1e6) == pytest.approx(0.04, abs=1e-12)

    def test_logistic_range_validated_at_construction(self):
        with pytest.raises(ValueError):
            LogisticCpr(-0.01, 0.1, -100.0, 0.0)
        with pytest.raises(ValueError):
            LogisticCpr(0.5, 0.6, -100.0, 0.0)

    def test_constant_range_validated(self):
        with pytest.raises(ValueError):
            ConstantCpr(1.2)
        with pytest.raises(ValueError):
            RationalCpr(-0.1)

    @pytest.mark.parametrize("model", [RationalCpr(0.25, 0.003),
                                       LogisticCpr(0.03, 0.12, -220.0, 1.4)])
    def test_monotone_in_incentive(self, model):
        eps = np.linspace(-0.02, 0.05, 400)
        values = model.cpr(eps)
        assert np.all(np.diff(values) >= -1e-15)

    def test_incentive_spread(self):
        inc = IncentiveModel(0.002)
        assert inc.epsilon(0.03, 0.025) == pytest.approx(0.003, abs=1e-15)
        with pytest.raises(ValueError):
            IncentiveModel(-0.001)


class TestEmpiricalTimeseries:
    def test_single_loan_no_prepayment(self):
        obs = [LoanObservation("2013-05", 100.0, 0.0, 0.01)]
        assert empirical_cpr_timeseries(obs) == [("2013-05", 0.0)]

    def test_weighted_ratio_then_annualized(self):
        obs = [LoanObservation("2013-05", 100.0, 1.0, 0.01),
               LoanObservation("2013-05", 300.0, 3.0, 0.02)]
        [(period, cpr)] = empirical_cpr_timeseries(obs)
        assert period == "2013-05"
        assert cpr == pytest.approx(1.0 - 0.99**12, abs=1e-15)

    def test_periods_sorted_and_zero_balance_skipped(self):
        obs = [LoanObservation("2014-01", 100.0, 2.0, 0.0),
               LoanObservation("2013-12", 100.0, 1.0, 0.0),
               LoanObservation("2014-02", 0.0, 0.0, 0.0)]
        with pytest.warns(UserWarning, match="2014-02"):
            series = empirical_cpr_timeseries(obs)
        assert [p for p, _ in series] == ["2013-12", "2014-01"]

    def test_flat_generator_series(self):
        true = ConstantCpr(0.08)
        obs = generate_loan_observations(true, n_periods=6, loans_per_period=20_000, seed=4)
        series = empirical_cpr_timeseries(obs)
        assert len(series) == 6
        # per-period sampling noise is ~0.7% CPR at this tape size
        for _, cpr in series:
            assert cpr == pytest.approx(0.08, abs=0.025)

    def test_loan_observation_validation(self):
        with pytest.raises(ValueError):
            LoanObservation("2013-01", 100.0, 101.0, 0.0)
        with pytest.raises(ValueError):
            LoanObservation("2013-01", -1.0, 0.0, 0.0)


class TestBinAndFit:
    def test_bin_geometry(self):
        true = LogisticCpr(0.04, 0.11, -150.0, 2.6)
        obs = generate_loan_observations(true, n_periods=4, loans_per_period=3000, seed=2)
        binned, _, _ = bin_and_fit(obs)
        widths = np.diff(binned.bin_edges)
        assert binned.bin_edges.size == N_BINS + 1
        assert np.allclose(widths, (BIN_RANGE[1] - BIN_RANGE[0]) / N_BINS, atol=1e-15)
        # every retained observation lands in exactly one bin
        assert binned.counts.sum() == len(obs) - binned.n_dropped

    def test_out_of_range_dropped_with_count(self):
        true = ConstantCpr(0.05)
        obs = generate_loan_observations(true, n_periods=2, loans_per_period=2000, seed=3,
                                         incentive_range=(-0.03, 0.06))
        binned, _, _ = bin_and_fit(obs)
        expected_dropped = sum(1 for o in obs if not (-0.015 <= o.incentive <= 0.04))
        assert binned.n_dropped == expected_dropped > 0

    def test_single_bin_is_degenerate(self):
        obs = [LoanObservation("2013-01", 100.0, 1.0, 0.005) for _ in range(50)]
        with pytest.raises(CprFitError):
            bin_and_fit(obs)

    def test_empty_bins_recorded_and_excluded(self):
        # two clusters leave most bins empty: still enough populated bins to fit
        obs = []
        for eps in (-0.01, 0.0, 0.01, 0.02, 0.03):
            obs.extend(LoanObservation("2013-01", 100.0, bal, eps)
                       for bal in ([1.0] * 3 + [0.0] * 97))
        binned, _, residuals = bin_and_fit(obs)
        assert (binned.counts == 0).sum() > 40
        assert np.isnan(binned.cpr_per_bin[binned.counts == 0]).all()
        assert np.isnan(residuals[binned.counts == 0]).all()

    def test_synthetic_round_trip_recovers_curve(self):
        true = LogisticCpr(0.04, 0.11, -150.0, 2.6)
        obs = generate_loan_observations(true, n_periods=36, loans_per_period=4000, seed=12)
        binned, fitted, residuals = bin_and_fit(obs)
        centers = binned.centers
        assert np.max(np.abs(fitted.cpr(centers) - true.cpr(centers))) < 0.02
        # optimizer no worse than the generating parameters on its own objective
        pop = binned.counts > 0
        fit_obj = np.sum((fitted.cpr(centers[pop]) - binned.cpr_per_bin[pop]) ** 2)
        gen_obj = np.sum((true.cpr(centers[pop]) - binned.cpr_per_bin[pop]) ** 2)
        assert fit_obj <= gen_obj + 1e-15

    def test_generator_is_deterministic(self):
        true = LogisticCpr(0.04, 0.11, -150.0, 2.6)
        a = generate_loan_observations(true, n_periods=2, loans_per_period=100, seed=9)
        b = generate_loan_observations(true, n_periods=2, loans_per_period=100, seed=9)
        assert a == b
