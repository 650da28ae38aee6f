import numpy as np
import pytest

from iashedge.mortgage import (ANNUITY, BULLET, MortgageSpec, annuity_installment,
                               constant_cpr_schedule, notional_path, psi)


def bisect_installment(rate, notional, years):
    """Independent route: find the constant payment that clears the balance."""
    def final_balance(c):
        bal = notional
        for _ in range(years):
            bal = bal * (1.0 + rate) - c
        return bal

    lo, hi = 0.0, notional * (1.0 + max(rate, 0.0)) * 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if final_balance(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestAnnuityInstallment:
    def test_ten_year_three_percent_oracle(self):
        oracle = bisect_installment(0.03, 1.0, 10)
        value = annuity_installment(0.03, 1.0, 10)
        assert value == pytest.approx(oracle, abs=1e-10)
        assert value == pytest.approx(0.1172305066, abs=1e-9)

    def test_zero_rate_straight_line(self):
        assert annuity_installment(0.0, 1.0, 10) == pytest.approx(0.1, abs=1e-15)

    def test_single_year_repays_all_plus_interest(self):
        assert annuity_installment(0.04, 1.0, 1) == pytest.approx(1.04, abs=1e-14)

    def test_present_value_identity(self):
        k, n, years = 0.025, 3.0, 7
        c = annuity_installment(k, n, years)
        pv = sum(c / (1.0 + k) ** i for i in range(1, years + 1))
        assert pv == pytest.approx(n, abs=1e-12)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            annuity_installment(0.03, 1.0, 0)
        with pytest.raises(ValueError):
            annuity_installment(-1.5, 1.0, 5)


class TestPsi:
    def test_bullet_is_survival_fraction(self):
        assert psi(BULLET, 0.03, 0.12, 10.0, 0.0) == pytest.approx(0.88, abs=1e-15)

    def test_annuity_zero_prepayment_matches_amortization_oracle(self):
        c = bisect_installment(0.03, 1.0, 10)
        interest = 0.03
        expected = 1.0 - (c - interest)  # 1 - Q/N
        value = psi(ANNUITY, 0.03, 0.0, 10.0, 0.0)
        assert value == pytest.approx(expected, abs=1e-10)
        assert value == pytest.approx(0.9127694934, abs=1e-9)

    def test_annuity_zero_prepayment_equals_scheduled_update(self):
        for years_gone in range(0, 9):
            n = 2.5
            c = annuity_installment(0.042, n, 10 - years_gone)
            q = c - 0.042 * n
            assert n * psi(ANNUITY, 0.042, 0.0, 10.0, float(years_gone)) == pytest.approx(
                n - q, abs=1e-12)

    def test_cpr_range_enforced(self):
        with pytest.raises(ValueError):
            psi(BULLET, 0.03, 1.2, 10.0, 0.0)
        with pytest.raises(ValueError):
            psi(ANNUITY, 0.03, -0.1, 10.0, 0.0)

    def test_annuity_needs_time_before_maturity(self):
        with pytest.raises(ValueError):
            psi(ANNUITY, 0.03, 0.1, 10.0, 10.0)

    def test_zero_rate_annuity_limit(self):
        # straight-line amortization: one tenth gone, then prepayment on the rest
        assert psi(ANNUITY, 0.0, 0.2, 10.0, 0.0) == pytest.approx(0.8 * 0.9, abs=1e-15)


class TestConstantCprSchedule:
    def test_bullet_no_prepayment_flat_interest(self):
        spec = MortgageSpec(BULLET, 1.0, 0.03, 10)
        rows = constant_cpr_schedule(spec, 0.0)
        assert len(rows) == 10
        assert all(r.interest == pytest.approx(0.03, abs=1e-15) for r in rows)
        assert all(r.prepayment == 0.0 for r in rows)
        assert rows[-1].repayment == pytest.approx(1.0, abs=1e-15)

    def test_bullet_power_formula(self):
        spec = MortgageSpec(BULLET, 1.0, 0.03, 10)
        rows = constant_cpr_schedule(spec, 0.12)
        # notional entering year 6 is the balance after five prepayments
        assert rows[5].notional_before == pytest.approx(0.88**5, abs=1e-12)
        assert rows[5].notional_before == pytest.approx(0.5277319168, abs=1e-9)

    def test_bullet_total_interest_closed_form(self):
        spec = MortgageSpec(BULLET, 1.0, 0.03, 10)
        for lam in (0.04, 0.12, 0.3):
            rows = constant_cpr_schedule(spec, lam)
            total = sum(r.interest for r in rows)
            closed = 0.03 / lam * (1.0 - (1.0 - lam) ** 10)
            assert total == pytest.approx(closed, rel=1e-12)

    def test_annuity_rows_match_psi_iteration(self):
        spec = MortgageSpec(ANNUITY, 1.0, 0.03, 10)
        rows = constant_cpr_schedule(spec, 0.12)
        n = 1.0
        for i, row in enumerate(rows, start=1):
            assert row.notional_before == pytest.approx(n, rel=1e-12)
            lam = 0.12 if i < 10 else 0.0
            n *= psi(ANNUITY, 0.03, lam, 10.0, float(i - 1))
        assert n == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("kind", [BULLET, ANNUITY])
    @pytest.mark.parametrize("lam", [0.0, 0.04, 0.12, 0.3])
    def test_psi_consistency_with_schedule_recursion(self, kind, lam):
        spec = MortgageSpec(kind, 1.0, 0.03, 10)
        rows = constant_cpr_schedule(spec, lam)
        path = notional_path(spec, lam)
        for i, row in enumerate(rows):
            assert path[i] == pytest.approx(row.notional_before, rel=1e-12, abs=1e-15)
        # the state path carries the bullet's balance into T_M (redemption is a
        # schedule cash flow, not an amortization step); the annuity ends at zero
        if kind == BULLET:
            assert path[-1] == pytest.approx(path[-2], abs=1e-15)
        else:
            assert path[-1] == pytest.approx(0.0, abs=1e-14)

    def test_annuity_zero_prepayment_installments_constant(self):
        rows = constant_cpr_schedule(MortgageSpec(ANNUITY, 1.0, 0.03, 10), 0.0)
        first = rows[0].installment
        assert all(r.installment == pytest.approx(first, abs=1e-12) for r in rows)

    @pytest.mark.parametrize("kind", [BULLET, ANNUITY])
    def test_notional_non_increasing_in_cpr(self, kind):
        spec = MortgageSpec(kind, 1.0, 0.03, 10)
        paths = [notional_path(spec, lam) for lam in (0.0, 0.04, 0.12, 0.3)]
        for lo, hi in zip(paths, paths[1:]):
            assert np.all(hi <= lo + 1e-15)

    def test_annuity_ends_at_zero_bullet_carries(self):
        assert notional_path(MortgageSpec(ANNUITY, 1.0, 0.03, 10), 0.1)[-1] == pytest.approx(
            0.0, abs=1e-14)
        bullet = notional_path(MortgageSpec(BULLET, 1.0, 0.03, 10), 0.1)
        assert bullet[-1] == pytest.approx(bullet[-2], abs=1e-15)


class TestSpecValidation:
    @pytest.mark.parametrize("kwargs", [
        {"kind": "interest-only", "notional_0": 1.0, "rate": 0.03, "maturity_years": 10},
        {"kind": BULLET, "notional_0": -1.0, "rate": 0.03, "maturity_years": 10},
        {"kind": BULLET, "notional_0": 1.0, "rate": 0.03, "maturity_years": 0},
        {"kind": BULLET, "notional_0": 1.0, "rate": 0.03, "maturity_years": 10,
         "payment_frequency": 4},
    ])
    def test_invalid_spec_rejected(self, kwargs):
        with pytest.raises(ValueError):
            MortgageSpec(**kwargs)
