"""Prepayment-rate models and the loan-level calibration pipeline.

Three functional forms map the refinancing incentive (contract rate minus
current market rate for the remaining term) to an annual conditional
prepayment rate: a constant, a full-prepayment step trigger, and a logistic
S-curve. The empirical pipeline aggregates monthly loan observations into
56 equal incentive bins on [-1.5%, 4%], annualizes the per-bin prepayment
frequency and fits the S-curve by damped least squares.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

__all__ = [
    "ConstantCpr",
    "RationalCpr",
    "LogisticCpr",
    "IncentiveModel",
    "LoanObservation",
    "BinnedCpr",
    "CprFitError",
    "smm_to_cpr",
    "cpr_to_smm",
    "empirical_cpr_timeseries",
    "bin_and_fit",
    "generate_loan_observations",
]

BIN_RANGE = (-0.015, 0.04)
N_BINS = 56


class CprFitError(RuntimeError):
    """Binning left too few populated bins to identify the S-curve."""


def smm_to_cpr(smm):
    """Annualize a single monthly mortality: CPR = 1 - (1 - SMM)^12."""
    arr = np.asarray(smm, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError("SMM must lie in [0, 1]")
    out = 1.0 - (1.0 - arr) ** 12
    return float(out) if np.ndim(smm) == 0 else out


def cpr_to_smm(cpr):
    """Monthly rate with the same annual survival: SMM = 1 - (1 - CPR)^(1/12)."""
    arr = np.asarray(cpr, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError("CPR must lie in [0, 1]")
    out = 1.0 - (1.0 - arr) ** (1.0 / 12.0)
    return float(out) if np.ndim(cpr) == 0 else out


@dataclass(frozen=True)
class ConstantCpr:
    """Incentive-independent annual prepayment rate."""

    cpr_level: float

    def __post_init__(self):
        if not 0.0 <= self.cpr_level <= 1.0:
            raise ValueError("cpr_level must lie in [0, 1]")

    def cpr(self, epsilon):
        return np.broadcast_to(self.cpr_level, np.shape(epsilon)).copy() \
            if np.ndim(epsilon) else self.cpr_level


@dataclass(frozen=True)
class RationalCpr:
    """Step trigger: prepay at lambda_max as soon as the incentive clears the threshold."""

    lambda_max: float
    epsilon_star: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.lambda_max <= 1.0:
            raise ValueError("lambda_max must lie in [0, 1]")

    def cpr(self, epsilon):
        out = np.where(np.asarray(epsilon, dtype=float) > self.epsilon_star, self.lambda_max, 0.0)
        return float(out) if np.ndim(epsilon) == 0 else out


@dataclass(frozen=True)
class LogisticCpr:
    """S-curve a1 + a2 / (1 + exp(a3 * eps + a4)).

    With a3 < 0 the curve rises from the floor a1 to the plateau a1 + a2 as
    the incentive grows; both levels must be valid prepayment rates.
    """

    a1: float
    a2: float
    a3: float
    a4: float

    def __post_init__(self):
        if not 0.0 <= self.a1 <= 1.0 or not 0.0 <= self.a1 + self.a2 <= 1.0:
            raise ValueError("logistic plateaus a1 and a1+a2 must lie in [0, 1]")

    def cpr(self, epsilon):
        eps = np.asarray(epsilon, dtype=float)
        # clip the exponent so extreme incentives saturate instead of overflowing
        u = np.clip(self.a3 * eps + self.a4, -700.0, 700.0)
        out = self.a1 + self.a2 / (1.0 + np.exp(u))
        return float(out) if np.ndim(epsilon) == 0 else out

    @property
    def alpha(self) -> tuple[float, float, float, float]:
        return (self.a1, self.a2, self.a3, self.a4)


@dataclass(frozen=True)
class IncentiveModel:
    """Difference-form incentive eps = K - (swap rate + zeta).

    The spread zeta (funding/liquidity margin) enters pricing only; hedging
    runs with zeta = 0.
    """

    zeta: float = 0.0

    def __post_init__(self):
        if self.zeta < 0:
            raise ValueError("zeta must be non-negative")

    def epsilon(self, contract_rate, market_swap_rate):
        return contract_rate - (np.asarray(market_swap_rate, dtype=float) + self.zeta)


@dataclass(frozen=True)
class LoanObservation:
    period: str  # YYYY-MM
    starting_balance: float
    prepaid_amount: float
    incentive: float

    def __post_init__(self):
        if self.starting_balance < 0 or self.prepaid_amount < 0:
            raise ValueError("balances must be non-negative")
        if self.prepaid_amount > self.starting_balance:
            raise ValueError("prepaid_amount cannot exceed starting_balance")


@dataclass
class BinnedCpr:
    """Per-bin annualized prepayment rates over the incentive range."""

    bin_edges: np.ndarray  # 57 edges
    cpr_per_bin: np.ndarray  # nan where empty
    counts: np.ndarray
    n_dropped: int = 0

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


def empirical_cpr_timeseries(observations: list[LoanObservation]) -> list[tuple[str, float]]:
    """Balance-weighted annualized prepayment rate per calendar period, sorted."""
    totals: dict[str, list[float]] = {}
    for obs in observations:
        acc = totals.setdefault(obs.period, [0.0, 0.0])
        acc[0] += obs.starting_balance
        acc[1] += obs.prepaid_amount
    series = []
    for period in sorted(totals):
        bal, pre = totals[period]
        if bal <= 0.0:
            warnings.warn(f"period {period} has zero aggregate balance; skipped")
            continue
        series.append((period, smm_to_cpr(pre / bal)))
    return series


def _logistic_residuals(alpha, centers, targets):
    a1, a2, a3, a4 = alpha
    u = np.clip(a3 * centers + a4, -700.0, 700.0)
    return a1 + a2 / (1.0 + np.exp(u)) - targets


def _logistic_jacobian(alpha, centers, targets):
    a1, a2, a3, a4 = alpha
    u = np.clip(a3 * centers + a4, -700.0, 700.0)
    e = np.exp(u)
    denom = (1.0 + e) ** 2
    jac = np.empty((centers.size, 4))
    jac[:, 0] = 1.0
    jac[:, 1] = 1.0 / (1.0 + e)
    jac[:, 2] = -a2 * e * centers / denom
    jac[:, 3] = -a2 * e / denom
    return jac


def fit_logistic(centers: np.ndarray, cpr_targets: np.ndarray) -> tuple[LogisticCpr, np.ndarray]:
    """Least-squares S-curve through (incentive, CPR) points.

    Damped Gauss-Newton (Levenberg-Marquardt via scipy) with the analytic
    Jacobian, restarted from a coarse grid of slope/offset pairs; returns the
    best fit and its residual vector.
    """
    lo, hi = float(np.min(cpr_targets)), float(np.max(cpr_targets))
    span = max(hi - lo, 1e-4)
    width = max(float(np.max(centers) - np.min(centers)), 1e-3)
    starts = [
        (lo, span, a3, a4)
        for a3 in (-2.0 / width, -8.0 / width)
        for a4 in (-2.0, 0.0, 2.0, 4.0)
    ]
    best = None
    for start in starts:
        res = least_squares(
            _logistic_residuals,
            x0=np.asarray(start),
            jac=_logistic_jacobian,
            args=(centers, cpr_targets),
            method="lm",
            xtol=1e-10,
            ftol=1e-10,
            gtol=1e-10,
            max_nfev=5000,
        )
        if best is None or res.cost < best.cost:
            best = res
    a1, a2, a3, a4 = (float(v) for v in best.x)
    # the curve is symmetric under (a2, a3, a4) -> (-a2, -a3, -a4) about a1 + a2;
    # report the rising-plateau orientation
    if a2 < 0:
        a1, a2, a3, a4 = a1 + a2, -a2, -a3, -a4
    # plateaus are prepayment rates: clip the unconstrained fit into [0, 1]
    # (only binds on degenerate tapes; binned targets live in the box)
    a1 = min(max(a1, 0.0), 1.0)
    a2 = min(a2, 1.0 - a1)
    model = LogisticCpr(a1, a2, a3, a4)
    return model, best.fun


def bin_and_fit(
    observations: list[LoanObservation],
    n_bins: int = N_BINS,
    bin_range: tuple[float, float] = BIN_RANGE,
) -> tuple[BinnedCpr, LogisticCpr, np.ndarray]:
    """Bin loan observations by incentive and fit the logistic S-curve.

    Per-observation monthly rates prepaid/balance are averaged within each
    bin, annualized, and fitted unweighted across the populated bins. Returns
    the binned rates (with counts, so a weighted variant can be layered on),
    the fitted model and the per-bin residuals.
    """
    lo, hi = bin_range
    eps = np.array([o.incentive for o in observations], dtype=float)
    bal = np.array([o.starting_balance for o in observations], dtype=float)
    pre = np.array([o.prepaid_amount for o in observations], dtype=float)
    keep = (eps >= lo) & (eps <= hi) & (bal > 0)
    n_dropped = int(np.sum(~keep))
    eps, bal, pre = eps[keep], bal[keep], pre[keep]
    if eps.size == 0:
        raise CprFitError("no observations inside the incentive range")

    edges = np.linspace(lo, hi, n_bins + 1)
    idx = np.clip(np.searchsorted(edges, eps, side="right") - 1, 0, n_bins - 1)
    smm = pre / bal
    counts = np.bincount(idx, minlength=n_bins)
    sums = np.bincount(idx, weights=smm, minlength=n_bins)
    mean_smm = np.divide(sums, counts, out=np.full(n_bins, np.nan), where=counts > 0)
    cpr_per_bin = np.where(counts > 0, 1.0 - (1.0 - mean_smm) ** 12, np.nan)
    binned = BinnedCpr(edges, cpr_per_bin, counts, n_dropped)

    populated = counts > 0
    if int(np.sum(populated)) < 4:
        raise CprFitError(
            f"only {int(np.sum(populated))} populated bins; at least 4 needed to fit 4 parameters"
        )
    model, residuals = fit_logistic(binned.centers[populated], cpr_per_bin[populated])
    full_residuals = np.full(n_bins, np.nan)
    full_residuals[populated] = residuals
    return binned, model, full_residuals


def generate_loan_observations(
    true_model,
    n_periods: int = 24,
    loans_per_period: int = 2000,
    seed: int = 0,
    incentive_range: tuple[float, float] = BIN_RANGE,
    mean_balance: float = 200_000.0,
    balance_sigma: float = 0.5,
    start_year: int = 2011,
    start_month: int = 2,
) -> list[LoanObservation]:
    """Synthetic monthly loan tape driven by a known prepayment curve.

    Balances are lognormal; each loan-month either prepays in full with
    probability equal to the model-implied monthly rate at its incentive, or
    not at all, so bin averages recover the generating curve up to sampling
    noise. Incentives are uniform over ``incentive_range``.
    """
    rng = np.random.default_rng(seed)
    out = []
    lo, hi = incentive_range
    for p in range(n_periods):
        year, month = divmod((start_year * 12 + start_month - 1) + p, 12)
        period = f"{year:04d}-{month + 1:02d}"
        eps = rng.uniform(lo, hi, loans_per_period)
        balances = mean_balance * rng.lognormal(-0.5 * balance_sigma**2, balance_sigma, loans_per_period)
        smm = cpr_to_smm(np.clip(true_model.cpr(eps), 0.0, 1.0))
        prepaid = balances * (rng.random(loans_per_period) < smm)
        out.extend(
            LoanObservation(period, float(b), float(q), float(e))
            for b, q, e in zip(balances, prepaid, eps)
        )
    return out
