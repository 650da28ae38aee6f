"""Index amortizing swap valuation.

The swap receives the contract rate K and pays Libor on a notional that
follows the mortgage amortization: each year the prepayment rate is read off
the refinancing incentive K - kappa(T_i), where kappa is the market swap rate
for the remaining term (plus an optional spread), and the notional updates
through the contract-kind factor psi. The T_i cash flow accrues on the
notional fixed at T_{i-1}.

With a deterministic prepayment path the value telescopes into a curve-only
formula; under the stochastic model it is estimated by Monte Carlo over
short-rate paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curve import YieldCurve
from .mortgage import ANNUITY, BULLET, MortgageSpec, notional_path, psi
from .prepayment import IncentiveModel, RationalCpr
from .shortrate import PathSet

__all__ = [
    "IasScenario",
    "NotionalPathSet",
    "IasPrice",
    "amortizing_swap_value",
    "price_deterministic_as",
    "simulate_notional",
    "price_ias_mc",
    "price_two_period_annuity_closed_form",
    "average_notional",
    "implied_constant_cpr",
    "ias_forward_values",
    "atm_mortgage_rate",
]


@dataclass(frozen=True)
class IasScenario:
    """Everything needed to simulate and price one IAS replication."""

    mortgage: MortgageSpec
    cpr_model: object  # ConstantCpr | RationalCpr | LogisticCpr
    model: object  # HullWhiteModel | CirPlusPlusModel
    incentive: IncentiveModel = field(default_factory=IncentiveModel)
    n_paths: int = 100_000
    seed: int = 0
    antithetic: bool = True

    @property
    def grid_times(self) -> np.ndarray:
        return np.arange(0.0, self.mortgage.maturity_years + 1.0)

    def simulate_paths(self) -> PathSet:
        return self.model.simulate(self.grid_times, self.n_paths, self.seed,
                                   antithetic=self.antithetic)


@dataclass(frozen=True)
class NotionalPathSet:
    """Per-path notional trajectories and prepayment-trigger flags.

    Column i of ``notional`` holds N(T_i); column 0 is the initial notional.
    ``exercise_flags`` marks K > kappa(T_i) at T_1 .. T_{M-1} (zero in columns
    0 and M, where no prepayment decision exists).
    """

    grid_times: np.ndarray
    notional: np.ndarray
    exercise_flags: np.ndarray

    def __post_init__(self):
        if self.notional.shape != self.exercise_flags.shape:
            raise ValueError("notional and exercise_flags shapes differ")
        if not np.allclose(self.notional[:, 0], self.notional[0, 0]):
            raise ValueError("initial notional must be identical across paths")
        if np.any(self.notional < -1e-12):
            raise ValueError("notionals must be non-negative")
        if np.any(np.diff(self.notional, axis=1) > 1e-12):
            raise ValueError("notional must be non-increasing along each path")

    @property
    def n_paths(self) -> int:
        return self.notional.shape[0]

    @property
    def maturity_index(self) -> int:
        return self.notional.shape[1] - 1


@dataclass(frozen=True)
class IasPrice:
    value: float
    stderr: float
    n_paths: int
    seed: int
    per_path: np.ndarray | None = None


def amortizing_swap_value(curve: YieldCurve, notional_by_date, strike: float) -> float:
    """Model-free value of a receiver amortizing swap on a yearly schedule.

    ``notional_by_date`` holds exactly N(T_0) .. N(T_{M-1}); the T_i flow pays
    tau K - Libor on N(T_{i-1}), which discounts to
    N(T_{i-1}) [P(0,T_i)(K + 1) - P(0,T_{i-1})].
    """
    n = np.asarray(notional_by_date, dtype=float)
    m = n.size
    times = np.arange(0.0, m + 1.0)
    dfs = curve.discount(times)
    return float(np.sum(n * (dfs[1:] * (1.0 + strike) - dfs[:-1])))


def price_deterministic_as(curve: YieldCurve, spec: MortgageSpec, cpr_by_date) -> float:
    """Amortizing-swap price for a deterministic prepayment path (scalar or per-date)."""
    path = notional_path(spec, cpr_by_date)
    return amortizing_swap_value(curve, path[:-1], spec.rate)


def _payment_indices(grid: np.ndarray, maturity: int) -> np.ndarray:
    """Indices of T_0 .. T_M inside the simulation grid."""
    idx = np.searchsorted(grid, np.arange(0.0, maturity + 1.0))
    ok = (idx < grid.size) & np.isclose(grid[np.minimum(idx, grid.size - 1)],
                                        np.arange(0.0, maturity + 1.0))
    if not np.all(ok):
        raise ValueError("simulation grid must contain every payment date 0..M")
    return idx


def simulate_notional(scenario: IasScenario, paths: PathSet) -> NotionalPathSet:
    """Roll the notional forward along each simulated rate path.

    At each T_i (i = 1 .. M-1) the remaining-term swap rate is computed from
    the model's analytic bonds at the simulated state, the incentive
    K - kappa(T_i) is mapped to an annual prepayment rate, and the notional
    updates multiplicatively. The final date applies scheduled repayment only.
    """
    spec = scenario.mortgage
    m = spec.maturity_years
    idx = _payment_indices(paths.grid_times, m)
    n_paths = paths.short_rate.shape[0]
    notional = np.empty((n_paths, m + 1))
    notional[:, 0] = spec.notional_0
    flags = np.zeros((n_paths, m + 1))
    for i in range(1, m):
        t_i = float(i)
        r_i = paths.short_rate[:, idx[i]]
        pay = np.arange(i + 1.0, m + 1.0)
        bonds = scenario.model.bond_price(t_i, pay[None, :], r_i[:, None])
        swap_rate = (1.0 - bonds[:, -1]) / bonds.sum(axis=1)
        eps = scenario.incentive.epsilon(spec.rate, swap_rate)
        lam = np.clip(scenario.cpr_model.cpr(eps), 0.0, 1.0)
        flags[:, i] = (eps > 0.0).astype(float)
        factors = _psi_vector(spec, lam, t_prev=t_i - 1.0)
        notional[:, i] = notional[:, i - 1] * factors
    notional[:, m] = notional[:, m - 1] * psi(spec.kind, spec.rate, 0.0, float(m), float(m - 1))
    return NotionalPathSet(np.arange(0.0, m + 1.0), notional, flags)


def _psi_vector(spec: MortgageSpec, cpr: np.ndarray, t_prev: float) -> np.ndarray:
    """Vectorized one-period update factor over per-path prepayment rates."""
    if spec.kind == BULLET:
        return 1.0 - cpr
    years_remaining = spec.maturity_years - t_prev
    k = spec.rate
    if k == 0.0:
        return (1.0 - cpr) * (1.0 - 1.0 / years_remaining)
    denom = 1.0 - (1.0 + k) ** (-years_remaining)
    return 1.0 + k * (cpr - 1.0) / denom + k - cpr * (k + 1.0)


def price_ias_mc(scenario: IasScenario, paths: PathSet | None = None,
                 npaths: NotionalPathSet | None = None) -> IasPrice:
    """Monte Carlo IAS price with its standard error.

    The estimator averages sum_i N(T_{i-1}) / M(T_i) (K - L(T_{i-1})) over
    paths; under antithetic sampling the standard error is taken across pair
    averages. Pass ``paths``/``npaths`` to reuse simulations (common random
    numbers across bumped valuations).
    """
    if paths is None:
        paths = scenario.simulate_paths()
    if npaths is None:
        npaths = simulate_notional(scenario, paths)
    per_path = _pathwise_values(scenario, paths, npaths)
    if np.any(np.isnan(per_path)):
        bad = int(np.flatnonzero(np.isnan(per_path))[0])
        raise FloatingPointError(f"NaN in pathwise IAS value at path {bad}")
    if scenario.antithetic:
        sample = 0.5 * (per_path[0::2] + per_path[1::2])
    else:
        sample = per_path
    value = float(sample.mean())
    stderr = float(sample.std(ddof=1) / np.sqrt(sample.size))
    return IasPrice(value, stderr, paths.short_rate.shape[0], paths.rng_seed, per_path)


def _pathwise_values(scenario: IasScenario, paths: PathSet,
                     npaths: NotionalPathSet) -> np.ndarray:
    spec = scenario.mortgage
    m = spec.maturity_years
    idx = _payment_indices(paths.grid_times, m)
    total = np.zeros(paths.short_rate.shape[0])
    for i in range(1, m + 1):
        r_prev = paths.short_rate[:, idx[i - 1]]
        p = scenario.model.bond_price(float(i - 1), float(i), r_prev)
        libor = 1.0 / p - 1.0
        total += npaths.notional[:, i - 1] / paths.money_market[:, idx[i]] * (spec.rate - libor)
    return total


def price_two_period_annuity_closed_form(model, spec: MortgageSpec,
                                         lambda_max: float) -> float:
    """Closed-form two-year annuity IAS under the step-trigger prepayment rule.

    The only prepayment decision sits at T_1, where kappa equals the one-year
    Libor, so the value splits into the no-prepayment amortizing swap minus
    the notional gap times a floorlet struck at the contract rate.
    """
    if spec.kind != ANNUITY or spec.maturity_years != 2:
        raise ValueError("closed form requires a two-year annuity")
    if not 0.0 <= lambda_max <= 1.0:
        raise ValueError("lambda_max must lie in [0, 1]")
    n_up = spec.notional_0 * psi(ANNUITY, spec.rate, 0.0, 2.0, 0.0)
    n_low = spec.notional_0 * psi(ANNUITY, spec.rate, lambda_max, 2.0, 0.0)
    as_value = amortizing_swap_value(model.curve, [spec.notional_0, n_up], spec.rate)
    floorlet = model.floorlet_price(1.0, 2.0, spec.rate)
    return as_value - (n_up - n_low) * floorlet


def average_notional(npaths: NotionalPathSet) -> np.ndarray:
    """Mean notional per payment date."""
    if npaths.n_paths == 0:
        raise ValueError("empty path set")
    return npaths.notional.mean(axis=0)


def implied_constant_cpr(spec: MortgageSpec, notional_by_date) -> np.ndarray:
    """Per-date prepayment rates that reproduce a notional trajectory.

    Inverts N(T_i) = N(T_{i-1}) psi(Lambda_i) date by date for i = 1 .. M-1
    (the update factor is linear in Lambda for both contract kinds). Feeding
    the result back through the recursion returns the input trajectory.
    """
    n = np.asarray(notional_by_date, dtype=float)
    m = spec.maturity_years
    out = np.empty(m - 1)
    for i in range(1, m):
        ratio = n[i] / n[i - 1]
        psi0 = psi(spec.kind, spec.rate, 0.0, float(m), float(i - 1))
        psi1 = _psi_vector(spec, np.array([1.0]), t_prev=float(i - 1))[0] - psi0
        out[i - 1] = (ratio - psi0) / psi1
    return out


def ias_forward_values(scenario: IasScenario, paths: PathSet,
                       npaths: NotionalPathSet) -> np.ndarray:
    """Estimated IAS value at T_0 .. T_{M-1}, averaging the pathwise forward value.

    Entry k discounts the remaining flows back to T_k along each path:
    (1/N) sum_j sum_{i>k} N(T_{i-1}) M(T_k)/M(T_i) (K - L(T_{i-1})).
    """
    spec = scenario.mortgage
    m = spec.maturity_years
    idx = _payment_indices(paths.grid_times, m)
    n_paths = paths.short_rate.shape[0]
    flows = np.zeros((n_paths, m + 1))
    for i in range(1, m + 1):
        r_prev = paths.short_rate[:, idx[i - 1]]
        p = scenario.model.bond_price(float(i - 1), float(i), r_prev)
        flows[:, i] = npaths.notional[:, i - 1] / paths.money_market[:, idx[i]] \
            * (spec.rate - (1.0 / p - 1.0))
    suffix = np.cumsum(flows[:, ::-1], axis=1)[:, ::-1]
    out = np.empty(m)
    for k in range(m):
        out[k] = float(np.mean(paths.money_market[:, idx[k]] * suffix[:, k + 1]))
    return out


def atm_mortgage_rate(curve: YieldCurve, kind: str, maturity_years: int,
                      notional: float = 1.0) -> float:
    """Contract rate at which the zero-prepayment amortizing swap is worth zero.

    For a bullet this is the plain par swap rate; for an annuity the schedule
    itself depends on the rate, so the fixed point is solved by bisection.
    """
    if kind == BULLET:
        return curve.swap_rate(0.0, float(maturity_years))

    def value(k: float) -> float:
        spec = MortgageSpec(kind, notional, k, maturity_years)
        return price_deterministic_as(curve, spec, 0.0)

    lo, hi = -0.5, 0.5
    if value(lo) * value(hi) > 0:
        raise ValueError("ATM rate not bracketed in [-50%, 50%]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if value(lo) * value(mid) <= 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-14:
            break
    return 0.5 * (lo + hi)
