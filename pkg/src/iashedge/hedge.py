"""Static hedge portfolios: a swap ladder plus a grid of short receiver swaptions.

The ladder of co-terminal swaps replicates a deterministic notional schedule
(the average path for the purely linear hedge, the pathwise upper envelope
when swaptions are added). Each swaption cell (i, l) is a receiver swaption
struck at the contract rate whose weight reduces the portfolio notional over
the life of the underlying swap, T_{i+1} .. T_l. Weights minimize the mean
squared notional mismatch summed over dates, a convex quadratic solved by
normal equations; for the co-terminal diagonal the system is assembled in
closed form from exercise counts and notional gaps.

Exercise convention: a co-terminal swaption (l = M) is triggered exactly by
the prepayment flag K > kappa(T_i), since kappa is the same remaining-term
swap rate that sets its moneyness. Off-diagonal cells are exercised on their
own moneyness (short rate below the cell's critical rate at expiry), keeping
the calibration, the premium and the pathwise exercised value of the same
tradeable instrument consistent on a non-flat curve.

Weights may be negative (short protection may need unwinding near maturity);
a non-negative fit is available for portfolios restricted to long-only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .ias import IasScenario, NotionalPathSet, amortizing_swap_value, average_notional, \
    ias_forward_values
from .shortrate import PathSet, RECEIVER

__all__ = [
    "SwaptionGrid",
    "HedgePortfolio",
    "PortfolioPrice",
    "build_linear_hedge",
    "build_swaption_portfolio",
    "upper_envelope",
    "exercise_indicators",
    "portfolio_notional",
    "portfolio_notional_matrix",
    "notional_mismatch",
    "calibrate_diagonal",
    "calibrate_numeric",
    "diagonal_cells",
    "full_grid_cells",
    "price_portfolio",
    "hedge_error_profile",
    "solve_gamma_weights",
]


@dataclass(frozen=True)
class SwaptionGrid:
    """Upper-triangular weights w[(start, end)] on receiver swaptions, 1 <= i < l <= M."""

    maturity: int
    weights: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        for (i, l), w in self.weights.items():
            if not 1 <= i < l <= self.maturity:
                raise ValueError(f"cell ({i}, {l}) outside the upper triangle for M={self.maturity}")
            if not np.isfinite(w):
                raise ValueError(f"weight for cell ({i}, {l}) must be finite")

    @property
    def cells(self) -> list[tuple[int, int]]:
        return sorted(self.weights)

    def weight_vector(self, cells=None) -> np.ndarray:
        cells = self.cells if cells is None else cells
        return np.array([self.weights.get(c, 0.0) for c in cells])


def diagonal_cells(maturity: int) -> list[tuple[int, int]]:
    """Co-terminal swaptions (start + tenor = maturity): (1, M) .. (M-1, M)."""
    return [(i, maturity) for i in range(1, maturity)]


def full_grid_cells(maturity: int) -> list[tuple[int, int]]:
    return [(i, l) for i in range(1, maturity) for l in range(i + 1, maturity + 1)]


@dataclass(frozen=True)
class HedgePortfolio:
    """Ladder schedule replicated with co-terminal swaps, plus short swaptions."""

    strike: float
    ladder_notional: np.ndarray  # schedule N(T_0) .. N(T_M) the swaps replicate
    swaptions: SwaptionGrid

    def __post_init__(self):
        if np.any(self.ladder_notional < -1e-12):
            raise ValueError("ladder schedule must be non-negative")

    @property
    def maturity(self) -> int:
        return self.ladder_notional.size - 1

    @property
    def ladder_increments(self) -> np.ndarray:
        """Co-terminal swap notionals Delta N(T_{i-1}), starting at N(T_0)."""
        return np.diff(np.concatenate(([0.0], self.ladder_notional[:-1])))


def build_linear_hedge(npaths: NotionalPathSet, strike: float) -> HedgePortfolio:
    """Swap ladder replicating the average notional path; no optionality."""
    return HedgePortfolio(strike, average_notional(npaths), SwaptionGrid(npaths.maturity_index))


def upper_envelope(npaths: NotionalPathSet) -> np.ndarray:
    """Pathwise maximum notional per date; dominates every simulated path."""
    if npaths.n_paths == 0:
        raise ValueError("empty path set")
    return npaths.notional.max(axis=0)


def build_swaption_portfolio(npaths: NotionalPathSet, strike: float,
                             grid: SwaptionGrid) -> HedgePortfolio:
    """Envelope-replicating ladder with the given swaption weights on top."""
    return HedgePortfolio(strike, upper_envelope(npaths), grid)


def exercise_indicators(npaths: NotionalPathSet, cells: list[tuple[int, int]],
                        model=None, paths: PathSet | None = None,
                        strike: float | None = None) -> np.ndarray:
    """Per-path exercise indicator for each cell, one column per cell.

    Co-terminal cells reuse the stored prepayment flags; other cells compare
    the simulated short rate at expiry against the cell's critical rate, which
    needs ``model``, ``paths`` and the common ``strike``.
    """
    m = npaths.maturity_index
    out = np.empty((npaths.n_paths, len(cells)))
    for c, (i, l) in enumerate(cells):
        if l == m:
            out[:, c] = npaths.exercise_flags[:, i]
        else:
            if model is None or paths is None or strike is None:
                raise ValueError(
                    "off-diagonal cells need model, paths and strike for their exercise rule"
                )
            r_star = model.jamshidian_critical_rate(float(i), float(l - i), strike)
            idx = int(np.searchsorted(paths.grid_times, float(i)))
            out[:, c] = (paths.short_rate[:, idx] < r_star).astype(float)
    return out


def _reduction_matrix(npaths: NotionalPathSet, grid: SwaptionGrid,
                      model=None, paths: PathSet | None = None,
                      strike: float | None = None) -> np.ndarray:
    """Notional knocked out per path and date by exercised swaptions.

    The T_m payment of the swap underlying cell (i, l) rides on the notional
    fixed at T_{m-1}, so an exercised cell offsets the notional at dates
    k = i .. l-1 (the mortgage's own T_i prepayment first hits the T_{i+1}
    payment the same way).
    """
    out = np.zeros_like(npaths.notional)
    cells = grid.cells
    if not cells:
        return out
    indicators = exercise_indicators(npaths, cells, model, paths, strike)
    for c, (i, l) in enumerate(cells):
        w = grid.weights[(i, l)]
        if w == 0.0:
            continue
        out[:, i:l] += w * indicators[:, c][:, None]
    return out


def portfolio_notional_matrix(npaths: NotionalPathSet, portfolio: HedgePortfolio,
                              model=None, paths: PathSet | None = None) -> np.ndarray:
    """Portfolio notional per path and date: ladder schedule minus exercised swaptions."""
    reduction = _reduction_matrix(npaths, portfolio.swaptions, model, paths, portfolio.strike)
    return portfolio.ladder_notional[None, :] - reduction


def portfolio_notional(npaths: NotionalPathSet, portfolio: HedgePortfolio,
                       date_index: int, path_index: int,
                       model=None, paths: PathSet | None = None) -> float:
    """Single-entry convenience accessor over portfolio_notional_matrix."""
    return float(portfolio_notional_matrix(npaths, portfolio, model, paths)[path_index, date_index])


def notional_mismatch(npaths: NotionalPathSet, portfolio: HedgePortfolio,
                      model=None, paths: PathSet | None = None) -> float:
    """Calibration objective: mean squared notional gap summed over flow-relevant dates.

    Dates T_0 .. T_{M-1} carry the notionals the M yearly payments ride on;
    nothing pays on the date-M entry, so it stays out of the objective.
    """
    m = npaths.maturity_index
    diff = npaths.notional - portfolio_notional_matrix(npaths, portfolio, model, paths)
    return float(np.sum(diff[:, :m] ** 2) / npaths.n_paths)


def _solve_cells(npaths: NotionalPathSet, cells: list[tuple[int, int]],
                 indicators: np.ndarray, non_negative: bool = False) -> SwaptionGrid:
    """Normal equations for the quadratic mismatch restricted to the given cells."""
    m = npaths.maturity_index
    envelope = upper_envelope(npaths)
    counts = indicators.T @ indicators
    # gap_sums[c, k] = sum_j ind_c^{(j)} (N_env(T_k) - N^{(j)}(T_k)), k = 0 .. M-1
    gap_sums = indicators.T @ (envelope[None, :m] - npaths.notional[:, :m])
    n_c = len(cells)
    a = np.empty((n_c, n_c))
    b = np.empty(n_c)
    for r, (i, l) in enumerate(cells):
        b[r] = gap_sums[r, i:l].sum()
        for c, (i2, l2) in enumerate(cells):
            overlap = max(0, min(l, l2) - max(i, i2))
            a[r, c] = overlap * counts[r, c]
    if non_negative:
        chol = _sqrtm_psd(a)
        w, _ = nnls(chol, np.linalg.lstsq(chol.T, b, rcond=None)[0])
    else:
        w, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
        if rank < n_c:
            null_cells = [cells[r] for r in range(n_c) if a[r, r] == 0.0]
            warnings.warn(
                f"rank-deficient calibration system (rank {rank} of {n_c}); "
                f"minimum-norm solution, undetermined cells {null_cells or 'mixed'}"
            )
    return SwaptionGrid(m, dict(zip(cells, map(float, w))))


def _sqrtm_psd(a: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(a)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


def calibrate_diagonal(npaths: NotionalPathSet) -> SwaptionGrid:
    """Closed-form weights for the co-terminal diagonal.

    The gradient of the mismatch in the diagonal weights is linear: A w = b
    with A[i,i'] = (M - max(i,i')) sum_j flag_i flag_i' and b[i] the flagged
    envelope-to-path gaps summed over k > i. Rank deficiency (a date no path
    triggers) falls back to the minimum-norm solution with a warning.
    """
    cells = diagonal_cells(npaths.maturity_index)
    return _solve_cells(npaths, cells, exercise_indicators(npaths, cells))


def calibrate_numeric(npaths: NotionalPathSet, cells: list[tuple[int, int]],
                      model=None, paths: PathSet | None = None,
                      strike: float | None = None,
                      non_negative: bool = False) -> SwaptionGrid:
    """Least-squares weights for an arbitrary set of grid cells.

    Same convex objective as the diagonal solve; off-diagonal cells need
    ``model``, ``paths`` and ``strike`` to evaluate their exercise rule.
    ``non_negative`` projects the fit onto w >= 0 for long-only portfolios.
    """
    if not cells:
        raise ValueError("active cell set must be non-empty")
    m = npaths.maturity_index
    for i, l in cells:
        if not 1 <= i < l <= m:
            raise ValueError(f"cell ({i}, {l}) outside the grid for M={m}")
    indicators = exercise_indicators(npaths, cells, model, paths, strike)
    return _solve_cells(npaths, cells, indicators, non_negative=non_negative)


@dataclass(frozen=True)
class PortfolioPrice:
    ladder_value: float
    swaption_costs: dict[tuple[int, int], float]  # weight * premium per cell
    value: float

    @property
    def total_swaption_cost(self) -> float:
        return float(sum(self.swaption_costs.values()))


def price_portfolio(portfolio: HedgePortfolio, model) -> PortfolioPrice:
    """Time-0 portfolio value: ladder amortizing swap minus short receiver swaptions."""
    ladder = amortizing_swap_value(model.curve, portfolio.ladder_notional[:-1], portfolio.strike)
    costs = {}
    for (i, l), w in sorted(portfolio.swaptions.weights.items()):
        premium = model.swaption_price(float(i), float(l - i), portfolio.strike, RECEIVER)
        costs[(i, l)] = w * premium
    total = float(sum(costs.values()))
    return PortfolioPrice(ladder, costs, ladder - total)


def _ladder_value_at(model, portfolio: HedgePortfolio, k: int, rates: np.ndarray) -> np.ndarray:
    """Remaining ladder (amortizing swap) value at T_k per path."""
    m = portfolio.maturity
    if k >= m:
        return np.zeros_like(rates)
    times = np.arange(float(k), m + 1.0)
    bonds = model.bond_price(float(k), times[None, :], rates[:, None])
    sched = portfolio.ladder_notional[k:m]
    return (sched[None, :] * (bonds[:, 1:] * (1.0 + portfolio.strike) - bonds[:, :-1])).sum(axis=1)


def _receiver_swap_value_at(model, k: int, end: int, strike: float,
                            rates: np.ndarray) -> np.ndarray:
    """Unit-notional receiver swap over remaining dates T_{k+1} .. T_end at T_k."""
    if end <= k:
        return np.zeros_like(rates)
    times = np.arange(k + 1.0, end + 1.0)
    bonds = model.bond_price(float(k), times[None, :], rates[:, None])
    return strike * bonds.sum(axis=1) + bonds[:, -1] - 1.0


def portfolio_forward_values(model, portfolio: HedgePortfolio, paths: PathSet,
                             npaths: NotionalPathSet) -> np.ndarray:
    """Estimated portfolio value at T_0 .. T_{M-1}, averaged over paths.

    Ladder and exercised swaptions are valued from the analytic bonds at the
    simulated state; live swaptions use the closed-form price conditional on
    r(T_k). Exercise follows the stored trigger flags.
    """
    m = portfolio.maturity
    idx = np.searchsorted(paths.grid_times, np.arange(0.0, m + 1.0))
    cells = portfolio.swaptions.cells
    indicators = exercise_indicators(npaths, cells, model, paths, portfolio.strike)
    out = np.empty(m)
    for k in range(m):
        rates = paths.short_rate[:, idx[k]]
        value = _ladder_value_at(model, portfolio, k, rates)
        for c, (i, l) in enumerate(cells):
            w = portfolio.swaptions.weights[(i, l)]
            if w == 0.0:
                continue
            if k < i:
                value = value - w * model.swaption_price(
                    float(i), float(l - i), portfolio.strike, RECEIVER,
                    t=float(k), short_rate=rates,
                )
            else:
                value = value - w * indicators[:, c] * _receiver_swap_value_at(
                    model, k, l, portfolio.strike, rates
                )
        out[k] = float(value.mean())
    return out


def hedge_error_profile(scenario: IasScenario, portfolio: HedgePortfolio,
                        paths: PathSet, npaths: NotionalPathSet) -> np.ndarray:
    """|V_IAS(T_k) - Pi(T_k)| for k = 0 .. M-1 on common simulated paths."""
    v_ias = ias_forward_values(scenario, paths, npaths)
    v_pi = portfolio_forward_values(scenario.model, portfolio, paths, npaths)
    return np.abs(v_ias - v_pi)


def solve_gamma_weights(cells: list[tuple[int, int]], gamma_target: np.ndarray,
                        gamma_ladder: np.ndarray, gamma_swaptions: np.ndarray,
                        maturity: int) -> SwaptionGrid:
    """Weights matching the target curvature profile in least squares.

    ``gamma_swaptions`` has one column per cell (long-position curvature per
    spine bucket); the portfolio carries them short against the ladder, so the
    fit solves min_w || (gamma_target - gamma_ladder) + G w ||_2.
    """
    g0 = np.asarray(gamma_target, dtype=float) - np.asarray(gamma_ladder, dtype=float)
    w, _, rank, _ = np.linalg.lstsq(np.asarray(gamma_swaptions, dtype=float), -g0, rcond=None)
    if rank < len(cells):
        warnings.warn(f"gamma system rank {rank} below {len(cells)}; minimum-norm weights")
    return SwaptionGrid(maturity, dict(zip(cells, map(float, w))))
