"""Bump-and-reprice sensitivities to spine swap rates and calibration vols.

Delta and Gamma bump one par quote at a time, re-bootstrap the curve and
re-run the valuation with the same random seed (common random numbers), so
finite differences measure sensitivity rather than Monte Carlo noise; the
model's mean reversion and volatility stay at their base calibration. Vega
bumps one quoted swaption vol, recalibrates both parameters to the bumped
set, and reprices (forward difference). Standard errors are estimated from
the pathwise difference quotients where a Monte Carlo valuation supplies
per-path values.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .curve import SwapQuote, YieldCurve, bootstrap
from .hedge import HedgePortfolio, SwaptionGrid, price_portfolio, solve_gamma_weights
from .ias import IasScenario, price_ias_mc
from .shortrate import HullWhiteModel, SwaptionQuote, calibrate_hull_white

__all__ = [
    "GreekProfile",
    "bump_quote",
    "ias_valuation",
    "portfolio_valuation",
    "delta_profile",
    "gamma_profile",
    "vega_profile",
    "parallel_delta",
    "gamma_calibrated_grids",
]

DEFAULT_BUMP = 1e-4  # 1 bp, for both rates and normal vols


@dataclass(frozen=True)
class GreekProfile:
    """Per-instrument sensitivities (derivative per unit of rate or vol)."""

    labels: list[str]
    values: np.ndarray
    stderrs: np.ndarray
    metadata: dict

    def as_rows(self):
        return list(zip(self.labels, self.values, self.stderrs))


def bump_quote(quotes: list[SwapQuote], index: int, bump: float) -> list[SwapQuote]:
    out = list(quotes)
    q = out[index]
    out[index] = SwapQuote(q.maturity_years, q.par_rate + bump, q.fixed_frequency)
    return out


def _rebootstrap(quotes: list[SwapQuote], label: str) -> YieldCurve:
    try:
        return bootstrap(quotes)
    except Exception as exc:
        raise RuntimeError(f"bootstrap failed under bumped quote {label}: {exc}") from exc


def ias_valuation(scenario: IasScenario):
    """Valuation closure for Greeks: curve -> (value, per-path values).

    Rebuilds the model on the supplied curve with the scenario's mean
    reversion and vol, re-simulates with the scenario seed and reprices.
    """
    base_model = scenario.model

    def value(curve: YieldCurve):
        model = HullWhiteModel(curve, base_model.mean_reversion, base_model.vol)
        bumped = replace(scenario, model=model)
        price = price_ias_mc(bumped)
        return price.value, price.per_path

    return value


def portfolio_valuation(portfolio: HedgePortfolio, base_model: HullWhiteModel):
    """Analytic portfolio value closure over the curve (ladder minus swaptions)."""

    def value(curve: YieldCurve):
        model = HullWhiteModel(curve, base_model.mean_reversion, base_model.vol)
        return price_portfolio(portfolio, model).value, None

    return value


def _pairwise_stderr(diff: np.ndarray, antithetic: bool) -> float:
    sample = 0.5 * (diff[0::2] + diff[1::2]) if antithetic else diff
    return float(sample.std(ddof=1) / np.sqrt(sample.size))


def _labels(quotes: list[SwapQuote]) -> list[str]:
    return [f"{q.maturity_years}y" for q in quotes]


def delta_profile(valuation, quotes: list[SwapQuote], h: float = DEFAULT_BUMP,
                  antithetic: bool = True, metadata: dict | None = None) -> GreekProfile:
    """Central-difference sensitivity to each spine par rate."""
    labels = _labels(quotes)
    values = np.empty(len(quotes))
    stderrs = np.zeros(len(quotes))
    for i, label in enumerate(labels):
        v_up, pp_up = valuation(_rebootstrap(bump_quote(quotes, i, +h), label))
        v_dn, pp_dn = valuation(_rebootstrap(bump_quote(quotes, i, -h), label))
        values[i] = (v_up - v_dn) / (2.0 * h)
        if pp_up is not None:
            stderrs[i] = _pairwise_stderr((pp_up - pp_dn) / (2.0 * h), antithetic)
    return GreekProfile(labels, values, stderrs, {"h": h, "scheme": "central", **(metadata or {})})


def gamma_profile(valuation, quotes: list[SwapQuote], h: float = DEFAULT_BUMP,
                  antithetic: bool = True, metadata: dict | None = None) -> GreekProfile:
    """Second central difference against each spine par rate; needs common random numbers."""
    labels = _labels(quotes)
    v_0, pp_0 = valuation(_rebootstrap(list(quotes), "base"))
    values = np.empty(len(quotes))
    stderrs = np.zeros(len(quotes))
    for i, label in enumerate(labels):
        v_up, pp_up = valuation(_rebootstrap(bump_quote(quotes, i, +h), label))
        v_dn, pp_dn = valuation(_rebootstrap(bump_quote(quotes, i, -h), label))
        values[i] = (v_up - 2.0 * v_0 + v_dn) / h**2
        if pp_up is not None:
            stderrs[i] = _pairwise_stderr((pp_up - 2.0 * pp_0 + pp_dn) / h**2, antithetic)
    return GreekProfile(labels, values, stderrs, {"h": h, "scheme": "central-second", **(metadata or {})})


def parallel_delta(valuation, quotes: list[SwapQuote], h: float = DEFAULT_BUMP) -> float:
    """All spine rates bumped together (first-order check against the bucket sum)."""
    v_up, _ = valuation(_rebootstrap([SwapQuote(q.maturity_years, q.par_rate + h, q.fixed_frequency)
                                      for q in quotes], "parallel"))
    v_dn, _ = valuation(_rebootstrap([SwapQuote(q.maturity_years, q.par_rate - h, q.fixed_frequency)
                                      for q in quotes], "parallel"))
    return (v_up - v_dn) / (2.0 * h)


def vega_profile(valuation_for_vols, vol_quotes: list[SwaptionQuote],
                 h: float = DEFAULT_BUMP, antithetic: bool = True,
                 metadata: dict | None = None) -> GreekProfile:
    """Forward-difference sensitivity to each quoted vol, recalibrating per bump.

    ``valuation_for_vols`` maps a full quote list to (value, per-path); it is
    responsible for recalibrating the model parameters to the quotes.
    """
    labels = [f"{q.expiry_years:g}y{q.tenor_years:g}y" for q in vol_quotes]
    v_0, pp_0 = valuation_for_vols(vol_quotes)
    values = np.empty(len(vol_quotes))
    stderrs = np.zeros(len(vol_quotes))
    for i, label in enumerate(labels):
        bumped = list(vol_quotes)
        q = bumped[i]
        bumped[i] = SwaptionQuote(q.expiry_years, q.tenor_years, q.normal_vol + h)
        try:
            v_up, pp_up = valuation_for_vols(bumped)
        except Exception as exc:
            raise RuntimeError(f"recalibration failed under bumped vol {label}: {exc}") from exc
        values[i] = (v_up - v_0) / h
        if pp_up is not None and pp_0 is not None:
            stderrs[i] = _pairwise_stderr((pp_up - pp_0) / h, antithetic)
    return GreekProfile(labels, values, stderrs, {"h": h, "scheme": "forward", **(metadata or {})})


def ias_vega_valuation(scenario: IasScenario, curve: YieldCurve):
    """Vol-quote closure for IAS Vega: recalibrate (mean reversion, vol), reprice."""

    def value(vol_quotes: list[SwaptionQuote]):
        result = calibrate_hull_white(curve, vol_quotes)
        bumped = replace(scenario, model=result.model)
        price = price_ias_mc(bumped)
        return price.value, price.per_path

    return value


def portfolio_vega_valuation(portfolio: HedgePortfolio, curve: YieldCurve):
    def value(vol_quotes: list[SwaptionQuote]):
        result = calibrate_hull_white(curve, vol_quotes)
        return price_portfolio(portfolio, result.model).value, None

    return value


def gamma_calibrated_grids(scenario: IasScenario, portfolio: HedgePortfolio,
                           quotes: list[SwapQuote], h: float = DEFAULT_BUMP,
                           cells=None) -> tuple[SwaptionGrid, SwaptionGrid]:
    """Swaption weights fitted to the IAS curvature profile, plus the averaged blend.

    The portfolio curvature is affine in the weights, so per-cell Gamma
    columns (one long receiver swaption each) and the ladder Gamma feed a
    linear least-squares fit; the blend averages the curvature-fitted weights
    with the value-fitted weights of ``portfolio``.
    """
    cells = cells or portfolio.swaptions.cells
    base_model = scenario.model
    gamma_ias = gamma_profile(ias_valuation(scenario), quotes, h=h).values
    ladder_only = HedgePortfolio(portfolio.strike, portfolio.ladder_notional,
                                 SwaptionGrid(portfolio.maturity))
    gamma_ladder = gamma_profile(portfolio_valuation(ladder_only, base_model), quotes, h=h).values
    columns = np.empty((len(quotes), len(cells)))
    for c, (i, l) in enumerate(cells):
        single = HedgePortfolio(portfolio.strike,
                                np.zeros(portfolio.maturity + 1),
                                SwaptionGrid(portfolio.maturity, {(i, l): -1.0}))
        # weight -1 makes the priced position a long swaption: its Gamma column
        columns[:, c] = gamma_profile(portfolio_valuation(single, base_model), quotes, h=h).values
    gamma_grid = solve_gamma_weights(cells, gamma_ias, gamma_ladder, columns, portfolio.maturity)
    averaged = SwaptionGrid(
        portfolio.maturity,
        {c: 0.5 * (portfolio.swaptions.weights.get(c, 0.0) + gamma_grid.weights.get(c, 0.0))
         for c in cells},
    )
    return gamma_grid, averaged
