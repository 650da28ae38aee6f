"""Reference market data and standard scenarios.

The engine's published anchors (signs, orderings, misfit patterns) depend on
the discount curve, so a fixed reference EUR-style curve for 23 Jan 2018 is
shipped here: low-to-negative short rates, upward sloping, with the 10y par
rate pinned at 88.83 bps so the bullet contract rate comes out at its
at-the-money level. The default S-curve parameters were obtained by running
the 56-bin least-squares fit on the seeded synthetic loan fixture below
(generating curve 0.04/0.11/-150/2.6, seed 20180123) and freezing the
result; experiments record the parameters they actually use.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .curve import SwapQuote, YieldCurve, bootstrap
from .ias import IasScenario, atm_mortgage_rate
from .mortgage import ANNUITY, BULLET, MortgageSpec
from .prepayment import IncentiveModel, LogisticCpr, RationalCpr, generate_loan_observations
from .shortrate import HullWhiteModel, SwaptionQuote, calibrate_hull_white

__all__ = [
    "REFERENCE_CURVE_QUOTES",
    "COUNTERDIAGONAL_10Y",
    "DEFAULT_LOGISTIC_ALPHA",
    "DEFAULT_LAMBDA_MAX",
    "LOAN_FIXTURE_SEED",
    "reference_curve",
    "reference_vol_quotes",
    "reference_model",
    "default_logistic",
    "default_rational",
    "standard_scenario",
    "synthetic_loan_fixture",
]

REFERENCE_CURVE_QUOTES = [
    SwapQuote(1, -0.0025),
    SwapQuote(2, -0.0015),
    SwapQuote(3, 0.0000),
    SwapQuote(4, 0.0015),
    SwapQuote(5, 0.0031),
    SwapQuote(6, 0.0046),
    SwapQuote(7, 0.0060),
    SwapQuote(8, 0.0071),
    SwapQuote(9, 0.0081),
    SwapQuote(10, 0.008883),
    SwapQuote(12, 0.0102),
    SwapQuote(15, 0.0115),
    SwapQuote(20, 0.0128),
    SwapQuote(25, 0.0133),
    SwapQuote(30, 0.0135),
]

# counter-diagonal calibration set for a 10y mortgage: (expiry, tenor, normal vol bps)
COUNTERDIAGONAL_10Y = [
    (1, 10, 46.31),
    (3, 7, 56.28),
    (5, 5, 61.98),
    (7, 3, 64.79),
    (9, 1, 64.89),
]

DEFAULT_LOGISTIC_ALPHA = (0.040077, 0.11132, -149.65, 2.5226)
DEFAULT_LAMBDA_MAX = 0.30
LOAN_FIXTURE_SEED = 20180123
LOAN_FIXTURE_TRUE_ALPHA = (0.04, 0.11, -150.0, 2.6)


@lru_cache(maxsize=1)
def reference_curve() -> YieldCurve:
    return bootstrap(REFERENCE_CURVE_QUOTES)


def reference_vol_quotes() -> list[SwaptionQuote]:
    return [SwaptionQuote(e, t, v / 1e4) for e, t, v in COUNTERDIAGONAL_10Y]


@lru_cache(maxsize=1)
def reference_model() -> HullWhiteModel:
    """Hull-White model calibrated to the counter-diagonal quotes on the reference curve."""
    return calibrate_hull_white(reference_curve(), reference_vol_quotes()).model


def default_logistic() -> LogisticCpr:
    return LogisticCpr(*DEFAULT_LOGISTIC_ALPHA)


def default_rational(lambda_max: float = DEFAULT_LAMBDA_MAX) -> RationalCpr:
    return RationalCpr(lambda_max, 0.0)


def standard_scenario(kind: str = BULLET, cpr_form: str = "rational",
                      maturity_years: int = 10, n_paths: int = 100_000,
                      seed: int = 1, zeta: float = 0.0,
                      notional: float = 1.0) -> IasScenario:
    """At-the-money scenario on the reference market.

    The contract rate is the rate at which the zero-prepayment amortizing
    swap values to zero on the reference curve (the par rate for a bullet).
    """
    model = reference_model()
    rate = atm_mortgage_rate(model.curve, kind, maturity_years, notional)
    cpr_model = {"rational": default_rational(), "sigmoid": default_logistic(),
                 "logistic": default_logistic()}[cpr_form]
    return IasScenario(
        mortgage=MortgageSpec(kind, notional, rate, maturity_years),
        cpr_model=cpr_model,
        model=model,
        incentive=IncentiveModel(zeta),
        n_paths=n_paths,
        seed=seed,
    )


def synthetic_loan_fixture(n_periods: int = 72, loans_per_period: int = 12000,
                           seed: int = LOAN_FIXTURE_SEED):
    """Seeded loan tape whose generating S-curve the bin fit must recover."""
    true_model = LogisticCpr(*LOAN_FIXTURE_TRUE_ALPHA)
    observations = generate_loan_observations(
        true_model, n_periods=n_periods, loans_per_period=loans_per_period, seed=seed
    )
    return observations, true_model
