"""Pricing and static hedging of mortgage prepayment risk.

A mortgage portfolio is replicated by an index amortizing swap whose
notional follows the simulated refinancing incentive; static hedge
portfolios of swaps and receiver swaptions are calibrated against the
simulated notional paths, priced, and risk-profiled.
"""

__version__ = "0.1.0"

from .curve import SwapQuote, YieldCurve, bootstrap
from .mortgage import ANNUITY, BULLET, MortgageSpec, annuity_installment, constant_cpr_schedule, psi
from .prepayment import (
    ConstantCpr,
    IncentiveModel,
    LogisticCpr,
    RationalCpr,
    cpr_to_smm,
    smm_to_cpr,
)
from .shortrate import (
    CirPlusPlusModel,
    HullWhiteModel,
    PathSet,
    SwaptionQuote,
    bachelier_implied_vol,
    calibrate_hull_white,
)

__all__ = [
    "SwapQuote",
    "YieldCurve",
    "bootstrap",
    "MortgageSpec",
    "BULLET",
    "ANNUITY",
    "annuity_installment",
    "psi",
    "constant_cpr_schedule",
    "ConstantCpr",
    "RationalCpr",
    "LogisticCpr",
    "IncentiveModel",
    "smm_to_cpr",
    "cpr_to_smm",
    "HullWhiteModel",
    "CirPlusPlusModel",
    "PathSet",
    "SwaptionQuote",
    "bachelier_implied_vol",
    "calibrate_hull_white",
]
