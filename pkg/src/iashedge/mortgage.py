"""Bullet and annuity mortgage mechanics on a yearly payment grid.

A bullet pays interest only and redeems the full notional at maturity; an
annuity pays a constant installment whose interest and principal parts
rebalance over time. Prepayment at rate Lambda applies to the
post-repayment balance, which the one-period update factor psi() captures
for both contract kinds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BULLET",
    "ANNUITY",
    "MortgageSpec",
    "ScheduleRow",
    "annuity_installment",
    "psi",
    "constant_cpr_schedule",
    "notional_path",
]

BULLET = "bullet"
ANNUITY = "annuity"
_KINDS = (BULLET, ANNUITY)


@dataclass(frozen=True)
class MortgageSpec:
    kind: str
    notional_0: float
    rate: float
    maturity_years: int
    payment_frequency: int = 1

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if self.notional_0 <= 0:
            raise ValueError("notional_0 must be positive")
        if self.maturity_years < 1:
            raise ValueError("maturity_years must be >= 1")
        if not np.isfinite(self.rate):
            raise ValueError("rate must be finite")
        if self.payment_frequency != 1:
            raise ValueError("only annual payments are supported")

    @property
    def payment_times(self) -> np.ndarray:
        return np.arange(1, self.maturity_years + 1, dtype=float)


@dataclass(frozen=True)
class ScheduleRow:
    time: float
    notional_before: float
    interest: float
    repayment: float
    prepayment: float
    installment: float


def annuity_installment(rate: float, notional: float, years_remaining: int) -> float:
    """Constant installment whose present value at the contract rate equals the notional."""
    if years_remaining < 1:
        raise ValueError("years_remaining must be >= 1")
    if rate <= -1.0:
        raise ValueError("rate must exceed -100%")
    if rate == 0.0:
        # zero-rate limit: straight-line amortization
        return notional / years_remaining
    return rate * notional / (1.0 - (1.0 + rate) ** (-years_remaining))


def psi(kind: str, rate: float, cpr: float, maturity: float, t_prev: float) -> float:
    """One-period multiplicative notional update N(T_i) / N(T_{i-1}).

    Combines the scheduled repayment of the contract kind with prepayment at
    annual rate ``cpr`` applied to the post-repayment balance. ``t_prev`` is
    the previous payment date T_{i-1}; for the annuity the remaining term
    maturity - t_prev sets the installment.
    """
    if not 0.0 <= cpr <= 1.0:
        raise ValueError(f"cpr must lie in [0, 1], got {cpr}")
    if kind == BULLET:
        return 1.0 - cpr
    if kind != ANNUITY:
        raise ValueError(f"unknown mortgage kind {kind!r}")
    if t_prev >= maturity:
        raise ValueError("annuity update needs t_prev < maturity")
    years_remaining = maturity - t_prev
    if rate == 0.0:
        factor = (1.0 - cpr) * (1.0 - 1.0 / years_remaining)
    else:
        denom = 1.0 - (1.0 + rate) ** (-years_remaining)
        factor = 1.0 + rate * (cpr - 1.0) / denom + rate - cpr * (rate + 1.0)
    if not -1e-12 <= factor <= 1.0 + 1e-12:
        raise ValueError(
            f"notional update factor {factor} outside [0, 1]; "
            f"inputs kind={kind}, rate={rate}, cpr={cpr}, remaining={years_remaining}"
        )
    return min(max(factor, 0.0), 1.0)


def constant_cpr_schedule(spec: MortgageSpec, cpr: float) -> list[ScheduleRow]:
    """Full payment schedule under a constant annual prepayment rate.

    Prepayment applies at T_1 .. T_{M-1}; the final date clears the remaining
    balance through the scheduled repayment.
    """
    if not 0.0 <= cpr < 1.0:
        raise ValueError(f"cpr must lie in [0, 1), got {cpr}")
    rows = []
    notional = spec.notional_0
    m = spec.maturity_years
    for i in range(1, m + 1):
        t = float(i)
        interest = spec.rate * notional
        if spec.kind == BULLET:
            repayment = notional if i == m else 0.0
            installment = interest + repayment
        else:
            installment = annuity_installment(spec.rate, notional, m - i + 1)
            repayment = installment - interest
        after_repay = notional - repayment
        prepay = cpr * after_repay if i < m else 0.0
        rows.append(
            ScheduleRow(
                time=t,
                notional_before=notional,
                interest=interest,
                repayment=repayment,
                prepayment=prepay,
                installment=installment,
            )
        )
        notional = after_repay - prepay
    return rows


def notional_path(spec: MortgageSpec, cpr_by_date) -> np.ndarray:
    """Notional at T_0 .. T_M under per-date prepayment rates for T_1 .. T_{M-1}.

    ``cpr_by_date`` may be a scalar or a sequence of length M-1 (or M, in
    which case the final entry is ignored: no prepayment decision is taken at
    maturity). The final step applies the scheduled repayment only, so an
    annuity ends at exactly zero and a bullet carries its balance into T_M.
    """
    m = spec.maturity_years
    cprs = np.broadcast_to(np.asarray(cpr_by_date, dtype=float), (max(m - 1, 0),)) \
        if np.ndim(cpr_by_date) == 0 else np.asarray(cpr_by_date, dtype=float)
    if cprs.shape[0] not in (m - 1, m):
        raise ValueError(f"need {m - 1} per-date cpr values, got {cprs.shape[0]}")
    path = np.empty(m + 1)
    path[0] = spec.notional_0
    for i in range(1, m + 1):
        lam = float(cprs[i - 1]) if i < m else 0.0
        path[i] = path[i - 1] * psi(spec.kind, spec.rate, lam, float(m), float(i - 1))
    return path
