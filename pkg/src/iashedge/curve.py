"""Discount curve bootstrapped from par swap quotes.

The curve stores discount factors P(0, t) at the quote maturities and
interpolates log-linearly in the discount factor between pillars, which is
equivalent to piecewise-constant instantaneous forward rates. Negative rates
are supported throughout (discount factors may exceed 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SwapQuote", "YieldCurve", "CurveInputError", "CurveNumericalError", "bootstrap"]

# Bisection bracket and tolerance for the bootstrap of each new discount factor.
_DF_BRACKET = (1e-8, 2.0)
_DF_TOL = 1e-14


class CurveInputError(ValueError):
    """Invalid quotes or query outside the curve domain."""


class CurveNumericalError(RuntimeError):
    """Bootstrap root-finding failure."""


@dataclass(frozen=True)
class SwapQuote:
    """Spot-starting par swap quote: fixed rate that prices the swap to zero."""

    maturity_years: int
    par_rate: float
    fixed_frequency: int = 1

    def __post_init__(self):
        if self.maturity_years < 1:
            raise CurveInputError(f"maturity_years must be >= 1, got {self.maturity_years}")
        if not np.isfinite(self.par_rate):
            raise CurveInputError("par_rate must be finite")
        if self.fixed_frequency < 1:
            raise CurveInputError("fixed_frequency must be a positive integer")


class YieldCurve:
    """Immutable discount curve with log-linear interpolation in P(0, t).

    ``pillar_times`` excludes t=0; P(0, 0) = 1 is implicit. Queries beyond the
    last pillar raise unless ``extrapolate`` was enabled (flat-forward
    extension of the last pillar interval).
    """

    def __init__(self, pillar_times, discount_factors, extrapolate: bool = False):
        times = np.asarray(pillar_times, dtype=float)
        dfs = np.asarray(discount_factors, dtype=float)
        if times.ndim != 1 or times.shape != dfs.shape:
            raise CurveInputError("pillar_times and discount_factors must be 1-d and equal length")
        if times.size == 0:
            raise CurveInputError("curve needs at least one pillar")
        if times[0] <= 0 or np.any(np.diff(times) <= 0):
            raise CurveInputError("pillar times must be positive and strictly increasing")
        if np.any(dfs <= 0):
            raise CurveInputError("discount factors must be positive")
        self._times = np.concatenate(([0.0], times))
        self._log_dfs = np.concatenate(([0.0], np.log(dfs)))
        self._extrapolate = bool(extrapolate)
        self._times.flags.writeable = False
        self._log_dfs.flags.writeable = False

    @property
    def pillar_times(self) -> np.ndarray:
        return self._times[1:]

    @property
    def discount_factors(self) -> np.ndarray:
        return np.exp(self._log_dfs[1:])

    @property
    def last_pillar(self) -> float:
        return float(self._times[-1])

    def discount(self, t):
        """Discount factor P(0, t); accepts a scalar or an array."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0):
            raise CurveInputError("discount time must be non-negative")
        if np.any(t_arr > self._times[-1] + 1e-12) and not self._extrapolate:
            raise CurveInputError(
                f"t={np.max(t_arr)} beyond last pillar {self._times[-1]}; "
                "enable extrapolation to allow flat-forward extension"
            )
        if self._extrapolate and self._times.size >= 2:
            # flat forward beyond the end: linear continuation of log P
            slope = (self._log_dfs[-1] - self._log_dfs[-2]) / (self._times[-1] - self._times[-2])
            log_df = np.where(
                t_arr > self._times[-1],
                self._log_dfs[-1] + slope * (t_arr - self._times[-1]),
                np.interp(np.minimum(t_arr, self._times[-1]), self._times, self._log_dfs),
            )
        else:
            log_df = np.interp(t_arr, self._times, self._log_dfs)
        out = np.exp(log_df)
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out

    def forward_libor(self, t_start: float, t_end: float) -> float:
        """Simply-compounded forward rate L(0; t_start, t_end)."""
        if t_end <= t_start:
            raise CurveInputError("forward_libor needs t_start < t_end")
        tau = t_end - t_start
        p0, p1 = self.discount(t_start), self.discount(t_end)
        return (p0 - p1) / (tau * p1)

    def swap_rate(self, t_start: float, t_end: float, frequency: int = 1) -> float:
        """Forward-start par swap rate over [t_start, t_end] at the given fixed frequency."""
        times, taus = fixed_schedule(t_start, t_end, frequency)
        dfs = self.discount(times)
        annuity = float(np.sum(taus * dfs))
        return (self.discount(t_start) - self.discount(t_end)) / annuity

    def annuity(self, t_start: float, t_end: float, frequency: int = 1) -> float:
        """Fixed-leg annuity factor sum(tau_k P(0, T_k)) over [t_start, t_end]."""
        times, taus = fixed_schedule(t_start, t_end, frequency)
        return float(np.sum(taus * self.discount(times)))


def fixed_schedule(t_start: float, t_end: float, frequency: int = 1):
    """Payment times and accruals for a fixed leg from t_start to t_end."""
    n = int(round((t_end - t_start) * frequency))
    if n < 1 or abs(t_start + n / frequency - t_end) > 1e-9:
        raise CurveInputError(
            f"no valid fixed schedule from {t_start} to {t_end} at frequency {frequency}"
        )
    times = t_start + np.arange(1, n + 1) / frequency
    taus = np.full(n, 1.0 / frequency)
    return times, taus


def bootstrap(quotes: list[SwapQuote], extrapolate: bool = False) -> YieldCurve:
    """Build a YieldCurve that reprices every input par swap exactly.

    Pillars are added sequentially at each quote maturity; the new discount
    factor is solved by bisection on the par equation, with payment dates
    between pillars interpolated log-linearly (consistent with the final
    curve's own interpolation).
    """
    if not quotes:
        raise CurveInputError("at least one quote required")
    mats = [q.maturity_years for q in quotes]
    if any(m2 <= m1 for m1, m2 in zip(mats, mats[1:])):
        raise CurveInputError(f"quote maturities must be strictly increasing, got {mats}")

    times: list[float] = []
    dfs: list[float] = []

    def par_residual(df_new: float, quote: SwapQuote) -> float:
        trial = YieldCurve(times + [float(quote.maturity_years)], dfs + [df_new])
        pay_times, taus = fixed_schedule(0.0, quote.maturity_years, quote.fixed_frequency)
        annuity = float(np.sum(taus * trial.discount(pay_times)))
        return quote.par_rate * annuity - (1.0 - df_new)

    for quote in quotes:
        lo, hi = _DF_BRACKET
        f_lo, f_hi = par_residual(lo, quote), par_residual(hi, quote)
        if f_lo * f_hi > 0:
            raise CurveNumericalError(
                f"bootstrap failed to bracket discount factor at maturity {quote.maturity_years}y"
            )
        while hi - lo > _DF_TOL:
            mid = 0.5 * (lo + hi)
            f_mid = par_residual(mid, quote)
            if f_lo * f_mid <= 0:
                hi = mid
            else:
                lo, f_lo = mid, f_mid
        times.append(float(quote.maturity_years))
        dfs.append(0.5 * (lo + hi))

    return YieldCurve(times, dfs, extrapolate=extrapolate)
