"""One-factor short-rate models fitted to a discount curve.

Hull-White is the working model: dr = lam * (theta(t) - r) dt + eta dW with
Gaussian rates, affine bond prices, analytic European swaption and floorlet
prices via decomposition into zero-coupon-bond options, and exact transition
sampling on the payment grid. A CIR++ backend (square-root factor plus a
deterministic shift that reprices the curve) is available behind the same
bond/simulation interface.

Simulation decomposes r(t) = x(t) + alpha(t) with x a zero-mean
Ornstein-Uhlenbeck factor and alpha(t) = f(0,t) + eta^2/(2 lam^2) *
(1 - exp(-lam t))^2, so the curve is repriced by construction. The money
market account can be accrued two ways:

* ``exact``:     the integral of x over each step is drawn jointly with the
                 endpoint from their bivariate normal law and the
                 deterministic part integrates in closed form, so
                 E[1/M(T)] = P(0,T) holds without discretization bias;
* ``trapezoid``: 0.5 * (r_k + r_{k+1}) per interval, which carries a small
                 O(dt^2) bias on a yearly grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize
from scipy.stats import norm

from .curve import YieldCurve

__all__ = [
    "PathSet",
    "SwaptionQuote",
    "HullWhiteModel",
    "CirPlusPlusModel",
    "CalibrationResult",
    "CalibrationError",
    "SwaptionNumericalError",
    "bachelier_atm_price",
    "bachelier_implied_vol",
    "calibrate_hull_white",
]

_FD_STEP = 1e-4  # years, for forward-rate differentiation of log P(0, t)
_RNG_BLOCK = 8192  # antithetic pairs per counter-based RNG block

RECEIVER = "receiver"
PAYER = "payer"


class SwaptionNumericalError(RuntimeError):
    """Critical-rate root finding for the bond-option decomposition failed."""


class CalibrationError(RuntimeError):
    """Optimizer failed to converge; carries the best parameters seen."""

    def __init__(self, message: str, best_result: "CalibrationResult"):
        super().__init__(message)
        self.best_result = best_result


@dataclass(frozen=True)
class SwaptionQuote:
    """ATM swaption quote in normal (Bachelier) volatility, decimal per sqrt-year."""

    expiry_years: float
    tenor_years: float
    normal_vol: float

    def __post_init__(self):
        if self.expiry_years <= 0 or self.tenor_years <= 0:
            raise ValueError("expiry and tenor must be positive")
        if self.normal_vol < 0:
            raise ValueError("normal_vol must be non-negative")


@dataclass(frozen=True)
class PathSet:
    """Simulated short-rate paths and pathwise money-market account.

    ``short_rate`` and ``money_market`` have shape (n_paths, len(grid_times));
    the money market starts at 1 and discounting a T_i cash flow on path j
    uses money_market[j, i].
    """

    grid_times: np.ndarray
    short_rate: np.ndarray
    money_market: np.ndarray
    rng_seed: int

    def __post_init__(self):
        if self.short_rate.shape != self.money_market.shape:
            raise ValueError("short_rate and money_market shapes differ")
        if self.short_rate.shape[1] != self.grid_times.size:
            raise ValueError("grid length inconsistent with path matrices")
        if not np.allclose(self.money_market[:, 0], 1.0):
            raise ValueError("money market must start at 1")
        if np.any(self.money_market <= 0):
            raise ValueError("money market must stay positive")

    @property
    def n_paths(self) -> int:
        return self.short_rate.shape[0]


def _gaussian_blocks(seed: int, n_pairs: int, n_draws: int):
    """Standard normals of shape (n_pairs, n_draws) from counter-based blocks.

    Each block of pairs gets an independently spawned Philox stream, so the
    result does not depend on how blocks are scheduled across workers.
    """
    children = np.random.SeedSequence(seed).spawn(max((n_pairs + _RNG_BLOCK - 1) // _RNG_BLOCK, 1))
    out = np.empty((n_pairs, n_draws))
    for b, child in enumerate(children):
        lo = b * _RNG_BLOCK
        hi = min(lo + _RNG_BLOCK, n_pairs)
        gen = np.random.Generator(np.random.Philox(child))
        out[lo:hi] = gen.standard_normal((hi - lo, n_draws))
    return out


class HullWhiteModel:
    """Hull-White model dr = lam (theta(t) - r) dt + eta dW on a given curve."""

    def __init__(self, curve: YieldCurve, mean_reversion: float, vol: float):
        if mean_reversion <= 0:
            raise ValueError("mean_reversion must be positive")
        if vol <= 0:
            raise ValueError("vol must be positive")
        self.curve = curve
        self.mean_reversion = float(mean_reversion)
        self.vol = float(vol)

    # -- curve derived quantities -------------------------------------------------

    def forward_rate(self, t: float) -> float:
        """Instantaneous forward f(0, t) from finite differences of log P(0, t)."""
        h = _FD_STEP
        t_max = self.curve.last_pillar
        if not 0.0 <= t <= t_max:
            raise ValueError(f"t={t} outside curve domain [0, {t_max}]")
        ln_p = lambda u: math.log(self.curve.discount(u))
        if t < h:
            return -(ln_p(t + h) - ln_p(t)) / h
        if t > t_max - h:
            return -(ln_p(t) - ln_p(t - h)) / h
        return -(ln_p(t + h) - ln_p(t - h)) / (2.0 * h)

    def theta(self, t: float) -> float:
        """Mean-reversion target fitted to the curve:
        theta(t) = f'(0,t)/lam + f(0,t) + eta^2/(2 lam^2) (1 - exp(-2 lam t))."""
        lam, eta = self.mean_reversion, self.vol
        h = _FD_STEP
        t_max = self.curve.last_pillar
        if not 0.0 <= t <= t_max:
            raise ValueError(f"t={t} outside curve domain [0, {t_max}]")
        t_c = min(max(t, h), t_max - h)  # shift the df/dt stencil inside the domain
        dfdt = (self.forward_rate(t_c + h) - self.forward_rate(t_c - h)) / (2.0 * h)
        return dfdt / lam + self.forward_rate(t) + \
            eta**2 / (2.0 * lam**2) * (1.0 - math.exp(-2.0 * lam * t))

    def _b(self, t, T):
        lam = self.mean_reversion
        return (1.0 - np.exp(-lam * (np.asarray(T, dtype=float) - t))) / lam

    def alpha(self, t: float) -> float:
        """Deterministic shift so r(t) = x(t) + alpha(t) reprices the curve."""
        lam, eta = self.mean_reversion, self.vol
        return self.forward_rate(t) + eta**2 / (2.0 * lam**2) * (1.0 - math.exp(-lam * t)) ** 2

    # -- bonds ----------------------------------------------------------------------

    def bond_price(self, t: float, maturity, short_rate):
        """Zero-coupon bond P(t, T) given the short rate at t; broadcasts over inputs.

        Affine form exp(A + B r(t)) with coefficients pinned to the market
        curve, so bond_price(0, T, f(0,0)) reproduces curve.discount(T).
        """
        T = np.asarray(maturity, dtype=float)
        if np.any(T < t):
            raise ValueError("bond maturity before valuation time")
        lam, eta = self.mean_reversion, self.vol
        b = self._b(t, T)
        ln_ratio = np.log(self.curve.discount(T)) - math.log(self.curve.discount(t))
        f0t = self.forward_rate(t)
        ln_a = ln_ratio + b * f0t - eta**2 / (4.0 * lam) * (1.0 - math.exp(-2.0 * lam * t)) * b**2
        out = np.exp(ln_a - b * np.asarray(short_rate, dtype=float))
        return float(out) if out.ndim == 0 else out

    # -- simulation -------------------------------------------------------------------

    def simulate(
        self,
        grid_times,
        n_paths: int,
        seed: int,
        antithetic: bool = True,
        money_market: str = "exact",
    ) -> PathSet:
        """Exact Gaussian transitions of the short rate on the grid.

        With ``antithetic`` (default) consecutive paths 2k and 2k+1 use
        negated Gaussian draws; n_paths must then be even. Identical inputs
        produce bit-identical output.
        """
        grid = np.asarray(grid_times, dtype=float)
        if grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must start at 0 and be strictly increasing")
        if money_market not in ("exact", "trapezoid"):
            raise ValueError("money_market must be 'exact' or 'trapezoid'")
        if n_paths < 2:
            raise ValueError("n_paths must be at least 2")
        if antithetic and n_paths % 2:
            raise ValueError("antithetic sampling needs an even n_paths")

        lam, eta = self.mean_reversion, self.vol
        n_steps = grid.size - 1
        dts = np.diff(grid)
        decay = np.exp(-lam * dts)
        b_step = (1.0 - decay) / lam
        var_x = eta**2 * (1.0 - decay**2) / (2.0 * lam)
        # joint law of (x(t+dt), int x ds) conditional on x(t)
        var_y = eta**2 / lam**2 * (dts - 2.0 * b_step + (1.0 - decay**2) / (2.0 * lam))
        cov_xy = 0.5 * eta**2 * b_step**2
        alphas = np.array([self.alpha(t) for t in grid])

        draws_per_step = 2 if money_market == "exact" else 1
        if antithetic:
            base = _gaussian_blocks(seed, n_paths // 2, n_steps * draws_per_step)
            z = np.empty((n_paths, n_steps * draws_per_step))
            z[0::2] = base
            z[1::2] = -base
        else:
            z = _gaussian_blocks(seed, n_paths, n_steps * draws_per_step)

        x = np.zeros((n_paths, n_steps + 1))
        log_mm = np.zeros((n_paths, n_steps + 1))
        if money_market == "exact":
            z1 = z[:, 0::2]
            z2 = z[:, 1::2]
            # integrated deterministic part: int_0^t alpha = -ln P(0,t) + vol term
            int_alpha = -np.log(self.curve.discount(grid)) + eta**2 / (2.0 * lam**2) * (
                grid - 2.0 * (1.0 - np.exp(-lam * grid)) / lam
                + (1.0 - np.exp(-2.0 * lam * grid)) / (2.0 * lam)
            )
            cum = np.zeros(n_paths)
            for k in range(n_steps):
                sd_x = math.sqrt(var_x[k])
                eps_x = sd_x * z1[:, k]
                cond_sd = math.sqrt(max(var_y[k] - cov_xy[k] ** 2 / var_x[k], 0.0))
                eps_y = cov_xy[k] / sd_x * z1[:, k] + cond_sd * z2[:, k]
                cum += x[:, k] * b_step[k] + eps_y
                x[:, k + 1] = x[:, k] * decay[k] + eps_x
                log_mm[:, k + 1] = cum + int_alpha[k + 1]
        else:
            for k in range(n_steps):
                x[:, k + 1] = x[:, k] * decay[k] + math.sqrt(var_x[k]) * z[:, k]
            rates = x + alphas[None, :]
            log_mm[:, 1:] = np.cumsum(0.5 * (rates[:, :-1] + rates[:, 1:]) * dts[None, :], axis=1)

        rates = x + alphas[None, :]
        return PathSet(grid, rates, np.exp(log_mm), rng_seed=seed)

    # -- options -----------------------------------------------------------------------

    def bond_option(
        self,
        expiry: float,
        bond_maturity: float,
        strike: float,
        kind: str = "call",
        t: float = 0.0,
        short_rate=None,
    ):
        """European option on a zero-coupon bond, valued at time t (default 0).

        At t > 0 a ``short_rate`` state is required and the formula broadcasts
        over it.
        """
        if kind not in ("call", "put"):
            raise ValueError("kind must be 'call' or 'put'")
        if not t <= expiry <= bond_maturity:
            raise ValueError("need t <= expiry <= bond_maturity")
        lam, eta = self.mean_reversion, self.vol
        if t == 0.0 and short_rate is None:
            p_t = self.curve.discount(expiry)
            p_s = self.curve.discount(bond_maturity)
        else:
            p_t = self.bond_price(t, expiry, short_rate)
            p_s = self.bond_price(t, bond_maturity, short_rate)
        sig = eta * math.sqrt((1.0 - math.exp(-2.0 * lam * (expiry - t))) / (2.0 * lam)) \
            * (1.0 - math.exp(-lam * (bond_maturity - expiry))) / lam
        omega = 1.0 if kind == "call" else -1.0
        if sig < 1e-14:
            out = np.maximum(omega * (p_s - strike * p_t), 0.0)
        else:
            h = np.log(p_s / (strike * p_t)) / sig + 0.5 * sig
            out = omega * (p_s * norm.cdf(omega * h) - strike * p_t * norm.cdf(omega * (h - sig)))
        out = np.asarray(out)
        return float(out) if out.ndim == 0 else out

    def _swap_schedule(self, expiry: float, tenor: float):
        n = int(round(tenor))
        if n < 1 or abs(tenor - n) > 1e-9:
            raise ValueError("tenor must be a whole number of years (annual schedule)")
        times = expiry + np.arange(1, n + 1, dtype=float)
        return times

    def jamshidian_critical_rate(self, expiry: float, tenor: float, strike: float) -> float:
        """Short rate at expiry for which the underlying coupon bond is worth par."""
        pay_times = self._swap_schedule(expiry, tenor)
        coupons = np.full(pay_times.size, strike)
        coupons[-1] += 1.0

        def excess(r):
            return float(np.sum(coupons * self.bond_price(expiry, pay_times, r))) - 1.0

        lo, hi = -1.0, 1.0
        for _ in range(60):
            if excess(lo) > 0 > excess(hi):
                break
            lo *= 2.0
            hi *= 2.0
            if hi > 1e6:
                raise SwaptionNumericalError(
                    f"no critical rate bracket for expiry={expiry}, tenor={tenor}, strike={strike}"
                )
        try:
            return brentq(excess, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200)
        except RuntimeError as exc:  # pragma: no cover - brentq convergence failure
            raise SwaptionNumericalError(str(exc)) from exc

    def swaption_price(
        self,
        expiry: float,
        tenor: float,
        strike: float,
        kind: str = RECEIVER,
        t: float = 0.0,
        short_rate=None,
    ):
        """European swaption on an annual-pay swap, per unit notional.

        Decomposed into zero-coupon-bond options at the critical rate where
        the underlying coupon bond is at par: a receiver swaption is a basket
        of bond calls, a payer one of bond puts. Valued at t with state
        ``short_rate`` when t > 0 (broadcasts over the state).
        """
        if kind not in (RECEIVER, PAYER):
            raise ValueError(f"kind must be '{RECEIVER}' or '{PAYER}'")
        pay_times = self._swap_schedule(expiry, tenor)
        coupons = np.full(pay_times.size, strike)
        coupons[-1] += 1.0
        r_star = self.jamshidian_critical_rate(expiry, tenor, strike)
        strikes = self.bond_price(expiry, pay_times, r_star)
        opt_kind = "call" if kind == RECEIVER else "put"
        total = 0.0
        for c, s_time, x in zip(coupons, pay_times, strikes):
            total = total + c * self.bond_option(expiry, float(s_time), float(x), opt_kind,
                                                 t=t, short_rate=short_rate)
        return total

    def floorlet_price(self, t_start: float, t_end: float, strike: float) -> float:
        """Floorlet paying tau * max(K - L(T1; T1, T2), 0) at T2.

        Equivalent to (1 + tau K) bond calls struck at 1/(1 + tau K), and to a
        one-period receiver swaption when tau = 1.
        """
        if t_end <= t_start:
            raise ValueError("need t_start < t_end")
        tau = t_end - t_start
        scale = 1.0 + tau * strike
        if scale <= 0:
            return 0.0
        return scale * self.bond_option(t_start, t_end, 1.0 / scale, "call")

    def forward_swap_rate(self, expiry: float, tenor: float) -> float:
        return self.curve.swap_rate(expiry, expiry + tenor)

    def swap_annuity(self, expiry: float, tenor: float) -> float:
        return self.curve.annuity(expiry, expiry + tenor)


def bachelier_atm_price(annuity: float, vol: float, expiry: float) -> float:
    """ATM option value under a normal model: annuity * vol * sqrt(T / 2 pi)."""
    return annuity * vol * math.sqrt(expiry / (2.0 * math.pi))


def bachelier_implied_vol(price: float, forward_rate: float, annuity: float, expiry: float) -> float:
    """Invert the ATM normal-model price back to a volatility.

    Quotes are ATM by convention (strike equals ``forward_rate``), where the
    price is linear in the volatility.
    """
    del forward_rate  # ATM: the strike sits on the forward, which drops out
    if annuity <= 0 or expiry <= 0:
        raise ValueError("annuity and expiry must be positive")
    if price < 0:
        raise ValueError(f"price {price} below the no-arbitrage bound 0")
    return price / (annuity * math.sqrt(expiry / (2.0 * math.pi)))


@dataclass(frozen=True)
class CalibrationResult:
    model: HullWhiteModel
    fitted_vols: np.ndarray
    market_vols: np.ndarray
    objective: float
    n_iterations: int
    converged: bool


def model_implied_vols(model: HullWhiteModel, quotes: list[SwaptionQuote]) -> np.ndarray:
    """ATM normal vols implied by the model's analytic swaption prices."""
    vols = np.empty(len(quotes))
    for i, q in enumerate(quotes):
        strike = model.forward_swap_rate(q.expiry_years, q.tenor_years)
        price = model.swaption_price(q.expiry_years, q.tenor_years, strike, RECEIVER)
        annuity = model.swap_annuity(q.expiry_years, q.tenor_years)
        vols[i] = bachelier_implied_vol(price, strike, annuity, q.expiry_years)
    return vols


def calibrate_hull_white(
    curve: YieldCurve,
    quotes: list[SwaptionQuote],
    start: tuple[float, float] = (0.05, 0.01),
    max_iterations: int = 2000,
) -> CalibrationResult:
    """Fit (mean reversion, vol) to ATM swaption quotes in vol space.

    Nelder-Mead on the log of both parameters (positivity for free),
    minimizing the sum of squared normal-implied-vol errors.
    """
    if len(quotes) < 2:
        raise ValueError("calibration needs at least 2 quotes")
    market = np.array([q.normal_vol for q in quotes])

    def objective(log_params):
        lam, eta = np.exp(log_params)
        model = HullWhiteModel(curve, lam, eta)
        return float(np.sum((model_implied_vols(model, quotes) - market) ** 2))

    res = minimize(
        objective,
        x0=np.log(np.asarray(start)),
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-10, "maxiter": max_iterations, "maxfev": 2 * max_iterations},
    )
    lam, eta = np.exp(res.x)
    model = HullWhiteModel(curve, lam, eta)
    result = CalibrationResult(
        model=model,
        fitted_vols=model_implied_vols(model, quotes),
        market_vols=market,
        objective=float(res.fun),
        n_iterations=int(res.nit),
        converged=bool(res.success),
    )
    if not res.success:
        raise CalibrationError(f"calibration did not converge: {res.message}", result)
    return result


class CirPlusPlusModel:
    """CIR++: square-root factor plus the deterministic shift that fits the curve.

    dx = lam (theta_bar - x) dt + eta sqrt(x) dW, r(t) = x(t) + shift(t). Bond
    prices combine the analytic CIR bond with the market/model discount ratio
    so the input curve is repriced exactly at t=0. Swaption analytics are not
    provided; hedging runs on Hull-White.
    """

    def __init__(self, curve: YieldCurve, mean_reversion: float, vol: float,
                 theta_bar: float, x0: float):
        if min(mean_reversion, vol, theta_bar, x0) <= 0:
            raise ValueError("all CIR++ parameters must be positive")
        self.curve = curve
        self.mean_reversion = float(mean_reversion)
        self.vol = float(vol)
        self.theta_bar = float(theta_bar)
        self.x0 = float(x0)
        self.feller_satisfied = 2.0 * mean_reversion * theta_bar >= vol**2

    def _cir_bond(self, tau, x):
        lam, eta, tb = self.mean_reversion, self.vol, self.theta_bar
        tau = np.asarray(tau, dtype=float)
        h = math.sqrt(lam**2 + 2.0 * eta**2)
        e = np.exp(h * tau)
        denom = (lam + h) * (e - 1.0) + 2.0 * h
        b = 2.0 * (e - 1.0) / denom
        ln_a = (2.0 * lam * tb / eta**2) * np.log(2.0 * h * np.exp(0.5 * (lam + h) * tau) / denom)
        return np.exp(ln_a - b * np.asarray(x, dtype=float))

    def shift(self, t: float) -> float:
        """Deterministic spread between market and CIR instantaneous forwards."""
        h = _FD_STEP
        f_mkt = -(math.log(self.curve.discount(min(t + h, self.curve.last_pillar)))
                  - math.log(self.curve.discount(max(t - h, 0.0)))) \
            / (min(t + h, self.curve.last_pillar) - max(t - h, 0.0))
        f_cir = -(math.log(self._cir_bond(t + h, self.x0)) - math.log(self._cir_bond(max(t - h, 0.0), self.x0))) \
            / (t + h - max(t - h, 0.0))
        return f_mkt - f_cir

    def bond_price(self, t: float, maturity, short_rate):
        """P(t, T) given the short rate at t (the factor is the rate net of the shift)."""
        T = np.asarray(maturity, dtype=float)
        x = np.asarray(short_rate, dtype=float) - self.shift(t)
        ratio = (
            self.curve.discount(T) / self.curve.discount(t)
            * self._cir_bond(t, self.x0) / self._cir_bond(T, self.x0)
        )
        out = np.asarray(ratio * self._cir_bond(T - t, x))
        return float(out) if out.ndim == 0 else out

    def simulate(self, grid_times, n_paths: int, seed: int, antithetic: bool = True,
                 substeps: int = 12) -> PathSet:
        """Full-truncation Euler for the factor; money market accrued on substeps.

        The factor is floored at zero after every substep, so short-rate paths
        never dip below the shift function; the short-rate integral is
        trapezoidal over the substep grid.
        """
        grid = np.asarray(grid_times, dtype=float)
        if grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must start at 0 and be strictly increasing")
        if antithetic and n_paths % 2:
            raise ValueError("antithetic sampling needs an even n_paths")
        lam, eta, tb = self.mean_reversion, self.vol, self.theta_bar
        n_steps = grid.size - 1
        if antithetic:
            base = _gaussian_blocks(seed, n_paths // 2, n_steps * substeps)
            z = np.empty((n_paths, n_steps * substeps))
            z[0::2] = base
            z[1::2] = -base
        else:
            z = _gaussian_blocks(seed, n_paths, n_steps * substeps)
        x = np.full(n_paths, self.x0)
        x_grid = np.empty((n_paths, n_steps + 1))
        x_grid[:, 0] = x
        log_mm = np.zeros((n_paths, n_steps + 1))
        accrual = np.zeros(n_paths)
        col = 0
        for k in range(n_steps):
            dt = (grid[k + 1] - grid[k]) / substeps
            sq_dt = math.sqrt(dt)
            for s in range(substeps):
                t_lo = grid[k] + s * dt
                r_lo = x + self.shift(t_lo)
                x = x + lam * (tb - x) * dt + eta * np.sqrt(x) * sq_dt * z[:, col]
                np.maximum(x, 0.0, out=x)
                accrual += 0.5 * (r_lo + x + self.shift(t_lo + dt)) * dt
                col += 1
            x_grid[:, k + 1] = x
            log_mm[:, k + 1] = accrual
        shifts = np.array([self.shift(t) for t in grid])
        rates = x_grid + shifts[None, :]
        return PathSet(grid, rates, np.exp(log_mm), rng_seed=seed)
