"""Report generation: delimited tables plus matplotlib figures.

Each report target writes plot-ready CSV files and renders the matching
figure next to them as PNG. Figures are rendered off-screen (Agg) with fixed
metadata so repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .fixtures import standard_scenario, REFERENCE_CURVE_QUOTES
from .greeks import (delta_profile, gamma_profile, vega_profile, ias_valuation,
                     ias_vega_valuation, portfolio_valuation, portfolio_vega_valuation)
from .hedge import (build_linear_hedge, build_swaption_portfolio, calibrate_diagonal,
                    calibrate_numeric, full_grid_cells, hedge_error_profile, price_portfolio)
from .ias import average_notional, implied_constant_cpr, price_ias_mc, simulate_notional
from .mortgage import ANNUITY, BULLET

__all__ = [
    "report_table1",
    "report_notional",
    "report_hedge",
    "report_greeks",
    "REPORT_TARGETS",
]

_SAVE_KW = {"dpi": 130, "metadata": {"Software": "iashedge"}}


def _write_csv(path: str, header: list[str], rows) -> str:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def report_table1(outdir: str, n_paths: int = 100_000, seed: int = 1) -> list[str]:
    """Headline prices: bullet/annuity under the step and S-curve prepayment models."""
    rows = []
    values = {}
    for kind in (BULLET, ANNUITY):
        for form, label in (("rational", "Full-rational"), ("sigmoid", "Sigmoid")):
            sc = standard_scenario(kind, form, n_paths=n_paths, seed=seed)
            price = price_ias_mc(sc)
            values[(kind, label)] = price.value * 1e4
            rows.append([kind.capitalize(), sc.mortgage.maturity_years,
                         f"{sc.mortgage.rate * 1e4:.2f}", label,
                         f"{price.value * 1e4:.2f}", f"{price.stderr * 1e4:.2f}"])
    csv_path = _write_csv(os.path.join(outdir, "table1.csv"),
                          ["mortgage_type", "maturity_years", "rate_bps",
                           "prepayment_model", "price_bps", "stderr_bps"], rows)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    labels = [f"{k.capitalize()}\n{m}" for (k, m) in values]
    ax.bar(labels, list(values.values()),
           color=["#1f77b4" if "rational" in m.lower() else "#d62728" for (_, m) in values])
    ax.axhline(0.0, color="black", lw=0.8)
    ax.set_ylabel("price (bps of notional)")
    ax.set_title("Replicating swap value by contract and prepayment model")
    ax.grid(True, axis="y", alpha=0.4)
    fig.tight_layout()
    png_path = os.path.join(outdir, "table1.png")
    fig.savefig(png_path, **_SAVE_KW)
    plt.close(fig)
    return [csv_path, png_path]


def report_notional(outdir: str, kind: str = BULLET, cpr_form: str = "rational",
                    n_paths: int = 20_000, seed: int = 1, n_plot: int = 80) -> list[str]:
    """Simulated notional paths, their average, and the constant-rate reconstruction."""
    sc = standard_scenario(kind, cpr_form, n_paths=n_paths, seed=seed)
    paths = sc.simulate_paths()
    np_set = simulate_notional(sc, paths)
    avg = average_notional(np_set)
    implied = implied_constant_cpr(sc.mortgage, avg)
    grid = np_set.grid_times

    sample = np_set.notional[:n_plot]
    rows = [[f"{t:.0f}", f"{avg[i]:.8f}"] + [f"{sample[j, i]:.8f}" for j in range(sample.shape[0])]
            for i, t in enumerate(grid)]
    csv_path = _write_csv(os.path.join(outdir, f"notional_{kind}_{cpr_form}.csv"),
                          ["time_years", "average_notional"]
                          + [f"path_{j}" for j in range(sample.shape[0])], rows)
    cpr_path = _write_csv(os.path.join(outdir, f"implied_cpr_{kind}_{cpr_form}.csv"),
                          ["time_years", "implied_constant_cpr"],
                          [[f"{i + 1:.0f}", f"{v:.8f}"] for i, v in enumerate(implied)])

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(grid, sample.T, color="#1f77b4", alpha=0.25, lw=0.7)
    ax.plot(grid, avg, color="black", lw=2.0, label="average")
    from .mortgage import notional_path
    ax.plot(grid, notional_path(sc.mortgage, implied), "--", color="#d62728", lw=1.6,
            label="constant-rate reconstruction")
    ax.set_xlabel("years")
    ax.set_ylabel("outstanding notional")
    ax.set_title(f"Simulated notional, {kind} / {cpr_form}")
    ax.legend()
    ax.grid(True, alpha=0.4)
    fig.tight_layout()
    png_path = os.path.join(outdir, f"notional_{kind}_{cpr_form}.png")
    fig.savefig(png_path, **_SAVE_KW)
    plt.close(fig)
    return [csv_path, cpr_path, png_path]


def _build_strategies(sc, paths, np_set):
    strike, model = sc.mortgage.rate, sc.model
    m = np_set.maturity_index
    return {
        "linear": build_linear_hedge(np_set, strike),
        "diag9": build_swaption_portfolio(np_set, strike, calibrate_diagonal(np_set)),
        "single-5y5y": build_swaption_portfolio(
            np_set, strike, calibrate_numeric(np_set, [(m // 2, m)])),
        "full": build_swaption_portfolio(
            np_set, strike, calibrate_numeric(np_set, full_grid_cells(m), model, paths, strike)),
    }


def report_hedge(outdir: str, kind: str = BULLET, cpr_form: str = "sigmoid",
                 n_paths: int = 5_000, seed: int = 3) -> list[str]:
    """Hedge comparison: error-through-time profiles and the swaption cost table."""
    sc = standard_scenario(kind, cpr_form, n_paths=n_paths, seed=seed)
    paths = sc.simulate_paths()
    np_set = simulate_notional(sc, paths)
    strategies = _build_strategies(sc, paths, np_set)
    profiles = {name: hedge_error_profile(sc, pf, paths, np_set) * 1e4
                for name, pf in strategies.items()}

    times = list(range(np_set.maturity_index))
    rows = [[t] + [f"{profiles[n][t]:.4f}" for n in strategies] for t in times]
    err_path = _write_csv(os.path.join(outdir, f"hedge_error_{kind}_{cpr_form}.csv"),
                          ["time_years"] + [f"abs_error_bps_{n}" for n in strategies], rows)

    cost_rows = []
    for name, pf in strategies.items():
        priced = price_portfolio(pf, sc.model)
        for (i, l), cost in sorted(priced.swaption_costs.items()):
            cost_rows.append([name, f"{i}Y-{l - i}Y", f"{pf.swaptions.weights[(i, l)]:.6f}",
                              f"{cost * 1e4:.4f}"])
        cost_rows.append([name, "total", "", f"{priced.total_swaption_cost * 1e4:.4f}"])
    cost_path = _write_csv(os.path.join(outdir, f"hedge_costs_{kind}_{cpr_form}.csv"),
                           ["strategy", "swaption", "weight", "cost_bps"], cost_rows)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name in strategies:
        ax.plot(times, profiles[name], marker="o", ms=3, label=name)
    ax.set_xlabel("years")
    ax.set_ylabel("|value error| (bps of notional)")
    ax.set_title(f"Static hedge error through time, {kind} / {cpr_form}")
    ax.legend()
    ax.grid(True, alpha=0.4)
    fig.tight_layout()
    png_path = os.path.join(outdir, f"hedge_error_{kind}_{cpr_form}.png")
    fig.savefig(png_path, **_SAVE_KW)
    plt.close(fig)
    return [err_path, cost_path, png_path]


def report_greeks(outdir: str, kind: str = BULLET, cpr_form: str = "sigmoid",
                  n_paths: int = 20_000, seed: int = 11) -> list[str]:
    """Spine-rate Delta/Gamma and calibration-vol Vega of the swap and its hedges."""
    from .fixtures import reference_curve, reference_vol_quotes

    sc = standard_scenario(kind, cpr_form, n_paths=n_paths, seed=seed)
    paths = sc.simulate_paths()
    np_set = simulate_notional(sc, paths)
    quotes = REFERENCE_CURVE_QUOTES
    curve = reference_curve()
    linear = build_linear_hedge(np_set, sc.mortgage.rate)
    nonlin = build_swaption_portfolio(np_set, sc.mortgage.rate, calibrate_diagonal(np_set))

    targets = {
        "ias": (ias_valuation(sc), ias_vega_valuation(sc, curve)),
        "linear": (portfolio_valuation(linear, sc.model),
                   portfolio_vega_valuation(linear, curve)),
        "diag9": (portfolio_valuation(nonlin, sc.model),
                  portfolio_vega_valuation(nonlin, curve)),
    }
    deltas, gammas, vegas = {}, {}, {}
    for name, (val, vega_val) in targets.items():
        deltas[name] = delta_profile(val, quotes)
        gammas[name] = gamma_profile(val, quotes)
        vegas[name] = vega_profile(vega_val, reference_vol_quotes())

    files = []
    bucket_labels = deltas["ias"].labels
    rows = []
    for i, lbl in enumerate(bucket_labels):
        for name in targets:
            rows.append([name, lbl, f"{deltas[name].values[i]:.6f}",
                         f"{gammas[name].values[i]:.4f}",
                         f"{deltas[name].stderrs[i]:.6f}", f"{gammas[name].stderrs[i]:.4f}"])
    files.append(_write_csv(os.path.join(outdir, f"greeks_rates_{kind}_{cpr_form}.csv"),
                            ["target", "bucket", "delta_per_unit_rate", "gamma_per_unit_rate2",
                             "delta_stderr", "gamma_stderr"], rows))
    vrows = []
    for i, lbl in enumerate(vegas["ias"].labels):
        for name in targets:
            vrows.append([name, lbl, f"{vegas[name].values[i]:.6f}",
                          f"{vegas[name].stderrs[i]:.6f}"])
    files.append(_write_csv(os.path.join(outdir, f"greeks_vols_{kind}_{cpr_form}.csv"),
                            ["target", "bucket", "vega_per_unit_vol", "vega_stderr"], vrows))

    fig, axes = plt.subplots(1, 3, figsize=(13, 4.2))
    x = np.arange(len(bucket_labels))
    width = 0.27
    for pane, (title, series) in zip(axes, [("Delta", deltas), ("Gamma", gammas)]):
        for off, name in zip((-width, 0, width), targets):
            pane.bar(x + off, series[name].values, width, label=name)
        pane.set_xticks(x)
        pane.set_xticklabels(bucket_labels, rotation=60, fontsize=7)
        pane.set_title(f"{title} per spine rate")
        pane.grid(True, axis="y", alpha=0.4)
    xv = np.arange(len(vegas["ias"].labels))
    for off, name in zip((-width, 0, width), targets):
        axes[2].bar(xv + off, vegas[name].values, width, label=name)
    axes[2].set_xticks(xv)
    axes[2].set_xticklabels(vegas["ias"].labels, rotation=60, fontsize=7)
    axes[2].set_title("Vega per calibration vol")
    axes[2].grid(True, axis="y", alpha=0.4)
    axes[0].legend(fontsize=8)
    fig.suptitle(f"Sensitivities, {kind} / {cpr_form} (per unit bump, notional 1)")
    fig.tight_layout()
    png = os.path.join(outdir, f"greeks_{kind}_{cpr_form}.png")
    fig.savefig(png, **_SAVE_KW)
    plt.close(fig)
    files.append(png)
    return files


REPORT_TARGETS = {
    "table1": report_table1,
    "notional": report_notional,
    "hedge": report_hedge,
    "greeks": report_greeks,
}
