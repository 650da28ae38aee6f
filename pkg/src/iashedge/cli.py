"""Command-line entry point.

Subcommands: bootstrap | calibrate | schedule | cpr-fit | price | hedge |
greeks | report. Options come from an optional flat-key JSON config file
(for example {"mortgage.kind": "bullet", "seed": 7}) with command-line flags
taking precedence. Every run writes its artifacts plus a manifest (input
digests, effective options, output digests) into the output directory, so
identical configurations produce byte-identical results. The output
directory defaults to ./out, overridable with --outdir or IASHEDGE_OUTDIR.

Exit codes: 0 success, 2 input/configuration error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .curve import CurveInputError, CurveNumericalError, bootstrap
from .fixtures import DEFAULT_LAMBDA_MAX, DEFAULT_LOGISTIC_ALPHA
from .greeks import (delta_profile, gamma_profile, vega_profile, ias_valuation,
                     ias_vega_valuation, portfolio_valuation, portfolio_vega_valuation)
from .hedge import (build_linear_hedge, build_swaption_portfolio, calibrate_diagonal,
                    calibrate_numeric, diagonal_cells, full_grid_cells, hedge_error_profile,
                    price_portfolio)
from .ias import (IasScenario, atm_mortgage_rate, price_ias_mc, simulate_notional)
from .greeks import gamma_calibrated_grids
from .hedge import HedgePortfolio
from .marketdata import (MarketDataError, counterdiagonal_quotes, read_curve_csv,
                         read_loans_csv, read_vol_matrix_csv)
from .mortgage import MortgageSpec, constant_cpr_schedule
from .prepayment import (ConstantCpr, CprFitError, IncentiveModel, LogisticCpr, RationalCpr,
                         bin_and_fit)
from .shortrate import (CalibrationError, HullWhiteModel, SwaptionNumericalError,
                        calibrate_hull_white)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

_INPUT_ERRORS = (CurveInputError, MarketDataError, CprFitError, FileNotFoundError,
                 ValueError, KeyError)
_NUMERICAL_ERRORS = (CurveNumericalError, SwaptionNumericalError, CalibrationError,
                     FloatingPointError, np.linalg.LinAlgError)


class ConfigError(ValueError):
    pass


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    if not os.path.exists(path):
        raise FileNotFoundError(f"config file not found: {path}")
    with open(path) as handle:
        cfg = json.load(handle)
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a flat JSON object")
    return cfg


def _opt(args, cfg: dict, key: str, default=None, required: bool = False):
    """Flag value if given, else config value under the flat key, else default."""
    flag = key.replace(".", "_").replace("-", "_")
    value = getattr(args, flag, None)
    if value is None:
        value = cfg.get(key, default)
    if value is None and required:
        raise ConfigError(f"missing required option {key!r} (flag --{key.replace('.', '-')})")
    return value


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(outdir: str, command: str, options: dict, inputs: list[str],
                    outputs: list[str]) -> str:
    manifest = {
        "command": command,
        "version": __version__,
        "options": {k: options[k] for k in sorted(options)},
        "input_digests": {os.path.basename(p): _sha256(p) for p in sorted(set(inputs))},
        "output_digests": {os.path.basename(p): _sha256(p) for p in sorted(set(outputs))},
    }
    path = os.path.join(outdir, f"manifest_{command.replace('-', '_')}.json")
    with open(path, "w") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def _write_json(path: str, payload: dict) -> str:
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def _outdir(args, cfg) -> str:
    outdir = _opt(args, cfg, "outdir") or os.environ.get("IASHEDGE_OUTDIR", "out")
    os.makedirs(outdir, exist_ok=True)
    return outdir


def _curve_from(args, cfg):
    path = _opt(args, cfg, "curve", required=True)
    return read_curve_csv(path), path


def _mortgage_from(args, cfg, curve) -> MortgageSpec:
    kind = _opt(args, cfg, "mortgage.kind", "bullet")
    maturity = int(_opt(args, cfg, "mortgage.maturity-years", 10))
    notional = float(_opt(args, cfg, "mortgage.notional", 1.0))
    rate_opt = _opt(args, cfg, "mortgage.rate", "atm")
    if isinstance(rate_opt, str) and rate_opt.lower() == "atm":
        rate = atm_mortgage_rate(curve, kind, maturity, notional)
    else:
        rate = float(rate_opt)
    return MortgageSpec(kind, notional, rate, maturity)


def _cpr_model_from(args, cfg):
    form = str(_opt(args, cfg, "cpr.form", "rational")).lower()
    if form == "constant":
        return ConstantCpr(float(_opt(args, cfg, "cpr.lambda", 0.0)))
    if form == "rational":
        return RationalCpr(float(_opt(args, cfg, "cpr.lambda-max", DEFAULT_LAMBDA_MAX)),
                           float(_opt(args, cfg, "cpr.epsilon-star", 0.0)))
    if form in ("logistic", "sigmoid"):
        alpha = _opt(args, cfg, "cpr.alpha", list(DEFAULT_LOGISTIC_ALPHA))
        if isinstance(alpha, str):
            alpha = [float(v) for v in alpha.split(",")]
        return LogisticCpr(*alpha)
    raise ConfigError(f"unknown cpr.form {form!r}")


def _model_from(args, cfg, curve) -> HullWhiteModel:
    lam = _opt(args, cfg, "model.mean-reversion")
    eta = _opt(args, cfg, "model.vol")
    if lam is not None and eta is not None:
        return HullWhiteModel(curve, float(lam), float(eta))
    vols_path = _opt(args, cfg, "vols", required=True)
    matrix = read_vol_matrix_csv(vols_path)
    quotes = counterdiagonal_quotes(matrix)
    return calibrate_hull_white(curve, quotes).model


def _scenario_from(args, cfg, require_zero_zeta: bool = False):
    quotes, curve_path = _curve_from(args, cfg)
    curve = bootstrap(quotes)
    spec = _mortgage_from(args, cfg, curve)
    zeta = float(_opt(args, cfg, "zeta", 0.0))
    if require_zero_zeta and zeta != 0.0:
        raise ConfigError("hedging runs with zeta = 0; remove the configured spread")
    seed = _opt(args, cfg, "seed", required=True)
    scenario = IasScenario(
        mortgage=spec,
        cpr_model=_cpr_model_from(args, cfg),
        model=_model_from(args, cfg, curve),
        incentive=IncentiveModel(zeta),
        n_paths=int(_opt(args, cfg, "n-paths", 100_000)),
        seed=int(seed),
    )
    inputs = [curve_path]
    if _opt(args, cfg, "vols") is not None:
        inputs.append(_opt(args, cfg, "vols"))
    return scenario, inputs


def _scenario_digest(scenario: IasScenario) -> str:
    spec = scenario.mortgage
    blob = json.dumps({
        "kind": spec.kind, "notional": spec.notional_0, "rate": spec.rate,
        "maturity": spec.maturity_years, "cpr": repr(scenario.cpr_model),
        "zeta": scenario.incentive.zeta, "n_paths": scenario.n_paths,
        "seed": scenario.seed,
        "model": [scenario.model.mean_reversion, scenario.model.vol],
    }, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# -- subcommands -------------------------------------------------------------------


def _cmd_bootstrap(args, cfg) -> int:
    outdir = _outdir(args, cfg)
    quotes, curve_path = _curve_from(args, cfg)
    curve = bootstrap(quotes)
    rows = [{"time_years": float(t), "discount_factor": float(d)}
            for t, d in zip(curve.pillar_times, curve.discount_factors)]
    out = _write_json(os.path.join(outdir, "curve.json"), {
        "pillars": rows,
        "units": "discount factors (dimensionless), times in years",
    })
    _write_manifest(outdir, "bootstrap", {"curve": curve_path}, [curve_path], [out])
    print(f"bootstrapped {len(rows)} pillars -> {out}")
    return EXIT_OK


def _cmd_calibrate(args, cfg) -> int:
    outdir = _outdir(args, cfg)
    quotes, curve_path = _curve_from(args, cfg)
    curve = bootstrap(quotes)
    vols_path = _opt(args, cfg, "vols", required=True)
    instruments = _opt(args, cfg, "instruments", "counterdiag10y")
    if instruments != "counterdiag10y":
        raise ConfigError(f"unknown instrument set {instruments!r}")
    matrix = read_vol_matrix_csv(vols_path)
    swq = counterdiagonal_quotes(matrix)
    result = calibrate_hull_white(curve, swq)
    out = _write_json(os.path.join(outdir, "calibration.json"), {
        "mean_reversion": result.model.mean_reversion,
        "vol": result.model.vol,
        "objective_vol2": result.objective,
        "iterations": result.n_iterations,
        "instruments": [
            {"expiry_years": q.expiry_years, "tenor_years": q.tenor_years,
             "market_vol_bps": q.normal_vol * 1e4, "fitted_vol_bps": float(v * 1e4)}
            for q, v in zip(swq, result.fitted_vols)
        ],
        "units": "vols in bps per sqrt-year; parameters per year",
    })
    _write_manifest(outdir, "calibrate",
                    {"curve": curve_path, "vols": vols_path, "instruments": instruments},
                    [curve_path, vols_path], [out])
    print(f"calibrated mean_reversion={result.model.mean_reversion:.6f} "
          f"vol={result.model.vol:.6f} -> {out}")
    return EXIT_OK


def _cmd_schedule(args, cfg) -> int:
    outdir = _outdir(args, cfg)
    quotes, curve_path = (None, None)
    rate_opt = _opt(args, cfg, "mortgage.rate", required=True)
    if isinstance(rate_opt, str) and rate_opt.lower() == "atm":
        quotes, curve_path = _curve_from(args, cfg)
        curve = bootstrap(quotes)
        spec = _mortgage_from(args, cfg, curve)
    else:
        spec = MortgageSpec(
            _opt(args, cfg, "mortgage.kind", "bullet"),
            float(_opt(args, cfg, "mortgage.notional", 1.0)),
            float(rate_opt),
            int(_opt(args, cfg, "mortgage.maturity-years", 10)),
        )
    cpr = float(_opt(args, cfg, "cpr.lambda", 0.0))
    rows = constant_cpr_schedule(spec, cpr)
    out = os.path.join(outdir, "schedule.csv")
    import csv as _csv
    with open(out, "w", newline="") as handle:
        writer = _csv.writer(handle)
        writer.writerow(["time_years", "notional_before_ccy", "interest_ccy", "repayment_ccy",
                         "prepayment_ccy", "installment_ccy"])
        for r in rows:
            writer.writerow([f"{r.time:.0f}", f"{r.notional_before:.10f}", f"{r.interest:.10f}",
                             f"{r.repayment:.10f}", f"{r.prepayment:.10f}",
                             f"{r.installment:.10f}"])
    _write_manifest(outdir, "schedule",
                    {"kind": spec.kind, "rate": spec.rate, "cpr": cpr,
                     "maturity_years": spec.maturity_years},
                    [curve_path] if curve_path else [], [out])
    print(f"schedule ({spec.kind}, {spec.maturity_years}y, cpr={cpr}) -> {out}")
    return EXIT_OK


def _cmd_cpr_fit(args, cfg) -> int:
    outdir = _outdir(args, cfg)
    loans_path = _opt(args, cfg, "loans", required=True)
    n_bins = int(_opt(args, cfg, "bins", 56))
    rng = str(_opt(args, cfg, "range", "-0.015:0.04"))
    lo, hi = (float(v) for v in rng.split(":"))
    observations = read_loans_csv(loans_path)
    binned, model, residuals = bin_and_fit(observations, n_bins=n_bins, bin_range=(lo, hi))
    out = _write_json(os.path.join(outdir, "cpr_fit.json"), {
        "alpha": list(model.alpha),
        "bins": [
            {"center": float(c), "cpr": None if np.isnan(v) else float(v), "count": int(n)}
            for c, v, n in zip(binned.centers, binned.cpr_per_bin, binned.counts)
        ],
        "residuals": [None if np.isnan(r) else float(r) for r in residuals],
        "observations_dropped": binned.n_dropped,
        "units": "cpr as decimal annual rates; incentive centers as decimals",
    })
    _write_manifest(outdir, "cpr-fit",
                    {"loans": loans_path, "bins": n_bins, "range": rng},
                    [loans_path], [out])
    print(f"fitted alpha = {tuple(round(a, 6) for a in model.alpha)} -> {out}")
    return EXIT_OK


def _cmd_price(args, cfg) -> int:
    outdir = _outdir(args, cfg)
    scenario, inputs = _scenario_from(args, cfg)
    price = price_ias_mc(scenario)
    payload = {
        "value_bps": price.value / scenario.mortgage.notional_0 * 1e4,
        "stderr_bps": price.stderr / scenario.mortgage.notional_0 * 1e4,
        "n_paths": price.n_paths,
        "seed": price.seed,
        "scenario_digest": _scenario_digest(scenario),
        "rate_bps": scenario.mortgage.rate * 1e4,
        "units": "bps of initial notional",
    }
    out = _write_json(os.path.join(outdir, "price.json"), payload)
    outputs = [out]
    if _opt(args, cfg, "export-notional", False):
        paths = scenario.simulate_paths()
        np_set = simulate_notional(scenario, paths)
        npath_out = os.path.join(outdir, "notional_paths.csv")
        header = ",".join(f"t{int(t)}" for t in np_set.grid_times)
        np.savetxt(npath_out, np_set.notional, delimiter=",", header=header, comments="")
        outputs.append(npath_out)
    _write_manifest(outdir, "price", {
        "seed": scenario.seed, "n_paths": scenario.n_paths,
        "digest": payload["scenario_digest"],
    }, inputs, outputs)
    print(f"IAS value {payload['value_bps']:+.2f} bps "
          f"(stderr {payload['stderr_bps']:.2f}) -> {out}")
    return EXIT_OK


_STRATEGIES = ("linear", "diag9", "single-5y5y", "full", "gamma", "avg")


def _cmd_hedge(args, cfg) -> int:
    outdir = _outdir(args, cfg)
    strategy = _opt(args, cfg, "strategy", "diag9")
    if strategy not in _STRATEGIES:
        raise ConfigError(f"strategy must be one of {_STRATEGIES}")
    scenario, inputs = _scenario_from(args, cfg, require_zero_zeta=True)
    paths = scenario.simulate_paths()
    np_set = simulate_notional(scenario, paths)
    strike, model = scenario.mortgage.rate, scenario.model
    m = np_set.maturity_index

    if strategy == "linear":
        portfolio = build_linear_hedge(np_set, strike)
    elif strategy == "diag9":
        portfolio = build_swaption_portfolio(np_set, strike, calibrate_diagonal(np_set))
    elif strategy == "single-5y5y":
        portfolio = build_swaption_portfolio(
            np_set, strike, calibrate_numeric(np_set, [(m // 2, m)]))
    elif strategy == "full":
        portfolio = build_swaption_portfolio(
            np_set, strike, calibrate_numeric(np_set, full_grid_cells(m), model, paths, strike))
    else:  # gamma or avg
        value_pf = build_swaption_portfolio(np_set, strike, calibrate_diagonal(np_set))
        gamma_grid, avg_grid = gamma_calibrated_grids(
            scenario, value_pf, read_curve_csv(inputs[0]))
        grid = gamma_grid if strategy == "gamma" else avg_grid
        portfolio = HedgePortfolio(strike, value_pf.ladder_notional, grid)

    priced = price_portfolio(portfolio, model)
    notional_0 = scenario.mortgage.notional_0
    weights_payload = [
        {"swaption": f"{i}Y-{l - i}Y", "start": i, "end": l,
         "weight": w, "cost_bps": priced.swaption_costs[(i, l)] / notional_0 * 1e4}
        for (i, l), w in sorted(portfolio.swaptions.weights.items())
    ]
    out_json = _write_json(os.path.join(outdir, f"hedge_{strategy}.json"), {
        "strategy": strategy,
        "strike_bps": strike * 1e4,
        "ladder_notional": [float(v) for v in portfolio.ladder_notional],
        "swaptions": weights_payload,
        "total_swaption_cost_bps": priced.total_swaption_cost / notional_0 * 1e4,
        "portfolio_value_bps": priced.value / notional_0 * 1e4,
        "units": "bps of initial notional; weights in units of notional",
    })
    errors = hedge_error_profile(scenario, portfolio, paths, np_set)
    err_out = os.path.join(outdir, f"hedge_error_{strategy}.csv")
    import csv as _csv
    with open(err_out, "w", newline="") as handle:
        writer = _csv.writer(handle)
        writer.writerow(["time_years", "abs_error_bps"])
        for k, e in enumerate(errors):
            writer.writerow([k, f"{e / notional_0 * 1e4:.6f}"])
    _write_manifest(outdir, "hedge", {
        "strategy": strategy, "seed": scenario.seed, "n_paths": scenario.n_paths,
        "digest": _scenario_digest(scenario),
    }, inputs, [out_json, err_out])
    print(f"{strategy}: portfolio value {priced.value / notional_0 * 1e4:+.2f} bps, "
          f"swaption cost {priced.total_swaption_cost / notional_0 * 1e4:.2f} bps -> {out_json}")
    return EXIT_OK


def _cmd_greeks(args, cfg) -> int:
    outdir = _outdir(args, cfg)
    target = _opt(args, cfg, "target", "ias")
    if target not in ("ias", "linear", "diag9"):
        raise ConfigError("target must be ias, linear or diag9")
    scenario, inputs = _scenario_from(args, cfg)
    quotes = read_curve_csv(inputs[0])
    curve = scenario.model.curve
    h = float(_opt(args, cfg, "bump", 1e-4))

    vols_path = _opt(args, cfg, "vols", required=True)
    vol_quotes = counterdiagonal_quotes(read_vol_matrix_csv(vols_path))
    if target == "ias":
        valuation = ias_valuation(scenario)
        vega_valuation = ias_vega_valuation(scenario, curve)
    else:
        paths = scenario.simulate_paths()
        np_set = simulate_notional(scenario, paths)
        if target == "linear":
            pf = build_linear_hedge(np_set, scenario.mortgage.rate)
        else:
            pf = build_swaption_portfolio(np_set, scenario.mortgage.rate,
                                          calibrate_diagonal(np_set))
        valuation = portfolio_valuation(pf, scenario.model)
        vega_valuation = portfolio_vega_valuation(pf, curve)

    deltas = delta_profile(valuation, quotes, h=h)
    gammas = gamma_profile(valuation, quotes, h=h)
    vegas = vega_profile(vega_valuation, vol_quotes, h=h)

    notional_mm = scenario.mortgage.notional_0 / 1e6  # values quoted per 1MM notional
    out = os.path.join(outdir, f"greeks_{target}.csv")
    import csv as _csv
    with open(out, "w", newline="") as handle:
        writer = _csv.writer(handle)
        writer.writerow(["bucket", "delta_per_bp_per_1mm", "gamma_per_bp2_per_1mm",
                         "vega_per_bp_per_1mm", "delta_stderr", "gamma_stderr", "vega_stderr"])
        vega_by_label = dict(zip(vegas.labels, zip(vegas.values, vegas.stderrs)))
        for i, lbl in enumerate(deltas.labels):
            writer.writerow([lbl,
                             f"{deltas.values[i] * 1e-4 / notional_mm:.8f}",
                             f"{gammas.values[i] * 1e-8 / notional_mm:.8f}",
                             "", f"{deltas.stderrs[i] * 1e-4 / notional_mm:.8f}",
                             f"{gammas.stderrs[i] * 1e-8 / notional_mm:.8f}", ""])
        for lbl, (v, se) in vega_by_label.items():
            writer.writerow([f"vol:{lbl}", "", "", f"{v * 1e-4 / notional_mm:.8f}",
                             "", "", f"{se * 1e-4 / notional_mm:.8f}"])
    _write_manifest(outdir, "greeks", {
        "target": target, "seed": scenario.seed, "n_paths": scenario.n_paths, "bump": h,
    }, inputs + [vols_path], [out])
    print(f"greeks for {target} -> {out}")
    return EXIT_OK


def _cmd_report(args, cfg) -> int:
    from .report import REPORT_TARGETS

    outdir = _outdir(args, cfg)
    target = _opt(args, cfg, "target", required=True)
    names = list(REPORT_TARGETS) if target == "all" else [target]
    seed = int(_opt(args, cfg, "seed", 1))
    written = []
    for name in names:
        if name not in REPORT_TARGETS:
            raise ConfigError(f"unknown report target {name!r}; "
                              f"choose from {sorted(REPORT_TARGETS)} or 'all'")
        kwargs = {"seed": seed}
        n_paths = _opt(args, cfg, "n-paths")
        if n_paths is not None:
            kwargs["n_paths"] = int(n_paths)
        written.extend(REPORT_TARGETS[name](outdir, **kwargs))
    _write_manifest(outdir, "report", {"target": target, "seed": seed}, [], written)
    print("report files:")
    for path in written:
        print(f"  {path}")
    return EXIT_OK


_COMMANDS = {
    "bootstrap": _cmd_bootstrap,
    "calibrate": _cmd_calibrate,
    "schedule": _cmd_schedule,
    "cpr-fit": _cmd_cpr_fit,
    "price": _cmd_price,
    "hedge": _cmd_hedge,
    "greeks": _cmd_greeks,
    "report": _cmd_report,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iashedge", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat-key JSON config file")
        p.add_argument("--outdir", help="output directory (default ./out or IASHEDGE_OUTDIR)")

    p = sub.add_parser("bootstrap", help="bootstrap a discount curve from par swap quotes")
    common(p)
    p.add_argument("--curve", help="par quote CSV")

    p = sub.add_parser("calibrate", help="fit Hull-White parameters to swaption vols")
    common(p)
    p.add_argument("--curve")
    p.add_argument("--vols", help="vol matrix CSV")
    p.add_argument("--instruments", help="calibration set (counterdiag10y)")

    p = sub.add_parser("schedule", help="mortgage cash-flow schedule under constant prepayment")
    common(p)
    p.add_argument("--curve")
    p.add_argument("--mortgage-kind", dest="mortgage_kind")
    p.add_argument("--mortgage-rate", dest="mortgage_rate")
    p.add_argument("--mortgage-maturity-years", dest="mortgage_maturity_years")
    p.add_argument("--mortgage-notional", dest="mortgage_notional")
    p.add_argument("--cpr-lambda", dest="cpr_lambda")

    p = sub.add_parser("cpr-fit", help="bin a loan tape and fit the prepayment S-curve")
    common(p)
    p.add_argument("--loans")
    p.add_argument("--bins")
    p.add_argument("--range", help="incentive range lo:hi (decimals)")

    for name, extra in (("price", ("--export-notional",)),
                        ("hedge", ("--strategy",)),
                        ("greeks", ("--target", "--bump"))):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--curve")
        p.add_argument("--vols")
        p.add_argument("--seed")
        p.add_argument("--n-paths", dest="n_paths")
        p.add_argument("--zeta")
        p.add_argument("--mortgage-kind", dest="mortgage_kind")
        p.add_argument("--mortgage-rate", dest="mortgage_rate")
        p.add_argument("--mortgage-maturity-years", dest="mortgage_maturity_years")
        p.add_argument("--mortgage-notional", dest="mortgage_notional")
        p.add_argument("--cpr-form", dest="cpr_form")
        p.add_argument("--cpr-lambda", dest="cpr_lambda")
        p.add_argument("--cpr-lambda-max", dest="cpr_lambda_max")
        p.add_argument("--cpr-epsilon-star", dest="cpr_epsilon_star")
        p.add_argument("--cpr-alpha", dest="cpr_alpha")
        p.add_argument("--model-mean-reversion", dest="model_mean_reversion")
        p.add_argument("--model-vol", dest="model_vol")
        for flag in extra:
            if flag == "--export-notional":
                p.add_argument(flag, dest="export_notional", action="store_true", default=None)
            else:
                p.add_argument(flag)

    p = sub.add_parser("report", help="tables, plot-ready CSVs and rendered figures")
    common(p)
    p.add_argument("--target", help="table1 | notional | hedge | greeks | all")
    p.add_argument("--seed")
    p.add_argument("--n-paths", dest="n_paths")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        return _COMMANDS[args.command](args, cfg)
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except _INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
