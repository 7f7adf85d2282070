"""Command-line entry point.

Subcommands: simulate, powerlaw, finetune, stats, verify. Experiments are
described by a JSON config file (positional argument or --config); the
--seed/--out/--jobs flags override the corresponding config fields. Unknown
config keys are rejected, and every run embeds its resolved config in the
output for reproducibility. All numeric output uses round-trip precision.

Exit codes: 0 success, 2 usage/config error, 3 runtime assertion failure.
"""

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis
from .dictionaries import FourierDictionary, IdentityDictionary
from .errors import InvalidParameterError, LipschitzViolationError
from .harness import (
    AbsoluteLossEnvironment,
    SignAdversaryEnvironment,
    ZeroEnvironment,
    example_comparator,
    fine_tune,
    gen_switching_series,
    load_series,
    run_game,
    zeroth_order_hold,
)
from .learners import AnytimeHaarOLR, HaarOLR, SparseCoder
from .stats import comparator_stats
from .transform import haar_analyze
from . import verification


class ConfigError(Exception):
    """Bad config file or bad flag/config combination."""


def _load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            cfg = json.load(handle)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return cfg


def _check_keys(cfg, allowed, context):
    unknown = set(cfg) - set(allowed)
    if unknown:
        raise ConfigError(
            f"unknown {context} keys: {sorted(unknown)}; allowed: {sorted(allowed)}"
        )


def _normalize_dictionary(value):
    if isinstance(value, str):
        value = {"kind": value}
    if not isinstance(value, dict):
        raise ConfigError("dictionary must be a string or an object")
    kind = value.get("kind")
    if kind == "haar":
        _check_keys(value, {"kind"}, "dictionary")
        return {"kind": "haar"}
    if kind == "identity":
        _check_keys(value, {"kind"}, "dictionary")
        return {"kind": "identity"}
    if kind == "fourier":
        _check_keys(value, {"kind", "omega", "max_order", "orders"}, "dictionary")
        out = {"kind": "fourier", "omega": float(value.get("omega", 2 * math.pi / 24))}
        if "max_order" in value:
            out["max_order"] = int(value["max_order"])
        if "orders" in value:
            out["orders"] = [int(k) for k in value["orders"]]
        return out
    raise ConfigError(f"unknown dictionary kind: {kind!r}")


def _normalize_series(value):
    if not isinstance(value, dict):
        raise ConfigError("series must be an object")
    if "path" in value:
        _check_keys(value, {"path", "column"}, "series")
        return {"path": str(value["path"]), "column": int(value.get("column", 1))}
    if value.get("generator") == "switching":
        _check_keys(value, {"generator", "horizon", "p", "q"}, "series")
        return {
            "generator": "switching",
            "horizon": int(value.get("horizon", 1 << 15)),
            "p": float(value.get("p", 0.0005)),
            "q": float(value.get("q", 0.005)),
        }
    raise ConfigError("series needs a 'path' or a known 'generator'")


def _apply_overrides(cfg, args):
    if getattr(args, "seed", None) is not None:
        cfg["seeds"] = [int(args.seed)]
    if getattr(args, "out", None) is not None:
        cfg["out"] = args.out
    cfg["seeds"] = [int(s) for s in cfg.get("seeds", [0])]
    cfg["out"] = str(cfg.get("out", "out"))
    return cfg


def _out_dir(cfg):
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _map_seeds(worker, cfg, jobs):
    """Run worker(cfg, seed) per seed; results ordered by seed index."""
    seeds = cfg["seeds"]
    if jobs <= 1 or len(seeds) <= 1:
        return [worker(cfg, seed) for seed in seeds]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(worker, cfg, seed) for seed in seeds]
        return [f.result() for f in futures]


def _dump_json(path, payload):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


# ---------------------------------------------------------------- simulate

_SIMULATE_KEYS = {
    "experiment", "horizon", "dictionary", "epsilon", "lipschitz", "seeds",
    "environment", "generator", "comparator", "anytime", "out",
}


def _resolve_simulate(cfg):
    _check_keys(cfg, _SIMULATE_KEYS, "simulate config")
    if cfg.get("experiment", "simulate") != "simulate":
        raise ConfigError(f"config is for experiment {cfg['experiment']!r}")
    if "horizon" not in cfg:
        raise ConfigError("simulate config requires 'horizon'")
    resolved = {
        "experiment": "simulate",
        "horizon": int(cfg["horizon"]),
        "dictionary": _normalize_dictionary(cfg.get("dictionary", "haar")),
        "epsilon": float(cfg.get("epsilon", 1.0)),
        "lipschitz": float(cfg.get("lipschitz", 1.0)),
        "seeds": cfg["seeds"],
        "environment": str(cfg.get("environment", "switching")),
        "anytime": bool(cfg.get("anytime", False)),
        "out": cfg["out"],
    }
    gen = cfg.get("generator", {})
    _check_keys(gen, {"p", "q"}, "generator")
    resolved["generator"] = {
        "p": float(gen.get("p", 0.0005)),
        "q": float(gen.get("q", 0.005)),
    }
    if resolved["environment"] == "comparator":
        comp = cfg.get("comparator")
        if not isinstance(comp, dict):
            raise ConfigError("comparator environment requires a 'comparator' object")
        _check_keys(comp, {"kind", "k"}, "comparator")
        resolved["comparator"] = {"kind": str(comp["kind"]), "k": int(comp["k"])}
    elif resolved["environment"] not in ("zero", "switching", "sign_adversary"):
        raise ConfigError(f"unknown environment {resolved['environment']!r}")
    if resolved["horizon"] < 1:
        raise ConfigError("horizon must be positive")
    return resolved


def _build_learner(resolved, horizon):
    dic = resolved["dictionary"]
    lipschitz = resolved["lipschitz"]
    epsilon = resolved["epsilon"]
    if dic["kind"] == "haar":
        if resolved.get("anytime"):
            return AnytimeHaarOLR(dim=1, lipschitz=lipschitz)
        if horizon & (horizon - 1):
            raise ConfigError(
                f"horizon {horizon} is not a power of two; set \"anytime\": true"
            )
        return HaarOLR(horizon.bit_length() - 1, dim=1,
                       lipschitz=lipschitz, epsilon=epsilon)
    if dic["kind"] == "identity":
        return SparseCoder(IdentityDictionary(1), dim=1,
                           lipschitz=lipschitz, epsilon=epsilon)
    max_order = dic.get("max_order")
    if max_order is None:
        raise ConfigError("fourier dictionary needs 'max_order' for simulate")
    return SparseCoder(FourierDictionary(dic["omega"], max_order), dim=1,
                       lipschitz=lipschitz, epsilon=epsilon)


def _simulate_seed(resolved, seed):
    horizon = resolved["horizon"]
    truth = None
    env_kind = resolved["environment"]
    if env_kind == "zero":
        env = ZeroEnvironment(horizon, lipschitz=resolved["lipschitz"])
    elif env_kind == "switching":
        truth = gen_switching_series(
            horizon, resolved["generator"]["p"], resolved["generator"]["q"], seed
        )
        env = AbsoluteLossEnvironment(truth)
    elif env_kind == "comparator":
        truth = example_comparator(
            resolved["comparator"]["kind"], horizon, resolved["comparator"]["k"]
        )
        env = AbsoluteLossEnvironment(truth)
    else:
        env = SignAdversaryEnvironment(lipschitz=resolved["lipschitz"])
    learner = _build_learner(resolved, horizon)
    trace = run_game(env, learner, horizon)

    zero = np.zeros((horizon, 1))
    regret_zero = np.cumsum(trace.player_losses - trace.comparator_losses(zero))
    columns = {
        "t": np.arange(1, horizon + 1),
        "x": trace.predictions[:, 0],
        "g": trace.gradients[:, 0],
        "loss": trace.player_losses,
        "cum_regret_zero": regret_zero,
    }
    summary = {"seed": seed, "total_loss": trace.total_loss(),
               "final_regret_zero": float(regret_zero[-1])}
    if truth is not None:
        regret_truth = np.cumsum(
            trace.player_losses - trace.comparator_losses(truth.reshape(-1, 1))
        )
        columns["cum_regret_truth"] = regret_truth
        summary["final_regret_truth"] = float(regret_truth[-1])
    return columns, summary


def _write_trace_csv(path, columns):
    names = list(columns)
    arrays = [columns[n] for n in names]
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(",".join(names) + "\n")
        for row in zip(*arrays):
            handle.write(",".join(
                str(int(v)) if name == "t" else repr(float(v))
                for name, v in zip(names, row)
            ) + "\n")


def cmd_simulate(cfg, jobs):
    resolved = _resolve_simulate(cfg)
    out = _out_dir(resolved)
    results = _map_seeds(_simulate_seed, resolved, jobs)
    summaries = []
    for seed, (columns, summary) in zip(resolved["seeds"], results):
        _write_trace_csv(out / f"trace_{seed}.csv", columns)
        summaries.append(summary)
    _dump_json(out / "summary.json", {"config": resolved, "results": summaries})
    print(f"simulate: wrote {len(summaries)} trace(s) to {out}")
    return 0


# ---------------------------------------------------------------- powerlaw

_POWERLAW_KEYS = {"experiment", "series", "transform", "top_k", "seeds", "out"}


def _resolve_powerlaw(cfg):
    _check_keys(cfg, _POWERLAW_KEYS, "powerlaw config")
    if cfg.get("experiment", "powerlaw") != "powerlaw":
        raise ConfigError(f"config is for experiment {cfg['experiment']!r}")
    if "series" not in cfg:
        raise ConfigError("powerlaw config requires 'series'")
    transform = str(cfg.get("transform", "haar"))
    if transform not in ("haar", "dft"):
        raise ConfigError(f"transform must be 'haar' or 'dft', got {transform!r}")
    return {
        "experiment": "powerlaw",
        "series": _normalize_series(cfg["series"]),
        "transform": transform,
        "top_k": int(cfg.get("top_k", 100)),
        "seeds": cfg["seeds"],
        "out": cfg["out"],
    }


def _series_for(series_cfg, seed):
    if "path" in series_cfg:
        return load_series(series_cfg["path"], column=series_cfg["column"])
    return gen_switching_series(
        series_cfg["horizon"], series_cfg["p"], series_cfg["q"], seed
    )


def _powerlaw_seed(resolved, seed):
    series = _series_for(resolved["series"], seed)
    if resolved["transform"] == "haar":
        mags = analysis.haar_magnitudes(series)
    else:
        mags = analysis.dft_magnitudes(series)
    fit = analysis.power_law_fit(mags, resolved["top_k"])
    return mags, fit


def cmd_powerlaw(cfg, jobs):
    resolved = _resolve_powerlaw(cfg)
    out = _out_dir(resolved)
    from_file = "path" in resolved["series"]
    if from_file:
        resolved["seeds"] = resolved["seeds"][:1]
    results = _map_seeds(_powerlaw_seed, resolved, jobs)
    report = []
    for seed, (mags, fit) in zip(resolved["seeds"], results):
        tag = "file" if from_file else str(seed)
        analysis.write_fit_data(out / f"powerlaw_{tag}.csv", mags, fit)
        analysis.write_fit_plot(out / f"powerlaw_{tag}.svg", mags, fit)
        report.append({
            "seed": None if from_file else seed,
            "alpha": fit.alpha,
            "intercept": fit.intercept,
            "residual": fit.residual,
            "in_power_law_range": bool(0.5 < fit.alpha < 1.0),
        })
        print(f"powerlaw[{tag}]: alpha = {fit.alpha!r}")
    in_range = sum(r["in_power_law_range"] for r in report)
    _dump_json(out / "report.json", {
        "config": resolved,
        "fits": report,
        "in_range": in_range,
        "total": len(report),
    })
    print(f"powerlaw: {in_range}/{len(report)} fits with alpha in (0.5, 1)")
    return 0


# ---------------------------------------------------------------- finetune

_FINETUNE_KEYS = {
    "experiment", "series", "forecaster", "dictionary", "epsilon", "lipschitz",
    "seeds", "out",
}


def _resolve_finetune(cfg):
    _check_keys(cfg, _FINETUNE_KEYS, "finetune config")
    if cfg.get("experiment", "finetune") != "finetune":
        raise ConfigError(f"config is for experiment {cfg['experiment']!r}")
    if "series" not in cfg:
        raise ConfigError("finetune config requires 'series'")
    forecaster = cfg.get("forecaster", "zoh")
    if isinstance(forecaster, str):
        if forecaster not in ("zero", "zoh"):
            raise ConfigError(f"unknown forecaster {forecaster!r}")
        forecaster = {"kind": forecaster}
    else:
        _check_keys(forecaster, {"kind", "path", "column"}, "forecaster")
        if forecaster.get("kind") != "file":
            raise ConfigError("forecaster object must have kind 'file'")
        forecaster = {
            "kind": "file",
            "path": str(forecaster["path"]),
            "column": int(forecaster.get("column", 2)),
        }
    return {
        "experiment": "finetune",
        "series": _normalize_series(cfg["series"]),
        "forecaster": forecaster,
        "dictionary": _normalize_dictionary(cfg.get("dictionary", "haar")),
        "epsilon": float(cfg.get("epsilon", 1.0)),
        "lipschitz": float(cfg.get("lipschitz", 1.0)),
        "seeds": cfg["seeds"],
        "out": cfg["out"],
    }


def _forecasts_for(forecaster, targets):
    if forecaster["kind"] == "zero":
        return np.zeros_like(targets)
    if forecaster["kind"] == "zoh":
        return zeroth_order_hold(targets)
    forecasts = load_series(forecaster["path"], column=forecaster["column"])
    if forecasts.shape != targets.shape:
        raise InvalidParameterError(
            f"forecast length {forecasts.shape[0]} does not match "
            f"series length {targets.shape[0]}"
        )
    return forecasts


def _finetune_seed(resolved, seed):
    targets = _series_for(resolved["series"], seed)
    forecasts = _forecasts_for(resolved["forecaster"], targets)
    lipschitz = resolved["lipschitz"]
    epsilon = resolved["epsilon"]
    horizon = targets.shape[0]
    baseline = float(np.abs(forecasts - targets).sum())
    rows = [{"seed": seed, "features": 0, "total_loss": baseline}]
    dic = resolved["dictionary"]
    if dic["kind"] == "haar":
        if horizon & (horizon - 1):
            raise ConfigError(f"haar finetune needs a dyadic horizon, got {horizon}")
        learner = HaarOLR(horizon.bit_length() - 1, dim=1,
                          lipschitz=lipschitz, epsilon=epsilon)
        trace = fine_tune(forecasts, learner, targets)
        rows.append({"seed": seed, "features": horizon,
                     "total_loss": trace.total_loss()})
    elif dic["kind"] == "fourier":
        orders = dic.get("orders")
        if orders is None:
            orders = [dic["max_order"]] if "max_order" in dic else [1, 2, 4]
        for order in orders:
            if order == 0:
                coder = SparseCoder(IdentityDictionary(1), dim=1,
                                    lipschitz=lipschitz, epsilon=epsilon)
                n_features = 1
            else:
                coder = SparseCoder(FourierDictionary(dic["omega"], order), dim=1,
                                    lipschitz=lipschitz, epsilon=epsilon)
                n_features = 2 * order + 1
            trace = fine_tune(forecasts, coder, targets)
            rows.append({"seed": seed, "features": n_features,
                         "total_loss": trace.total_loss()})
    else:
        raise ConfigError("finetune dictionary must be 'haar' or 'fourier'")
    return rows


def cmd_finetune(cfg, jobs):
    resolved = _resolve_finetune(cfg)
    out = _out_dir(resolved)
    results = _map_seeds(_finetune_seed, resolved, jobs)
    all_rows = [row for rows in results for row in rows]
    with open(out / "finetune.csv", "w", encoding="utf-8") as handle:
        handle.write("seed,features,total_loss\n")
        for row in all_rows:
            handle.write(f"{row['seed']},{row['features']},{row['total_loss']!r}\n")
    _dump_json(out / "report.json", {"config": resolved, "results": all_rows})
    for row in all_rows:
        print(f"finetune[seed={row['seed']}] features={row['features']}: "
              f"total loss {row['total_loss']!r}")
    return 0


# ---------------------------------------------------------------- stats

_STATS_KEYS = {"experiment", "series", "out"}


def cmd_stats(cfg, input_path):
    if input_path is not None:
        cfg = dict(cfg)
        cfg["series"] = {"path": input_path}
    _check_keys(cfg, _STATS_KEYS | {"seeds"}, "stats config")
    if "series" not in cfg:
        raise ConfigError("stats needs a series (config key or --input)")
    series_cfg = _normalize_series(cfg["series"])
    if "path" not in series_cfg:
        raise ConfigError("stats requires a series file (path)")
    series = load_series(series_cfg["path"], column=series_cfg["column"])
    st = comparator_stats(series)
    payload = {
        "series": series_cfg,
        "horizon": int(series.shape[0]),
        "max_range": st.max_range,
        "average": float(st.average[0]),
        "path_length": st.path_length,
        "norm_sum": st.norm_sum,
        "first_variability": st.first_variability,
        "energy": st.energy,
        "second_variability": st.second_variability,
        "switches": st.switches,
    }
    out = _out_dir({"out": cfg.get("out", "out")})
    _dump_json(out / "stats.json", payload)
    print(json.dumps(payload, indent=2, sort_keys=True))
    horizon = series.shape[0]
    if horizon & (horizon - 1) == 0:
        coeffs = haar_analyze(series)
        with open(out / "haar_coeffs.csv", "w", encoding="utf-8") as handle:
            handle.write("kind,scale,location,value\n")
            handle.write(f"allone,0,0,{float(coeffs.allone[0])!r}\n")
            for (j, l), vec in coeffs.wavelet_items():
                handle.write(f"wavelet,{j},{l},{float(vec[0])!r}\n")
        print(f"stats: wrote Haar coefficients to {out / 'haar_coeffs.csv'}")
    else:
        print(f"stats: horizon {horizon} not dyadic, skipping Haar coefficients")
    return 0


# ---------------------------------------------------------------- verify

def cmd_verify(fast):
    results = verification.run_all(fast=fast)
    failed = 0
    for res in results:
        tag = "PASS" if res.passed else "FAIL"
        print(f"[{tag}] {res.name}: {res.detail}")
        failed += 0 if res.passed else 1
    if failed:
        print(f"verify: {failed} suite(s) failed", file=sys.stderr)
        return 3
    print(f"verify: all {len(results)} suites passed")
    return 0


# ---------------------------------------------------------------- main

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="wavelearn",
        description="Parameter-free dynamic online learning on temporal dictionaries",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        p.add_argument("config_pos", nargs="?", metavar="CONFIG",
                       help="JSON config file")
        p.add_argument("--config", dest="config_flag", help="JSON config file")
        p.add_argument("--seed", type=int, help="override the config seed list")
        p.add_argument("--out", help="override the output directory")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel workers for seed sweeps")

    add_common(sub.add_parser("simulate", help="run games and write traces"))
    add_common(sub.add_parser("powerlaw", help="sorted-coefficient power-law fits"))
    add_common(sub.add_parser("finetune", help="forecaster fine-tuning sweeps"))
    p_stats = sub.add_parser("stats", help="dump comparator statistics for a series")
    add_common(p_stats)
    p_stats.add_argument("--input", help="series file (overrides config series)")
    p_verify = sub.add_parser("verify", help="run the lemma property suites")
    p_verify.add_argument("--fast", action="store_true",
                          help="reduced trial counts")
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.fast)
        config_path = args.config_flag or args.config_pos
        if config_path is None and args.command != "stats":
            raise ConfigError(f"{args.command} requires a config file")
        cfg = _load_config(config_path) if config_path else {}
        cfg = _apply_overrides(cfg, args)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.jobs)
        if args.command == "powerlaw":
            return cmd_powerlaw(cfg, args.jobs)
        if args.command == "finetune":
            return cmd_finetune(cfg, args.jobs)
        return cmd_stats(cfg, args.input)
    except (ConfigError, InvalidParameterError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (LipschitzViolationError, AssertionError) as exc:
        print(f"runtime assertion failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
