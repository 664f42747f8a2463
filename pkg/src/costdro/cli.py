"""Command-line front end: validate | optimize | backtest | sweep.

Exit codes: 0 success, 1 usage or configuration error, 2 solver non-convergence.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .ambiguity import CornerCapError, SampleSet, SupportBox, compound_support_bounds
from .backtest import BacktestConfig, run
from .costs import CostModel, CostModelError, Zero
from .market_data import IngestOptions, MarketDataError, PriceSeries, load_csv
from .projection import InfeasibleError
from .sampling import estimate_gbm, simulate_samples
from .solver import DroProblem, DroSolution, FeasibleSet, solve_path

logger = logging.getLogger("costdro")

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, header, rows) -> None:
    """CSV with floats written by repr, so re-reading gives back the same doubles."""
    lines = [",".join(header)] + [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not serializable: {type(o)}")


def _clean(obj):
    """Replace non-finite floats with None so the JSON stays standard."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


# ---------------------------------------------------------------------------
# shared setup


def _load_prices(cfg: cfgmod.RunConfig) -> PriceSeries:
    tickers = cfg.tickers
    if tickers is not None and cfg.benchmark and cfg.benchmark not in tickers:
        tickers = tuple(tickers) + (cfg.benchmark,)
    return load_csv(cfg.prices, IngestOptions(tickers=tickers, risk_free_path=cfg.risk_free))


def _risky_names(cfg, prices: PriceSeries | None, m: int) -> list[str]:
    if prices is not None:
        return [t for t in prices.tickers if t != cfg.benchmark]
    if cfg.tickers:
        return list(cfg.tickers)
    return [f"asset{i}" for i in range(m)]


def _problem_inputs(cfg: cfgmod.RunConfig):
    """Samples, box and asset names for a single solve, from a sample file or a GBM fit."""
    prices = None
    if cfg.samples:
        risky = SampleSet.from_csv(cfg.samples)
        m = risky.dimension
        names = _risky_names(cfg, None, m)
        rate = cfg.risk_free_rate
        day_count = 252
    else:
        prices = _load_prices(cfg)
        if cfg.benchmark:
            prices = prices.select([t for t in prices.tickers if t != cfg.benchmark])
        if prices.n_days < cfg.window:
            raise MarketDataError(f"need {cfg.window} price rows for the estimation window, got {prices.n_days}")
        window = prices.slice(prices.n_days - cfg.window, prices.n_days)
        params = estimate_gbm(window)
        risky = simulate_samples(params, cfg.n, cfg.n_samples, seed=cfg.seed, correlated=cfg.correlated)
        m = prices.n_assets
        names = list(prices.tickers)
        rate = float(prices.risk_free[-1])
        day_count = prices.day_count
    box = compound_support_bounds(_per_asset(cfg.step_lower, m), _per_asset(cfg.step_upper, m), cfg.n)
    risky = risky.clip_to(box)
    if cfg.include_risk_free:
        rf_n = (1.0 + rate / day_count) ** cfg.n - 1.0
        return risky.with_column(rf_n, 0), box.with_risk_free(rf_n), ["risk_free"] + names, m
    return risky, box, names, m


def _per_asset(value, m):
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    return np.full(m, arr[0]) if arr.size == 1 else arr


def _full_cost(cfg, m: int, rate=None) -> CostModel:
    risky = cfg.cost_model(m, rate)
    if not cfg.include_risk_free:
        return risky
    return CostModel([Zero(), *risky.specs], np.r_[True, risky.exempt])


def _cost_levels(cfg) -> list:
    return [None] if cfg.cost_grid is None else list(cfg.cost_grid)


def _out_dir(cfg) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _solve_grid(cfg, samples, box, m, rate):
    problem = DroProblem(samples, box, max(cfg.epsilon), _full_cost(cfg, m, rate), cfg.n, cfg.norm, cfg.v0)
    return solve_path(problem, cfg.epsilon, cfg.solver_config())


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(cfg_path, overrides, env) -> tuple[int, dict]:
    failures = []
    try:
        cfg = cfgmod.load(cfg_path, overrides, env)
    except cfgmod.ConfigError as exc:
        return EXIT_CONFIG, {"failures": [{"field": exc.field, "message": str(exc)}]}
    except FileNotFoundError as exc:
        return EXIT_CONFIG, {"failures": [{"field": "config", "message": str(exc)}]}

    m = None
    if cfg.tickers:
        m = len(cfg.tickers)
    elif cfg.samples and Path(cfg.samples).exists():
        m = SampleSet.from_csv(cfg.samples).dimension
    elif cfg.prices and Path(cfg.prices).exists():
        header = Path(cfg.prices).read_text().splitlines()[0].split(",")
        m = len([h for h in header[1:] if h != cfg.benchmark])
    for name in ("prices", "risk_free", "samples"):
        p = getattr(cfg, name)
        if p and not Path(p).exists():
            failures.append({"field": name, "message": f"file not found: {p}"})
    if m is None:
        failures.append({"field": "tickers", "message": "cannot determine the number of assets"})
        return EXIT_CONFIG, {"failures": failures}

    box = None
    try:
        box = compound_support_bounds(_per_asset(cfg.step_lower, m), _per_asset(cfg.step_upper, m), cfg.n)
    except ValueError as exc:
        failures.append({"field": "step_lower", "message": str(exc)})
    if m > cfg.corner_cap:
        failures.append(
            {"field": "tickers", "message": f"corner cap: {m} risky assets exceed the enumeration cap of {cfg.corner_cap}"}
        )
    if box is not None:
        full_box = box.with_risk_free(((1.0 + cfg.risk_free_rate / 252) ** cfg.n - 1.0)) if cfg.include_risk_free else box
        try:
            fs = FeasibleSet(full_box, _full_cost(cfg, m), cfg.v0)
            if cfg.include_risk_free:
                if fs.survivability(np.eye(full_box.dimension)[0]) < fs.margin:
                    failures.append({"field": "risk_free_rate", "message": "all-risk-free portfolio fails the survivability margin"})
            elif fs.is_empty():
                failures.append({"field": "step_lower", "message": "no portfolio meets the survivability margin"})
        except (CostModelError, cfgmod.ConfigError) as exc:
            failures.append({"field": "cost", "message": str(exc)})
        if cfg.samples and Path(cfg.samples).exists():
            s = SampleSet.from_csv(cfg.samples)
            if s.dimension != m:
                failures.append({"field": "samples", "message": f"sample dimension {s.dimension} != {m} assets"})
            else:
                outside = int(np.count_nonzero(~box.contains(s.samples)))
                if outside > 0.05 * s.size:
                    failures.append({"field": "samples", "message": f"{outside} of {s.size} samples lie outside the support box"})
    return (EXIT_OK if not failures else EXIT_CONFIG), {"failures": failures, "assets": m}


def cmd_optimize(cfg) -> int:
    samples, box, names, m = _problem_inputs(cfg)
    sols = _solve_grid(cfg, samples, box, m, None)
    out = _out_dir(cfg)
    write_json(out / "solution.json", _clean({"tickers": names, "solutions": [s.to_dict() for s in sols]}))
    write_csv(
        out / "weights.csv",
        ["epsilon", "objective", "converged", *names],
        [[s.epsilon, s.objective, s.converged, *s.w] for s in sols],
    )
    return _exit_for(sols)


def cmd_sweep(cfg) -> int:
    """Radius x cost-level grid of optimal weights on one sample set."""
    samples, box, names, m = _problem_inputs(cfg)
    rows, records, all_sols = [], [], []
    for rate in _cost_levels(cfg):
        sols = _solve_grid(cfg, samples, box, m, rate)
        all_sols += sols
        label = "config" if rate is None else rate
        for s in sols:
            rows.append([label, s.epsilon, s.objective, s.converged, *s.w])
            records.append({"cost": label, **s.to_dict()})
    out = _out_dir(cfg)
    write_csv(out / "sweep_weights.csv", ["cost", "epsilon", "objective", "converged", *names], rows)
    write_json(out / "sweep.json", _clean({"tickers": names, "cells": records}))
    return _exit_for(all_sols)


def cmd_backtest(cfg) -> int:
    if not cfg.prices:
        raise cfgmod.ConfigError("prices", "backtest needs a price file")
    prices = _load_prices(cfg)
    m = prices.n_assets - (1 if cfg.benchmark else 0)
    traj, weights, table, report = [], [], [], {}
    flagged = False
    for rate in _cost_levels(cfg):
        bcfg = BacktestConfig(
            window=cfg.window,
            n=cfg.n,
            epsilons=cfg.epsilon,
            cost=cfg.cost_model(m, rate),
            v0=cfg.v0,
            seed=cfg.seed,
            norm_kind=cfg.norm,
            step_lower=cfg.step_lower,
            step_upper=cfg.step_upper,
            n_samples=cfg.n_samples,
            include_risk_free=cfg.include_risk_free,
            correlated=cfg.correlated,
            benchmark=cfg.benchmark,
            solver=cfg.solver_config(),
        )
        results = run(prices, bcfg)
        label = "config" if rate is None else rate
        for e in cfg.epsilon:
            res = results[e]
            p = res.path
            for k, (d, v) in enumerate(zip(p.timestamps, p.values)):
                row = [d, label, e, v]
                if p.benchmark is not None:
                    row.append(p.benchmark[k])
                traj.append(row)
            for d, w, c, f in zip(p.rebalance_dates, p.weights, p.costs, p.flags):
                weights.append([d, label, e, c, f or "ok", *w])
                flagged |= bool(f)
            r = res.report
            table.append([label, e, r.cr, r.wealth_ratio, r.std, r.sr, r.mdd])
            report[f"cost={label},epsilon={e!r}"] = r.to_dict()
        names = p.asset_names
    out = _out_dir(cfg)
    traj_header = ["date", "cost", "epsilon", "value"] + (["benchmark"] if cfg.benchmark else [])
    write_csv(out / "trajectories.csv", traj_header, traj)
    write_csv(out / "rebalance_weights.csv", ["date", "cost", "epsilon", "cost_paid", "status", *names], weights)
    write_csv(out / "metrics.csv", ["cost", "epsilon", "CR", "wealth_ratio", "STD", "SR", "MDD"], table)
    write_json(out / "metrics.json", _clean(report))
    return EXIT_NONCONVERGED if flagged else EXIT_OK


def _exit_for(sols: list[DroSolution]) -> int:
    bad = [s.epsilon for s in sols if not s.converged]
    if bad:
        print(f"solver did not converge for epsilon {bad}", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="costdro", description="Cost-aware robust log-optimal portfolios.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in [
        ("validate", "dry-run checks on a config"),
        ("optimize", "solve over the epsilon grid"),
        ("backtest", "sliding-window backtest over epsilon and cost grids"),
        ("sweep", "optimal weights over the epsilon x cost grid"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="JSON run configuration")
        p.add_argument("--prices")
        p.add_argument("--samples")
        p.add_argument("--tickers", nargs="+")
        p.add_argument("--epsilon", nargs="+", type=float)
        p.add_argument("--cost-grid", nargs="+", type=float, dest="cost_grid")
        p.add_argument("--window", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--n-samples", type=int, dest="n_samples")
        p.add_argument("--seed", type=int)
        p.add_argument("--norm")
        p.add_argument("--max-iter", type=int, dest="max_iter")
        p.add_argument("--output-dir", dest="output_dir")
    return parser


def _overrides(args) -> dict:
    keys = ["prices", "samples", "tickers", "epsilon", "cost_grid", "window", "n", "n_samples", "seed", "max_iter", "output_dir"]
    out = {k: getattr(args, k) for k in keys}
    if args.norm is not None:
        out["norm"] = math.inf if args.norm == "inf" else float(args.norm)
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    env = dict(os.environ)
    if args.command == "validate":
        code, report = cmd_validate(args.config, _overrides(args), env)
        print(json.dumps(report, indent=2, sort_keys=True))
        return code
    try:
        cfg = cfgmod.load(args.config, _overrides(args), env)
        return {"optimize": cmd_optimize, "sweep": cmd_sweep, "backtest": cmd_backtest}[args.command](cfg)
    except (cfgmod.ConfigError, MarketDataError, CostModelError, CornerCapError, InfeasibleError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
