"""Sliding-window rebalancing backtest and path performance metrics."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .ambiguity import CornerCapError, SupportBox, compound_support_bounds
from .costs import CostModel, PiecewiseLinear, Zero
from .market_data import PriceSeries
from .projection import InfeasibleError
from .sampling import estimate_gbm, simulate_samples
from .solver import DroProblem, DroSolution, SolverConfig, solve

logger = logging.getLogger(__name__)


class AccountError(ArithmeticError):
    pass


@dataclass(frozen=True)
class BacktestConfig:
    """Settings for one sliding-window experiment.

    ``cost`` covers the risky assets only; the risk-free asset (prepended at
    index 0 when ``include_risk_free`` is set) is always exempt.
    """

    window: int = 21
    n: int = 21
    epsilons: tuple[float, ...] = (0.0,)
    cost: CostModel | None = None
    v0: float = 1.0
    seed: int = 0
    norm_kind: float = 2.0
    step_lower: float | tuple[float, ...] = -0.05
    step_upper: float | tuple[float, ...] = 0.05
    n_samples: int = 1000
    include_risk_free: bool = True
    correlated: bool = True
    benchmark: str | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.window < 3:
            raise ValueError("window must be at least 3 days")
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if any(not e >= 0 for e in self.epsilons) or not self.epsilons:
            raise ValueError("epsilon grid must be nonempty and nonnegative")
        if not self.v0 > 0:
            raise ValueError("V0 must be positive")
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))


@dataclass
class AccountPath:
    timestamps: list[str]
    values: np.ndarray
    rebalance_dates: list[str]
    weights: np.ndarray
    costs: np.ndarray
    flags: list[str]
    asset_names: list[str]
    benchmark: np.ndarray | None = None


@dataclass(frozen=True)
class PerformanceReport:
    cr: float
    wealth_ratio: float
    std: float
    sr: float
    mdd: float
    n_returns: int

    def to_dict(self) -> dict:
        sr = None if math.isnan(self.sr) else self.sr
        return {
            "CR": self.cr,
            "wealth_ratio": self.wealth_ratio,
            "STD": self.std,
            "SR": sr,
            "MDD": self.mdd,
            "n_returns": self.n_returns,
        }


@dataclass
class BacktestResult:
    epsilon: float
    path: AccountPath
    report: PerformanceReport
    solutions: list[DroSolution | None] = field(default_factory=list)


def step_account(V: float, w, x_n, cost: CostModel, v0_basis: float | None = None) -> float:
    """V (c(w) + w.x_n) with c evaluated on ``v0_basis`` (defaults to V)."""
    w = np.asarray(w, dtype=float)
    basis = V if v0_basis is None else v0_basis
    out = V * (cost.fraction(w, basis) + w @ np.asarray(x_n, dtype=float))
    if not out > 0:
        raise AccountError(f"account value not positive after step: {out!r}")
    return float(out)


def metrics(path, r_f: float = 0.0) -> PerformanceReport:
    """CR, wealth ratio, STD, SR and MDD of a value path.

    R(k) = V(k+1)/V(k) - 1; STD = sqrt(N) * sample std of R; SR =
    sqrt(N) (mean R - r_f) / STD with N the number of returns. SR is NaN when
    STD is zero.
    """
    v = np.asarray(path.values if isinstance(path, AccountPath) else path, dtype=float)
    if v.size < 2:
        raise ValueError("metrics need at least 2 values")
    r = v[1:] / v[:-1] - 1.0
    N = r.size
    std = math.sqrt(N) * float(np.std(r, ddof=1)) if N > 1 else 0.0
    sr = math.sqrt(N) * (float(r.mean()) - r_f) / std if std > 0 else math.nan
    peak = np.maximum.accumulate(v)
    mdd = float(np.max(1.0 - v / peak))
    return PerformanceReport(
        cr=float((v[-1] - v[0]) / v[0]),
        wealth_ratio=float(v[-1] / v[0]),
        std=std,
        sr=sr,
        mdd=mdd,
        n_returns=N,
    )


def _bounds(value, m: int) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    return np.full(m, arr[0]) if arr.size == 1 else arr


def _augmented_cost(cost: CostModel | None, m: int, with_rf: bool) -> CostModel:
    cost = cost or CostModel.zero(m)
    if cost.dimension != m:
        raise ValueError(f"cost model covers {cost.dimension} assets, backtest has {m} risky assets")
    if not with_rf:
        return cost
    specs: list[PiecewiseLinear] = [Zero(), *cost.specs]
    return CostModel(specs, np.r_[True, cost.exempt])


def run(prices: PriceSeries, cfg: BacktestConfig) -> dict[float, BacktestResult]:
    """Sliding-window backtest, one account per radius in ``cfg.epsilons``.

    The first ``window`` days are observation only. At each rebalance day t the
    trailing window ending at t is used to fit a GBM and draw samples of the
    n-day compound return; the program is solved for every radius (largest
    first, warm-started), and each account holds its weights for the next n
    days of realized prices. A window whose solve fails keeps the previous
    weights and is flagged.
    """
    if cfg.benchmark is not None:
        risky = [t for t in prices.tickers if t != cfg.benchmark]
        bench = prices.column(cfg.benchmark)
        prices = prices.select(risky)
    else:
        bench = None
    m = prices.n_assets
    T = prices.n_days
    if T < cfg.window + cfg.n:
        raise ValueError(f"need at least window + n = {cfg.window + cfg.n} price rows, got {T}")

    with_rf = cfg.include_risk_free
    cost = _augmented_cost(cfg.cost, m, with_rf)
    step_box = compound_support_bounds(_bounds(cfg.step_lower, m), _bounds(cfg.step_upper, m), cfg.n)
    rf_daily = prices.daily_risk_free()
    names = (["risk_free"] if with_rf else []) + list(prices.tickers)
    dim = m + (1 if with_rf else 0)

    rebalances = list(range(cfg.window - 1, T - cfg.n, cfg.n))
    eps_desc = sorted(set(cfg.epsilons), reverse=True)
    state = {
        e: {"V": cfg.v0, "values": [cfg.v0], "w": None, "weights": [], "costs": [], "flags": [], "sols": []}
        for e in eps_desc
    }
    timestamps = [prices.calendar[rebalances[0]]]

    for r_idx, t in enumerate(rebalances):
        window = prices.slice(t - cfg.window + 1, t + 1)
        params = estimate_gbm(window)
        samples = simulate_samples(
            params, cfg.n, cfg.n_samples, seed=[cfg.seed, r_idx], box=step_box, correlated=cfg.correlated
        )
        box = step_box
        if with_rf:
            rf_n = (1.0 + rf_daily[t]) ** cfg.n - 1.0
            samples = samples.with_column(rf_n, 0)
            box = step_box.with_risk_free(rf_n)

        prev_sol = None
        for e in eps_desc:
            st = state[e]
            flag = ""
            problem = DroProblem(samples, box, e, cost, cfg.n, cfg.norm_kind, st["V"])
            try:
                sol = solve(problem, cfg.solver, warm_start=prev_sol)
                w = sol.w
                if not sol.converged:
                    flag = "nonconverged"
                prev_sol = sol
            except (InfeasibleError, CornerCapError, ValueError, ArithmeticError) as exc:
                logger.warning("solve failed at %s for eps=%g: %s", prices.calendar[t], e, exc)
                sol = None
                flag = f"solver_error: {exc}"
                w = st["w"] if st["w"] is not None else _fallback_weights(dim, with_rf)
            st["w"] = w
            st["sols"].append(sol)
            st["flags"].append(flag)
            st["weights"].append(np.asarray(w, dtype=float))

            V_t = st["V"]
            cw = cost.fraction(w, V_t)
            st["costs"].append(V_t * (1.0 - cw))
            s0 = prices.prices[t]
            growth_rf = 1.0
            for k in range(1, cfg.n + 1):
                growth_rf *= 1.0 + rf_daily[t + k - 1]
                x = prices.prices[t + k] / s0 - 1.0
                if with_rf:
                    x = np.r_[growth_rf - 1.0, x]
                V_k = V_t * (cw + w @ x)
                if not V_k > 0:
                    raise AccountError(f"account value not positive on {prices.calendar[t + k]}")
                st["values"].append(float(V_k))
            st["V"] = st["values"][-1]
        timestamps.extend(prices.calendar[t + 1 : t + cfg.n + 1])

    start, stop = rebalances[0], rebalances[-1] + cfg.n + 1
    bench_path = None if bench is None else cfg.v0 * bench[start:stop] / bench[start]
    span_rf = float(np.mean(rf_daily[start : stop - 1]))
    out = {}
    for e in cfg.epsilons:
        st = state[e]
        path = AccountPath(
            timestamps=list(timestamps),
            values=np.array(st["values"]),
            rebalance_dates=[prices.calendar[t] for t in rebalances],
            weights=np.vstack(st["weights"]),
            costs=np.array(st["costs"]),
            flags=list(st["flags"]),
            asset_names=names,
            benchmark=bench_path,
        )
        out[e] = BacktestResult(e, path, metrics(path, span_rf), list(st["sols"]))
    return out


def _fallback_weights(dim: int, with_rf: bool) -> np.ndarray:
    """All cash when a risk-free asset exists, otherwise equal weights."""
    w = np.zeros(dim)
    if with_rf:
        w[0] = 1.0
    else:
        w[:] = 1.0 / dim
    return w
