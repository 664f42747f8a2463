"""Worst-case log-growth portfolio over a Wasserstein ball with convex costs.

The finite program solved here is

    max_{w, lam, s, Z}  (1/n) (-lam * eps + mean_j s_j)
    s.t.  s_j <= log(c(w) + w.v) + z_j.(v - xhat_j)   for every box corner v
          ||z_j||_* <= lam,   w in the simplex with a survivability margin.

``lam`` and ``s`` are eliminated (lam = max_j ||z_j||_*, s_j = min over corners),
which leaves a concave maximization over (w, Z). It is solved by accelerated
projected gradient ascent on a log-sum-exp smoothing of the corner minimum,
with the smoothing temperature driven down in stages. Corners are generated
lazily from exact full sweeps. Every reported objective is the exact
(unsmoothed) value at the returned point, so it is a valid lower bound on the
worst-case growth rate at the returned weights.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import kernels
from .ambiguity import (
    DEFAULT_CORNER_CAP,
    SampleSet,
    SupportBox,
    chain_decomposition,
    corner_matrix,
    dual_norm,
    norm,
    parse_norm_kind,
    perturb_within_ball,
)
from .costs import CostModel
from .projection import (
    InfeasibleError,
    project_dual_cone,
    project_simplex_halfspace,
    project_simplex_separable,
)

logger = logging.getLogger(__name__)

CORNER_VIOLATION_TOL = 1e-7
DUAL_CAP_TOL = 1e-9


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-6
    max_iter: int = 20000
    corner_cap: int = DEFAULT_CORNER_CAP
    survival_margin: float = 1e-8
    log_floor: float = 1e-12
    seed: int = 0
    tau_start: float = 1e-2
    tau_factor: float = 0.1
    sweep_every: int = 25
    gap_samples: int = 16
    backend: str | None = None

    def __post_init__(self):
        for name in ("tolerance", "survival_margin", "log_floor", "tau_start"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.tau_factor < 1:
            raise ValueError("tau_factor must lie in (0, 1)")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class DroProblem:
    samples: SampleSet
    box: SupportBox
    epsilon: float
    cost: CostModel
    horizon: int = 1
    norm_kind: float = 2.0
    v0: float = 1.0

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be nonnegative")
        if self.horizon < 1:
            raise ValueError("horizon must be a positive integer")
        if not self.v0 > 0:
            raise ValueError("V0 must be positive")
        m = self.box.dimension
        if self.samples.dimension != m or self.cost.dimension != m:
            raise ValueError(
                f"dimension mismatch: samples {self.samples.dimension}, box {m}, cost {self.cost.dimension}"
            )
        object.__setattr__(self, "norm_kind", parse_norm_kind(self.norm_kind))

    @property
    def dimension(self) -> int:
        return self.box.dimension

    def with_epsilon(self, epsilon: float) -> "DroProblem":
        return replace(self, epsilon=float(epsilon))


class FeasibleSet:
    """Simplex intersected with {w : sum_i w_i lower_i + c(w) >= margin}."""

    def __init__(self, box: SupportBox, cost: CostModel, v0: float = 1.0, margin: float = 1e-8):
        self.box = box
        self.cost = cost
        self.v0 = v0
        self.margin = margin
        if cost.is_linear:
            # c(w) = 1 - rates.w, so the margin is the half-space g.w >= margin - 1
            self._g = box.lower - cost.linear_rates
            self._terms = None
        else:
            self._g = None
            lo = box.lower
            self._terms = [
                (knots, tuple(s - l for s in slopes))
                for l, (knots, slopes) in zip(lo, cost.separable_terms(v0))
            ]

    def survivability(self, w) -> float:
        w = np.asarray(w, dtype=float)
        return float(w @ self.box.lower + self.cost.fraction(w, self.v0, check=False))

    def contains(self, w, atol: float = 1e-9) -> bool:
        w = np.asarray(w, dtype=float)
        return bool(
            np.all(w >= -atol)
            and abs(w.sum() - 1.0) <= atol
            and self.survivability(w) >= self.margin - atol
        )

    def is_empty(self) -> bool:
        m = self.box.dimension
        if any(self.survivability(np.eye(m)[i]) >= self.margin for i in range(m)):
            return False
        try:
            self.project(np.full(m, 1.0 / m))
        except InfeasibleError:
            return True
        return False

    def project(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if self._g is not None:
            return project_simplex_halfspace(v, self._g, self.margin - 1.0)
        return project_simplex_separable(v, self._terms, self.margin - 1.0)


@dataclass
class SolverDiagnostics:
    iterations: int = 0
    converged: bool = False
    stages: int = 0
    active_corners: int = 0
    total_corners: int = 0
    max_corner_violation: float = 0.0
    max_dual_cap_violation: float = 0.0
    survivability_margin: float = float("nan")
    lambda_finite: bool = True
    s_bounded: bool = True
    duality_gap: float | None = None
    upper_bound: float | None = None
    perturbation_upper: float | None = None
    method: str = ""
    backend: str = ""
    runtime_seconds: float = 0.0
    message: str = ""


@dataclass
class DroSolution:
    w: np.ndarray
    lam: float
    s: np.ndarray
    z: np.ndarray
    objective: float
    epsilon: float
    diagnostics: SolverDiagnostics = field(default_factory=SolverDiagnostics)

    @property
    def converged(self) -> bool:
        return self.diagnostics.converged

    def to_dict(self, tickers=None) -> dict:
        out = {
            "epsilon": float(self.epsilon),
            "objective": float(self.objective),
            "lambda": float(self.lam),
            "weights": [float(x) for x in self.w],
            # wall-clock time is left out so that files are reproducible byte for byte
            "diagnostics": {
                k: (float(v) if isinstance(v, np.floating) else v)
                for k, v in asdict(self.diagnostics).items()
                if k != "runtime_seconds"
            },
        }
        if tickers is not None:
            out["tickers"] = list(tickers)
        return out


# ---------------------------------------------------------------------------
# pointwise pieces


def survivability_margin(w, box: SupportBox, cost: CostModel, v0: float = 1.0) -> float:
    """sum_i w_i lower_i + c(w); positive means V(n) > 0 for every in-box outcome."""
    w = np.asarray(w, dtype=float)
    return float(w @ box.lower + cost.fraction(w, v0, check=False))


def phi(w, z_j, x, xhat_j, cost: CostModel, v0: float = 1.0, log_floor: float = 1e-12) -> float:
    """log(c(w) + w.x) + z_j.(x - xhat_j); -inf when the log argument is below the floor."""
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    arg = cost.fraction(w, v0, check=False) + w @ x
    if arg < log_floor:
        return -math.inf
    return float(math.log(arg) + np.asarray(z_j, dtype=float) @ (x - np.asarray(xhat_j, dtype=float)))


def _corner_logs(w, V, cost: CostModel, v0: float, log_floor: float):
    cw = cost.fraction(w, v0, check=False)
    arg = cw + V @ w
    with np.errstate(divide="ignore"):
        h = np.where(arg >= log_floor, np.log(np.maximum(arg, log_floor)), -np.inf)
    return h, arg, cw


def inner_constraint_min(
    w, z_j, xhat_j, box: SupportBox, cost: CostModel, v0: float = 1.0, cap: int = DEFAULT_CORNER_CAP,
    log_floor: float = 1e-12,
):
    """Exact minimum of phi over the box's corners; ties go to the lowest corner index."""
    V = corner_matrix(box, cap)
    h, _, _ = _corner_logs(np.asarray(w, dtype=float), V, cost, v0, log_floor)
    vals, idx = kernels.corner_min(h, np.atleast_2d(z_j), np.atleast_2d(xhat_j), V)
    return float(vals[0]), V[idx[0]].copy()


def reduced_objective(w, Z, problem: DroProblem, cap: int = DEFAULT_CORNER_CAP, margin: float = 0.0) -> float:
    """(1/n)(-eps max_j ||z_j||_* + mean_j min over corners of phi_j).

    At eps = 0 the ball is the empirical distribution itself, so the value is
    the classical (1/n) mean_j log(c(w) + w.xhat_j) and Z is ignored, matching
    the dispatch in :func:`solve`.
    """
    w = np.asarray(w, dtype=float)
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    fs = FeasibleSet(problem.box, problem.cost, problem.v0, margin)
    if not fs.contains(w):
        raise InfeasibleError("w is outside the feasible set")
    if problem.epsilon == 0:
        cw = problem.cost.fraction(w, problem.v0, check=False)
        return float(np.mean(np.log(cw + problem.samples.samples @ w))) / problem.horizon
    V = corner_matrix(problem.box, cap)
    h, _, _ = _corner_logs(w, V, problem.cost, problem.v0, 1e-12)
    vals, _ = kernels.corner_min(h, Z, problem.samples.samples, V)
    lam = float(np.max(dual_norm(Z, problem.norm_kind, axis=1))) if Z.size else 0.0
    return (-problem.epsilon * lam + float(vals.mean())) / problem.horizon


# ---------------------------------------------------------------------------
# smooth weighted-log maximization (ELG and the dual bound)


def _max_weighted_log(points, weights, fs: FeasibleSet, cost: CostModel, v0: float, w0, tol=1e-13, max_iter=5000):
    """Maximize sum_k weights_k log(c(w) + w.points_k) over the feasible set.

    FISTA with backtracking and adaptive restart; returns (w, value, iterations, fw_gap).
    """
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float)

    def value_grad(w):
        cw = cost.fraction(w, v0, check=False)
        arg = cw + points @ w
        if np.any(arg <= 0):
            return -math.inf, None
        r = weights / arg
        grad = r @ points + r.sum() * cost.fraction_grad(w, v0)
        return float(weights @ np.log(arg)), grad

    x = fs.project(w0)
    fx, gx = value_grad(x)
    best_w, best_f = x, fx
    y, fy, gy = x, fx, gx
    t, L = 1.0, 1.0
    it = 0
    for it in range(1, max_iter + 1):
        while True:
            xn = fs.project(y + gy / L)
            fn, gn = value_grad(xn)
            d = xn - y
            if fn >= fy + gy @ d - 0.5 * L * (d @ d) - 1e-15 * abs(fy):
                break
            L *= 2.0
            if L > 1e20:
                break
        if fn > best_f:
            best_w, best_f = xn, fn
        step = L * np.linalg.norm(xn - y)
        if (L * (xn - y)) @ (xn - x) < 0:
            t = 1.0
            y, fy, gy = xn, fn, gn
        else:
            tn = 0.5 * (1 + math.sqrt(1 + 4 * t * t))
            y = fs.project(xn + (t - 1) / tn * (xn - x))
            t = tn
            fy, gy = value_grad(y)
            if gy is None:
                y, fy, gy, t = xn, fn, gn, 1.0
        x, fx = xn, fn
        L = max(L * 0.9, 1e-8)
        if step <= tol:
            break
    _, g = value_grad(best_w)
    fw_gap = float(np.max(g) - g @ best_w) if g is not None else math.inf
    return best_w, best_f, it, fw_gap


def elg_classical(
    samples: SampleSet,
    cost: CostModel,
    n: int = 1,
    v0: float = 1.0,
    box: SupportBox | None = None,
    config: SolverConfig | None = None,
    warm_start=None,
) -> DroSolution:
    """Empirical log-optimal weights: max (1/n) mean_j log(c(w) + w.xhat_j).

    Without a ``box`` the survivability margin is taken against the samples'
    own coordinate-wise minima.
    """
    config = config or SolverConfig()
    start = time.perf_counter()
    X = samples.samples
    if box is None:
        box = SupportBox(X.min(axis=0), X.max(axis=0))
    fs = FeasibleSet(box, cost, v0, config.survival_margin)
    if fs.is_empty():
        raise InfeasibleError("feasible set is empty")
    m = X.shape[1]
    w0 = np.full(m, 1.0 / m) if warm_start is None else np.asarray(getattr(warm_start, "w", warm_start))
    weights = np.full(X.shape[0], 1.0 / X.shape[0])
    w, f, iters, fw_gap = _max_weighted_log(X, weights, fs, cost, v0, w0)
    if warm_start is not None:
        # never return worse than the starting weights
        w_start = fs.project(w0)
        f_start = float(weights @ np.log(cost.fraction(w_start, v0, check=False) + X @ w_start))
        if f_start > f:
            w, f = w_start, f_start
    s = np.log(cost.fraction(w, v0, check=False) + X @ w)
    margin_val = fs.survivability(w)
    margin_active = margin_val <= config.survival_margin * 10
    diag = SolverDiagnostics(
        iterations=iters,
        converged=(fw_gap / n <= config.tolerance) or margin_active,
        stages=1,
        survivability_margin=margin_val,
        duality_gap=fw_gap / n,
        upper_bound=(f + fw_gap) / n,
        method="elg",
        backend=kernels.BACKEND,
        runtime_seconds=time.perf_counter() - start,
    )
    return DroSolution(w=w, lam=0.0, s=s, z=np.zeros_like(X), objective=float(s.mean()) / n, epsilon=0.0, diagnostics=diag)


# ---------------------------------------------------------------------------
# the robust program


def _axis_corners(box: SupportBox) -> np.ndarray:
    """All-lower, all-upper, and per free axis the two corners that differ from the rest on it."""
    d = box.n_free
    full = (1 << d) - 1
    idx = {0, full}
    for p in range(d):
        bit = 1 << (d - 1 - p)
        idx.add(bit)
        idx.add(full ^ bit)
    return np.array(sorted(idx), dtype=np.int64)


class _Program:
    """Evaluation helpers for one problem instance."""

    def __init__(self, problem: DroProblem, config: SolverConfig):
        self.problem = problem
        self.config = config
        self.X = np.ascontiguousarray(problem.samples.samples)
        self.N, self.m = self.X.shape
        self.V = corner_matrix(problem.box, config.corner_cap)
        self.K = self.V.shape[0]
        self.fs = FeasibleSet(problem.box, problem.cost, problem.v0, config.survival_margin)
        self.eps = float(problem.epsilon)
        self.nk = problem.norm_kind
        self.backend = config.backend

    def logs(self, w, V):
        cost, v0 = self.problem.cost, self.problem.v0
        cw = cost.fraction(w, v0, check=False)
        arg = np.maximum(cw + V @ w, self.config.log_floor)
        return np.log(arg), arg

    def smooth(self, w, lam, Z, active, tau):
        """Smoothed objective over the active corners and its gradient blocks."""
        V = self.V[active]
        h, arg = self.logs(w, V)
        vals, q, pv = kernels.softmin(h, Z, self.X, V, tau, backend=self.backend)
        f = -lam * self.eps + float(vals.mean())
        r = q / arg
        gw = r @ V + r.sum() * self.problem.cost.fraction_grad(w, self.problem.v0)
        gz = (pv - self.X) / self.N
        return f, gw, -self.eps, gz, q, pv

    def exact(self, w, Z, active=None):
        V = self.V if active is None else self.V[active]
        h, _ = self.logs(w, V)
        vals, idx = kernels.corner_min(h, Z, self.X, V, backend=self.backend)
        lam = float(np.max(dual_norm(Z, self.nk, axis=1)))
        return -self.eps * lam + float(vals.mean()), vals, idx, lam

    def project(self, w, lam, Z):
        lam_p, Z_p = project_dual_cone(lam, Z, self.nk)
        return self.fs.project(w), lam_p, Z_p


def _dual_upper_bound(prog: _Program, w, q, pv, active):
    """Upper bound on the program value from a feasible adversary.

    Softmin weights define, for every sample, a distribution over corners. It
    is mixed with the exact corner decomposition of the sample (zero transport)
    until the mean displacement fits the budget; the bound is the best
    weighted log growth against the mixed corner weights.
    """
    box = prog.problem.box
    base = np.zeros(prog.K)
    for x in prog.X:
        idx, wts = chain_decomposition(box, x)
        np.add.at(base, idx, wts)
    base /= prog.N
    disp = float(np.mean(norm(pv - prog.X, prog.nk, axis=1)))
    theta = 1.0 if disp <= prog.eps else prog.eps / disp
    mix = (1.0 - theta) * base
    mix[active] += theta * q
    support = np.flatnonzero(mix > 0)
    _, val, _, fw_gap = _max_weighted_log(prog.V[support], mix[support], prog.fs, prog.problem.cost, prog.problem.v0, w)
    return val + max(fw_gap, 0.0)


def _perturbation_upper(prog: _Program, w, config: SolverConfig) -> float | None:
    if config.gap_samples <= 0:
        return None
    p = prog.problem
    cw = p.cost.fraction(w, p.v0, check=False)
    ss = np.random.SeedSequence(config.seed)
    worst = math.inf
    for k, child in enumerate(ss.spawn(config.gap_samples)):
        mode = "adverse" if k % 2 == 0 else "random"
        moved = perturb_within_ball(p.samples, p.epsilon, child, box=p.box, norm_kind=p.norm_kind, mode=mode)
        worst = min(worst, float(np.mean(np.log(cw + moved.samples @ w))))
    return worst / p.horizon


def solve(problem: DroProblem, config: SolverConfig | None = None, warm_start: DroSolution | None = None) -> DroSolution:
    """Solve the finite worst-case log-growth program for ``problem``.

    ``epsilon == 0`` dispatches to :func:`elg_classical`. A ``warm_start``
    solution (same samples, any radius) seeds the iterate; the returned point is
    never worse than the warm start.
    """
    config = config or SolverConfig()
    if problem.epsilon == 0:
        return elg_classical(
            problem.samples, problem.cost, problem.horizon, problem.v0, problem.box, config, warm_start
        )
    start = time.perf_counter()
    prog = _Program(problem, config)
    if prog.fs.is_empty():
        raise InfeasibleError("feasible set is empty: even the best vertex violates the survivability margin")
    box = problem.box
    if not np.all(box.contains(prog.X, atol=1e-12)):
        raise ValueError("samples must lie inside the support box; clip them first")

    if warm_start is not None:
        w = prog.fs.project(np.asarray(warm_start.w, dtype=float))
        Z = np.array(warm_start.z, dtype=float, copy=True)
        if Z.shape != prog.X.shape:
            Z = np.zeros_like(prog.X)
    else:
        w = prog.fs.project(np.full(prog.m, 1.0 / prog.m))
        Z = np.zeros_like(prog.X)
    lam = float(np.max(dual_norm(Z, prog.nk, axis=1)))

    active = _axis_corners(box)
    best_f, _, best_idx, _ = prog.exact(w, Z)
    best = (best_f, w.copy(), Z.copy())
    active = np.union1d(active, best_idx)

    tol = config.tolerance * problem.horizon
    tau_min = 0.1 * tol / max(math.log(prog.K), 1.0)
    tau = max(config.tau_start, tau_min)
    n_stages = 1 + max(0, math.ceil(math.log(tau_min / tau) / math.log(config.tau_factor)))
    stage_cap = max(50, config.max_iter // max(n_stages, 1))
    total_it = 0
    stages = 0
    final_clean = False
    L = 1.0
    last_q = last_pv = None

    while total_it < config.max_iter:
        stages += 1
        x_w, x_l, x_z = w, lam, Z
        y_w, y_l, y_z = w, lam, Z
        t = 1.0
        f_y, g_w, g_l, g_z, q, pv = prog.smooth(y_w, y_l, y_z, active, tau)
        stage_it = 0
        stopped_by_criterion = False
        history = [f_y]
        while stage_it < stage_cap and total_it < config.max_iter:
            stage_it += 1
            total_it += 1
            while True:
                n_w, n_l, n_z = prog.project(y_w + g_w / L, y_l + g_l / L, y_z + g_z / L)
                f_n, gn_w, gn_l, gn_z, qn, pvn = prog.smooth(n_w, n_l, n_z, active, tau)
                d_w, d_l, d_z = n_w - y_w, n_l - y_l, n_z - y_z
                d2 = d_w @ d_w + d_l * d_l + float(np.sum(d_z * d_z))
                lin = f_y + g_w @ d_w + g_l * d_l + float(np.sum(g_z * d_z))
                if f_n >= lin - 0.5 * L * d2 - 1e-14 * (1.0 + abs(f_y)):
                    break
                L *= 2.0
            gm = L * math.sqrt(d2)
            # adaptive restart when the step opposes the last move
            e_w, e_l, e_z = n_w - x_w, n_l - x_l, n_z - x_z
            if d_w @ e_w + d_l * e_l + float(np.sum(d_z * e_z)) < 0:
                t = 1.0
                y_w, y_l, y_z = n_w, n_l, n_z
                f_y, g_w, g_l, g_z, q, pv = f_n, gn_w, gn_l, gn_z, qn, pvn
            else:
                tn = 0.5 * (1 + math.sqrt(1 + 4 * t * t))
                beta = (t - 1) / tn
                y_w, y_l, y_z = prog.project(n_w + beta * e_w, n_l + beta * e_l, n_z + beta * e_z)
                t = tn
                f_y, g_w, g_l, g_z, q, pv = prog.smooth(y_w, y_l, y_z, active, tau)
            x_w, x_l, x_z = n_w, n_l, n_z
            last_q, last_pv = qn, pvn
            L *= 0.95
            history.append(f_n)

            if stage_it % config.sweep_every == 0:
                f_ex, _, idx, _ = prog.exact(x_w, x_z)
                if f_ex > best[0]:
                    best = (f_ex, x_w.copy(), x_z.copy())
                new = np.setdiff1d(idx, active)
                if new.size:
                    active = np.union1d(active, new)
                    t = 1.0
                    y_w, y_l, y_z = x_w, x_l, x_z
                    f_y, g_w, g_l, g_z, q, pv = prog.smooth(y_w, y_l, y_z, active, tau)
                    continue
            window = 50
            if gm <= 0.1 * tol or (
                len(history) > window and abs(history[-1] - history[-1 - window]) <= 1e-3 * tol
            ):
                stopped_by_criterion = True
                break

        w, lam, Z = x_w, x_l, x_z
        f_ex, _, idx, _ = prog.exact(w, Z)
        if f_ex > best[0]:
            best = (f_ex, w.copy(), Z.copy())
        new = np.setdiff1d(idx, active)
        if new.size:
            active = np.union1d(active, new)
        if tau <= tau_min * (1 + 1e-12):
            if stopped_by_criterion and not new.size:
                final_clean = True
                break
            continue
        tau = max(tau * config.tau_factor, tau_min)

    f_best, w_best, Z_best = best
    if warm_start is not None and warm_start.z.shape == prog.X.shape:
        w_ws = prog.fs.project(np.asarray(warm_start.w, dtype=float))
        f_ws, _, _, _ = prog.exact(w_ws, warm_start.z)
        if f_ws > f_best:
            f_best, w_best, Z_best = f_ws, w_ws, np.array(warm_start.z, dtype=float)

    f_full, s_full, _, lam_best = prog.exact(w_best, Z_best)
    _, s_active, _, _ = prog.exact(w_best, Z_best, active)
    sweep_violation = float(max(0.0, np.max(s_active - s_full)))
    cap_violation = float(max(0.0, np.max(dual_norm(Z_best, prog.nk, axis=1)) - lam_best))

    upper = None
    gap = None
    if last_q is not None:
        _, _, _, _, q_b, pv_b = prog.smooth(w_best, lam_best, Z_best, active, tau_min)
        upper = _dual_upper_bound(prog, w_best, q_b, pv_b, active)
        gap = (upper - f_full) / problem.horizon
    converged = (final_clean or (gap is not None and gap <= config.tolerance)) and sweep_violation <= CORNER_VIOLATION_TOL

    diag = SolverDiagnostics(
        iterations=total_it,
        converged=bool(converged),
        stages=stages,
        active_corners=int(active.size),
        total_corners=prog.K,
        max_corner_violation=sweep_violation,
        max_dual_cap_violation=cap_violation,
        survivability_margin=prog.fs.survivability(w_best),
        lambda_finite=bool(np.isfinite(lam_best)),
        s_bounded=bool(np.all(np.isfinite(s_full))),
        duality_gap=gap,
        upper_bound=None if upper is None else upper / problem.horizon,
        perturbation_upper=_perturbation_upper(prog, w_best, config),
        method="smoothed-apg",
        backend=kernels.BACKEND if config.backend != "python" else "python",
        runtime_seconds=time.perf_counter() - start,
        message="" if converged else "iteration budget exhausted before the stopping criteria were met",
    )
    if not converged:
        logger.warning("solver did not converge for eps=%g (gap=%s)", problem.epsilon, gap)
    return DroSolution(
        w=w_best,
        lam=lam_best,
        s=s_full,
        z=Z_best,
        objective=f_full / problem.horizon,
        epsilon=float(problem.epsilon),
        diagnostics=diag,
    )


def solve_path(problem: DroProblem, epsilons, config: SolverConfig | None = None) -> list[DroSolution]:
    """Solve over a grid of radii, largest first, warm-starting each solve from the previous one.

    A solution at a larger radius is feasible at a smaller one with an objective
    at least as high, so the returned objectives are non-increasing in radius.
    Results come back in the order of ``epsilons``.
    """
    config = config or SolverConfig()
    eps = [float(e) for e in epsilons]
    order = sorted(range(len(eps)), key=lambda i: -eps[i])
    out: list[DroSolution | None] = [None] * len(eps)
    prev = None
    for i in order:
        sol = solve(problem.with_epsilon(eps[i]), config, warm_start=prev)
        out[i] = sol
        prev = sol
    return out  # type: ignore[return-value]
