"""JSON run configuration with field-level validation."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .ambiguity import DEFAULT_CORNER_CAP, parse_norm_kind
from .costs import CostModel, CostModelError, PiecewiseLinear, Proportional, Zero
from .solver import SolverConfig

OUTPUT_ENV = "COSTDRO_OUTPUT_DIR"
DEFAULT_EPSILONS = (0.0, 1e-3, 1e-2, 1e-1, 1.0)


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class RunConfig:
    prices: str | None = None
    risk_free: str | None = None
    samples: str | None = None
    tickers: tuple[str, ...] | None = None
    benchmark: str | None = None
    window: int = 21
    n: int = 21
    epsilon: tuple[float, ...] = DEFAULT_EPSILONS
    cost: dict = field(default_factory=lambda: {"kind": "zero"})
    cost_grid: tuple[float, ...] | None = None
    norm: float = 2.0
    step_lower: float | tuple[float, ...] = -0.05
    step_upper: float | tuple[float, ...] = 0.05
    n_samples: int = 1000
    seed: int = 0
    v0: float = 1.0
    risk_free_rate: float = 0.0
    include_risk_free: bool = True
    correlated: bool = True
    output_dir: str = "costdro_out"
    tolerance: float = 1e-6
    max_iter: int = 20000
    corner_cap: int = DEFAULT_CORNER_CAP

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            tolerance=self.tolerance, max_iter=self.max_iter, corner_cap=self.corner_cap, seed=self.seed
        )

    def cost_model(self, m: int, rate: float | None = None) -> CostModel:
        """Cost model over the m risky assets; ``rate`` overrides with a proportional rate."""
        if rate is not None:
            return CostModel.proportional(rate, m)
        return build_cost(self.cost, m, self.tickers)


def _as_tuple(value, name, cast=float):
    if value is None:
        return None
    seq = value if isinstance(value, (list, tuple)) else [value]
    try:
        return tuple(cast(v) for v in seq)
    except (TypeError, ValueError) as exc:
        raise ConfigError(name, f"cannot parse {value!r}") from exc


def build_cost(spec: dict, m: int, tickers=None) -> CostModel:
    """Cost block: {"kind": "zero" | "proportional" | "piecewise", ...}.

    ``rate`` (scalar or per asset) for proportional; ``breakpoints`` and
    ``slopes`` for piecewise; optional ``exempt`` list of tickers.
    """
    kind = spec.get("kind", "zero")
    try:
        if kind == "zero":
            specs = [Zero()] * m
        elif kind == "proportional":
            rates = spec.get("rate", 0.0)
            rates = [rates] * m if not isinstance(rates, list) else rates
            if len(rates) != m:
                raise ConfigError("cost.rate", f"expected {m} rates, got {len(rates)}")
            specs = [Proportional(float(r)) for r in rates]
        elif kind == "piecewise":
            specs = [PiecewiseLinear(tuple(spec.get("breakpoints", ())), tuple(spec.get("slopes", ())))] * m
        else:
            raise ConfigError("cost.kind", f"unknown cost kind {kind!r}")
    except CostModelError as exc:
        raise ConfigError("cost", str(exc)) from exc
    exempt_names = spec.get("exempt", [])
    if exempt_names and tickers is None:
        raise ConfigError("cost.exempt", "exempt tickers need an explicit tickers list")
    exempt = [t in exempt_names for t in tickers] if tickers is not None else None
    return CostModel(specs, exempt)


def validate(cfg: RunConfig) -> RunConfig:
    if any(not (isinstance(e, float) and e >= 0 and math.isfinite(e)) for e in cfg.epsilon) or not cfg.epsilon:
        raise ConfigError("epsilon", "every radius must be a finite number >= 0")
    if cfg.cost_grid is not None and any(not 0 <= c < 1 for c in cfg.cost_grid):
        raise ConfigError("cost_grid", "proportional rates must lie in [0, 1)")
    if cfg.window < 3:
        raise ConfigError("window", "must be at least 3 days")
    if cfg.n < 1:
        raise ConfigError("n", "must be a positive integer")
    if cfg.n_samples < 1:
        raise ConfigError("n_samples", "must be at least 1")
    if not cfg.v0 > 0:
        raise ConfigError("v0", "must be positive")
    if not cfg.tolerance > 0:
        raise ConfigError("tolerance", "must be positive")
    if cfg.max_iter < 1:
        raise ConfigError("max_iter", "must be at least 1")
    try:
        parse_norm_kind(cfg.norm)
    except ValueError as exc:
        raise ConfigError("norm", str(exc)) from exc
    if not isinstance(cfg.cost, dict):
        raise ConfigError("cost", "must be an object")
    build_cost(cfg.cost, len(cfg.tickers) if cfg.tickers else 1, cfg.tickers)
    if cfg.prices is None and cfg.samples is None:
        raise ConfigError("prices", "either a price file or a sample file is required")
    return cfg


_INT_FIELDS = {"window", "n", "n_samples", "seed", "max_iter", "corner_cap"}
_FLOAT_FIELDS = {"v0", "risk_free_rate", "tolerance"}


def from_dict(data: dict, base_dir: Path | None = None) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(unknown[0], "unknown configuration field")
    kw = dict(data)
    for name in _INT_FIELDS & kw.keys():
        if isinstance(kw[name], bool) or not isinstance(kw[name], int):
            raise ConfigError(name, f"expected an integer, got {kw[name]!r}")
    for name in _FLOAT_FIELDS & kw.keys():
        if isinstance(kw[name], bool) or not isinstance(kw[name], (int, float)):
            raise ConfigError(name, f"expected a number, got {kw[name]!r}")
        kw[name] = float(kw[name])
    if "epsilon" in kw:
        kw["epsilon"] = _as_tuple(kw["epsilon"], "epsilon")
    if "cost_grid" in kw:
        kw["cost_grid"] = _as_tuple(kw["cost_grid"], "cost_grid")
    if "tickers" in kw:
        kw["tickers"] = _as_tuple(kw["tickers"], "tickers", str)
    for name in ("step_lower", "step_upper"):
        if isinstance(kw.get(name), list):
            kw[name] = _as_tuple(kw[name], name)
    if "norm" in kw:
        kw["norm"] = math.inf if kw["norm"] in ("inf", "Infinity") else kw["norm"]
    if base_dir is not None:
        for name in ("prices", "risk_free", "samples"):
            if kw.get(name) and not Path(kw[name]).is_absolute():
                kw[name] = str(base_dir / kw[name])
    return RunConfig(**kw)


def load(path, overrides: dict | None = None, env: dict | None = None) -> RunConfig:
    """Read a JSON config; precedence is overrides > environment > file > defaults.

    Relative data paths are resolved against the config file's directory.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a JSON object")
    cfg = from_dict(data, path.parent)
    return apply_overrides(cfg, overrides, env)


def apply_overrides(cfg: RunConfig, overrides: dict | None = None, env: dict | None = None) -> RunConfig:
    env = env or {}
    if env.get(OUTPUT_ENV):
        cfg = replace(cfg, output_dir=env[OUTPUT_ENV])
    if overrides:
        clean = {k: v for k, v in overrides.items() if v is not None}
        if clean:
            merged = {f.name: getattr(cfg, f.name) for f in fields(RunConfig)}
            merged.update(clean)
            cfg = from_dict({k: list(v) if isinstance(v, tuple) else v for k, v in merged.items()})
    return validate(cfg)
