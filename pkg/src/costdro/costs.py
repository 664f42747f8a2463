"""Convex transaction costs and the cost fraction c(w) = 1 - TC(w V0) / V0."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class CostModelError(ValueError):
    pass


@dataclass(frozen=True)
class PiecewiseLinear:
    """Convex piecewise-linear cost of a trade of size u >= 0 (currency units).

    ``slopes[0]`` applies on [0, breakpoints[0]], ``slopes[k]`` on
    [breakpoints[k-1], breakpoints[k]] and the last slope beyond the last
    breakpoint. Convexity requires nondecreasing slopes.
    """

    breakpoints: tuple[float, ...]
    slopes: tuple[float, ...]

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        slopes = tuple(float(s) for s in self.slopes)
        if len(slopes) != len(bps) + 1:
            raise CostModelError("need exactly one more slope than breakpoints")
        if any(b <= 0 for b in bps) or any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise CostModelError("breakpoints must be positive and strictly increasing")
        if any(s < 0 for s in slopes):
            raise CostModelError("slopes must be nonnegative")
        if any(s2 < s1 for s1, s2 in zip(slopes, slopes[1:])):
            raise CostModelError("piecewise cost is not convex: slopes must be nondecreasing")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "slopes", slopes)

    @property
    def is_linear(self) -> bool:
        return not self.breakpoints

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        total = self.slopes[0] * u
        for b, s_prev, s in zip(self.breakpoints, self.slopes, self.slopes[1:]):
            total = total + (s - s_prev) * np.maximum(u - b, 0.0)
        return total

    def derivative(self, u) -> np.ndarray:
        """Right derivative in u."""
        u = np.asarray(u, dtype=float)
        out = np.full(u.shape, self.slopes[0])
        for b, s in zip(self.breakpoints, self.slopes[1:]):
            out = np.where(u >= b, s, out)
        return out


def Zero() -> PiecewiseLinear:
    return PiecewiseLinear((), (0.0,))


def Proportional(rate: float) -> PiecewiseLinear:
    if not 0.0 <= rate < 1.0:
        raise CostModelError("proportional rate must lie in [0, 1)")
    return PiecewiseLinear((), (rate,))


class CostModel:
    """Per-asset convex costs TC_i charged on the allocation u_i = w_i V0.

    Assets flagged in ``exempt`` (typically the risk-free asset) never pay.
    """

    def __init__(self, specs: Sequence[PiecewiseLinear], exempt: Sequence[bool] | None = None):
        self.specs = tuple(specs)
        m = len(self.specs)
        exempt = np.zeros(m, dtype=bool) if exempt is None else np.asarray(exempt, dtype=bool)
        if exempt.shape != (m,):
            raise CostModelError("exempt mask length must match the number of assets")
        self.exempt = exempt
        self.exempt.setflags(write=False)

    @classmethod
    def zero(cls, m: int) -> "CostModel":
        return cls([Zero()] * m)

    @classmethod
    def proportional(cls, rate, m: int | None = None, exempt=None) -> "CostModel":
        rates = np.atleast_1d(np.asarray(rate, dtype=float))
        if m is not None and rates.size == 1:
            rates = np.full(m, rates[0])
        return cls([Proportional(float(r)) for r in rates], exempt)

    @property
    def dimension(self) -> int:
        return len(self.specs)

    @property
    def is_linear(self) -> bool:
        return all(s.is_linear for s in self.specs)

    @property
    def linear_rates(self) -> np.ndarray:
        """Effective per-unit rates (zero for exempt assets); only meaningful when linear."""
        rates = np.array([s.slopes[0] for s in self.specs])
        return np.where(self.exempt, 0.0, rates)

    def __repr__(self) -> str:
        return f"CostModel(specs={self.specs!r}, exempt={self.exempt.tolist()!r})"

    def per_asset(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.dimension:
            raise CostModelError(f"allocation has {u.shape[-1]} entries, cost model has {self.dimension}")
        costs = np.stack([spec(u[..., i]) for i, spec in enumerate(self.specs)], axis=-1)
        return np.where(self.exempt, 0.0, costs)

    def transaction_cost(self, u) -> float:
        u = np.asarray(u, dtype=float)
        if np.any(u < 0):
            raise CostModelError("allocations must be nonnegative")
        return float(np.sum(self.per_asset(u)))

    def fraction(self, w, v0: float = 1.0, check: bool = True) -> float:
        """c(w) = 1 - TC(w V0) / V0."""
        if v0 <= 0:
            raise CostModelError("initial value V0 must be positive")
        w = np.asarray(w, dtype=float)
        tc = float(np.sum(self.per_asset(np.maximum(w, 0.0) * v0)))
        if check and tc >= v0:
            raise CostModelError("costs consume account")
        return 1.0 - tc / v0

    def fraction_grad(self, w, v0: float = 1.0) -> np.ndarray:
        """A supergradient of c at w (the gradient wherever c is differentiable)."""
        w = np.asarray(w, dtype=float)
        u = np.maximum(w, 0.0) * v0
        d = np.array([spec.derivative(u[i]) for i, spec in enumerate(self.specs)], dtype=float)
        return -np.where(self.exempt, 0.0, d)

    def separable_terms(self, v0: float = 1.0):
        """Per-asset pieces of -TC_i(w_i V0)/V0 as (breakpoints in w, slopes in w)."""
        out = []
        for spec, ex in zip(self.specs, self.exempt):
            if ex:
                out.append(((), (0.0,)))
            else:
                out.append((tuple(b / v0 for b in spec.breakpoints), spec.slopes))
        return out


def transaction_cost(model: CostModel, u) -> float:
    return model.transaction_cost(u)


def cost_fraction(model: CostModel, w, v0: float = 1.0) -> float:
    return model.fraction(w, v0)
