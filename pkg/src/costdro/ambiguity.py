"""Support box, empirical sample sets, Wasserstein balls and norm helpers."""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_CORNER_CAP = 20
CLIP_WARN_FRACTION = 0.05


def parse_norm_kind(kind) -> float:
    """Normalize a norm specifier to 1.0, 2.0 or inf."""
    if isinstance(kind, str):
        key = kind.strip().lower()
        if key in ("inf", "infinity", "max", "linf"):
            return math.inf
        kind = float(key)
    kind = float(kind)
    if kind not in (1.0, 2.0, math.inf):
        raise ValueError(f"norm_kind must be 1, 2 or inf, got {kind!r}")
    return kind


def dual_kind(kind) -> float:
    kind = parse_norm_kind(kind)
    return {1.0: math.inf, 2.0: 2.0, math.inf: 1.0}[kind]


def norm(x, kind=2, axis=-1) -> np.ndarray | float:
    """The primal norm used for transport costs."""
    return np.linalg.norm(np.asarray(x, dtype=float), ord=parse_norm_kind(kind), axis=axis)


def dual_norm(z, norm_kind=2, axis=-1) -> np.ndarray | float:
    """Dual of the ``norm_kind`` norm: l-inf for l1, l2 for l2, l1 for l-inf."""
    return np.linalg.norm(np.asarray(z, dtype=float), ord=dual_kind(norm_kind), axis=axis)


class CornerCapError(ValueError):
    pass


@dataclass(frozen=True)
class SupportBox:
    """Coordinate-wise bounds on n-period compound returns."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float)).copy()
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float)).copy()
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lower and upper must be vectors of equal length")
        if not np.all(lo > -1.0):
            raise ValueError("support bound must exceed -1")
        if not np.all(np.isfinite(hi)):
            raise ValueError("support upper bound must be finite")
        if np.any(lo > hi):
            raise ValueError("support lower bound exceeds upper bound")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dimension(self) -> int:
        return self.lower.shape[0]

    @property
    def degenerate(self) -> np.ndarray:
        return self.lower == self.upper

    @property
    def n_free(self) -> int:
        return int(np.count_nonzero(~self.degenerate))

    @property
    def n_corners(self) -> int:
        return 2**self.n_free

    def contains(self, x, atol: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all((x >= self.lower - atol) & (x <= self.upper + atol), axis=-1)

    def clip(self, x) -> tuple[np.ndarray, int]:
        """Clip points coordinate-wise; returns the clipped array and the number of rows touched."""
        x = np.asarray(x, dtype=float)
        clipped = np.clip(x, self.lower, self.upper)
        touched = int(np.count_nonzero(np.any(clipped != x, axis=-1)))
        return clipped, touched

    def diameter(self, norm_kind=2) -> float:
        return float(norm(self.upper - self.lower, norm_kind))

    def with_risk_free(self, rate_n: float) -> "SupportBox":
        """Prepend a degenerate coordinate for a risk-free asset."""
        return SupportBox(np.r_[rate_n, self.lower], np.r_[rate_n, self.upper])


def compound_support_bounds(step_lower, step_upper, n: int) -> SupportBox:
    """Compound per-step return bounds over n steps: (1 + bound)^n - 1."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    lo = np.atleast_1d(np.asarray(step_lower, dtype=float))
    hi = np.atleast_1d(np.asarray(step_upper, dtype=float))
    if np.any(lo <= -1.0):
        raise ValueError("support bound must exceed -1")
    if np.any(lo > hi):
        raise ValueError("step lower bound exceeds step upper bound")
    if n == 1:
        return SupportBox(lo, hi)
    return SupportBox((1.0 + lo) ** n - 1.0, (1.0 + hi) ** n - 1.0)


def _check_cap(box: SupportBox, cap: int) -> None:
    if box.n_free > cap:
        raise CornerCapError(
            f"corner cap exceeded: {box.n_free} non-degenerate coordinates exceed the enumeration cap of {cap}"
        )


def extreme_points(box: SupportBox, cap: int = DEFAULT_CORNER_CAP) -> Iterator[np.ndarray]:
    """Yield the box's corners in lexicographic bit order (lower before upper,
    first coordinate most significant). Degenerate coordinates contribute one value."""
    _check_cap(box, cap)
    choices = [(lo,) if lo == hi else (lo, hi) for lo, hi in zip(box.lower, box.upper)]
    for corner in itertools.product(*choices):
        yield np.array(corner)


def corner_matrix(box: SupportBox, cap: int = DEFAULT_CORNER_CAP) -> np.ndarray:
    """All corners stacked as a (2^d, m) array, same order as ``extreme_points``."""
    _check_cap(box, cap)
    free = np.flatnonzero(~box.degenerate)
    d = free.size
    bits = (np.arange(2**d)[:, None] >> np.arange(d - 1, -1, -1)[None, :]) & 1
    out = np.tile(box.lower, (2**d, 1))
    out[:, free] = np.where(bits == 1, box.upper[free], box.lower[free])
    return out


def corner_index(box: SupportBox, upper_mask) -> int:
    """Index (in ``corner_matrix`` order) of the corner that is upper exactly on ``upper_mask``."""
    free = np.flatnonzero(~box.degenerate)
    upper_mask = np.asarray(upper_mask, dtype=bool)
    d = free.size
    return int(sum(1 << (d - 1 - p) for p, i in enumerate(free) if upper_mask[i]))


def chain_decomposition(box: SupportBox, x) -> tuple[np.ndarray, np.ndarray]:
    """Write an in-box point as a convex combination of at most d+1 nested corners.

    Coordinates are ranked by their relative position inside the box; the
    corners switch to the upper bound one coordinate at a time. Returns corner
    indices and weights (weights sum to 1 and the weighted corners average to x).
    """
    x = np.asarray(x, dtype=float)
    free = np.flatnonzero(~box.degenerate)
    d = free.size
    if d == 0:
        return np.array([0]), np.array([1.0])
    span = box.upper[free] - box.lower[free]
    u = np.clip((x[free] - box.lower[free]) / span, 0.0, 1.0)
    order = np.argsort(-u, kind="stable")
    us = u[order]
    weights = np.empty(d + 1)
    weights[0] = 1.0 - us[0]
    weights[1:d] = us[:-1] - us[1:]
    weights[d] = us[-1]
    idx = np.empty(d + 1, dtype=np.int64)
    acc = 0
    idx[0] = 0
    for k, p in enumerate(order, start=1):
        acc |= 1 << (d - 1 - p)
        idx[k] = acc
    keep = weights > 0
    if not np.any(keep):
        keep[0] = True
    return idx[keep], weights[keep]


class SampleSet:
    """N draws of the m-dimensional n-period compound return, uniformly weighted."""

    def __init__(self, samples, clipped: int = 0):
        arr = np.asarray(samples, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValueError("a sample set needs at least one m-dimensional sample")
        arr = arr.copy()
        arr.setflags(write=False)
        self.samples = arr
        self.clipped = int(clipped)

    def __len__(self) -> int:
        return self.samples.shape[0]

    def __repr__(self) -> str:
        return f"SampleSet(N={self.size}, m={self.dimension}, clipped={self.clipped})"

    def __eq__(self, other) -> bool:
        return isinstance(other, SampleSet) and np.array_equal(self.samples, other.samples)

    @property
    def size(self) -> int:
        return self.samples.shape[0]

    @property
    def dimension(self) -> int:
        return self.samples.shape[1]

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.size, 1.0 / self.size)

    def clip_to(self, box: SupportBox) -> "SampleSet":
        """Clip to ``box``; warns when more than 5% of samples had to be moved."""
        if box.dimension != self.dimension:
            raise ValueError(f"box dimension {box.dimension} != sample dimension {self.dimension}")
        clipped, touched = box.clip(self.samples)
        if touched > CLIP_WARN_FRACTION * self.size:
            logger.warning("clipped %d of %d samples to the support box", touched, self.size)
        return SampleSet(clipped, clipped=self.clipped + touched)

    def with_column(self, values, position: int = 0) -> "SampleSet":
        col = np.broadcast_to(np.asarray(values, dtype=float), (self.size,))
        return SampleSet(np.insert(self.samples, position, col, axis=1), clipped=self.clipped)

    def to_csv(self, path, columns=None) -> None:
        columns = list(columns) if columns is not None else [f"x{i}" for i in range(self.dimension)]
        lines = [",".join(columns)]
        lines += [",".join(repr(float(v)) for v in row) for row in self.samples]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "SampleSet":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"file not found: {path}")
        rows = path.read_text().strip().splitlines()
        if len(rows) < 2:
            raise ValueError(f"sample file {path} has no samples")
        data = [[float(v) for v in row.split(",")] for row in rows[1:]]
        return cls(np.array(data))


@dataclass(frozen=True)
class WassersteinBall:
    center: SampleSet
    radius: float
    norm_kind: float = 2.0
    box: SupportBox | None = None

    def __post_init__(self):
        if not self.radius >= 0:
            raise ValueError("radius must be nonnegative")
        object.__setattr__(self, "norm_kind", parse_norm_kind(self.norm_kind))

    def contains(self, other: SampleSet, atol: float = 1e-12) -> bool:
        """Membership check for a same-size sample set coupled index by index.

        The index coupling gives an upper bound on the type-1 distance, so a
        True answer is a certificate of membership.
        """
        if self.box is not None and not np.all(self.box.contains(other.samples, atol=atol)):
            return False
        return transport_cost(self.center.samples, other.samples, self.norm_kind) <= self.radius + atol


def transport_cost(a, b, norm_kind=2) -> float:
    """Mean distance of the index coupling between two equally weighted sample sets."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.mean(norm(a - b, norm_kind, axis=1)))


def perturb_within_ball(
    center: SampleSet,
    budget: float,
    seed,
    *,
    box: SupportBox | None = None,
    norm_kind=2,
    mode: str = "random",
) -> SampleSet:
    """Move each sample so the empirical distribution stays inside the ball.

    ``mode="random"`` draws random directions and random shares of the budget;
    ``mode="adverse"`` pushes every sample toward the box's all-lower corner,
    which is the damaging direction for long-only log growth. Clipping to the
    box never increases the displacement, so membership is preserved.
    """
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    x = center.samples
    if budget == 0:
        return SampleSet(x)
    rng = np.random.default_rng(seed)
    n, m = x.shape
    if mode == "adverse":
        if box is None:
            raise ValueError("adverse perturbation needs a support box")
        direction = box.lower[None, :] - x
        direction = direction + 1e-3 * rng.standard_normal((n, m))
    elif mode == "random":
        direction = rng.standard_normal((n, m))
    else:
        raise ValueError(f"unknown perturbation mode {mode!r}")
    lengths = norm(direction, norm_kind, axis=1)
    lengths[lengths == 0] = 1.0
    unit = direction / lengths[:, None]
    share = rng.dirichlet(np.ones(n)) * n
    frac = rng.uniform(0.5, 1.0)
    delta = unit * (budget * frac * share)[:, None]
    # rescale to absorb rounding so the mean displacement never exceeds the budget
    cost = float(np.mean(norm(delta, norm_kind, axis=1)))
    if cost > budget * frac:
        delta *= budget * frac / cost
    moved = x + delta
    if box is not None:
        moved, _ = box.clip(moved)
    return SampleSet(moved)
