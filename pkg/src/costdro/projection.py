"""Euclidean projections used by the first-order solver."""
from __future__ import annotations

import math

import numpy as np

_BISECT_ITERS = 200


class InfeasibleError(ValueError):
    pass


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Projection onto {w : sum(w) = 1, w >= 0} (sort-based, O(m log m))."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1.0), 0.0)


def project_simplex_halfspace(v: np.ndarray, g: np.ndarray, beta: float) -> np.ndarray:
    """Projection onto the simplex intersected with {w : g.w >= beta}.

    The solution is project_simplex(v + mu g) for the smallest multiplier
    mu >= 0 meeting the half-space; g.w(mu) is nondecreasing in mu, so mu is
    found by bisection and the feasible end of the bracket is returned.
    """
    w = project_simplex(v)
    if g @ w >= beta:
        return w
    if g.max() < beta:
        raise InfeasibleError("feasible set is empty: no simplex point meets the survivability margin")
    lo, hi = 0.0, 1.0
    while g @ project_simplex(v + hi * g) < beta:
        hi *= 2.0
        if hi > 1e300:
            raise InfeasibleError("could not bracket the survivability multiplier")
    w_hi = project_simplex(v + hi * g)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        w_mid = project_simplex(v + mid * g)
        if g @ w_mid >= beta:
            hi, w_hi = mid, w_mid
        else:
            lo = mid
    return w_hi


def _prox_pl(y: float, mu: float, knots: tuple, slopes: tuple) -> float:
    """argmin_{w >= 0} 0.5 (w - y)^2 + mu f(w) for convex piecewise-linear f.

    ``knots`` are the interior breakpoints of f, ``slopes`` its slopes.
    """
    t = (0.0,) + tuple(knots) + (math.inf,)
    if y <= mu * slopes[0]:
        return 0.0
    for k, s in enumerate(slopes):
        cand = y - mu * s
        if t[k] <= cand <= t[k + 1]:
            return cand
        if k + 1 < len(slopes) and cand > t[k + 1] and y - mu * slopes[k + 1] < t[k + 1]:
            return t[k + 1]
    return max(y - mu * slopes[-1], 0.0)


def project_simplex_separable(v: np.ndarray, terms, beta: float) -> np.ndarray:
    """Projection onto the simplex intersected with {w : sum_i psi_i(w_i) >= beta}.

    Each psi_i is concave piecewise linear, given in ``terms`` as
    (knots, slopes of -psi_i). Nested bisection on the two multipliers.
    """
    def psi(w):
        total = 0.0
        for wi, (knots, slopes) in zip(w, terms):
            f = slopes[0] * wi
            for b, s0, s1 in zip(knots, slopes, slopes[1:]):
                f += (s1 - s0) * max(wi - b, 0.0)
            total -= f
        return total

    def w_of(mu, nu):
        return np.array([_prox_pl(vi - nu, mu, kn, sl) for vi, (kn, sl) in zip(v, terms)])

    def w_for_mu(mu):
        # sum_i w_i(nu) is nonincreasing in nu
        lo, hi = -1.0, 1.0
        while w_of(mu, lo).sum() < 1.0:
            lo = 2.0 * lo - 1.0
        while w_of(mu, hi).sum() > 1.0:
            hi = 2.0 * hi + 1.0
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if w_of(mu, mid).sum() > 1.0:
                lo = mid
            else:
                hi = mid
        w = w_of(mu, hi)
        s = w.sum()
        return w / s if s > 0 else project_simplex(w)

    w = project_simplex(v)
    if psi(w) >= beta:
        return w
    lo, hi = 0.0, 1.0
    while psi(w_for_mu(hi)) < beta:
        hi *= 2.0
        if hi > 1e12:
            raise InfeasibleError("feasible set is empty: no simplex point meets the survivability margin")
    w_hi = w_for_mu(hi)
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        w_mid = w_for_mu(mid)
        if psi(w_mid) >= beta:
            hi, w_hi = mid, w_mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    return w_hi


def _common_radius(lam0: float, radii: np.ndarray) -> float:
    """argmin_{lam >= 0} (lam - lam0)^2 + sum_j max(r_j - lam, 0)^2."""
    rs = np.sort(radii)[::-1]
    csum = np.concatenate([[0.0], np.cumsum(rs)])
    bounds = np.concatenate([[math.inf], rs, [0.0]])
    for k in range(rs.size + 1):
        lam = (lam0 + csum[k]) / (1.0 + k)
        if bounds[k + 1] <= lam <= bounds[k]:
            return max(lam, 0.0)
    return max(lam0, 0.0)


def _l1_threshold(Z: np.ndarray, radius: float) -> np.ndarray:
    """Soft-threshold level for projecting each row of Z onto the l1 ball."""
    a = np.abs(Z)
    inside = a.sum(axis=1) <= radius
    u = -np.sort(-a, axis=1)
    css = np.cumsum(u, axis=1) - radius
    k = np.arange(1, Z.shape[1] + 1)
    cond = u - css / k > 0
    rho = Z.shape[1] - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(Z.shape[0]), rho] / (rho + 1.0)
    return np.where(inside, 0.0, np.maximum(theta, 0.0))


def project_dual_cone(lam0: float, Z: np.ndarray, norm_kind: float) -> tuple[float, np.ndarray]:
    """Projection of (lam0, Z) onto {(lam, Z) : ||z_j||_* <= lam for all j}.

    ``norm_kind`` names the primal norm; the cap uses its dual.
    """
    if norm_kind == 2.0:
        r = np.linalg.norm(Z, axis=1)
        if r.size == 0 or (lam0 >= 0 and r.max() <= lam0):
            return max(lam0, 0.0), Z
        lam = _common_radius(lam0, r)
        scale = np.where(r > lam, lam / np.where(r > 0, r, 1.0), 1.0)
        return lam, Z * scale[:, None]
    if norm_kind == 1.0:
        a = np.abs(Z)
        if a.size == 0 or (lam0 >= 0 and a.max() <= lam0):
            return max(lam0, 0.0), Z
        lam = _common_radius(lam0, a.ravel())
        return lam, np.clip(Z, -lam, lam)
    if norm_kind == math.inf:
        r1 = np.abs(Z).sum(axis=1)
        if r1.size == 0 or (lam0 >= 0 and r1.max() <= lam0):
            return max(lam0, 0.0), Z
        lo, hi = 0.0, max(lam0, 0.0) + r1.sum()
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if mid - lam0 < _l1_threshold(Z, mid).sum():
                lo = mid
            else:
                hi = mid
        lam = hi
        theta = _l1_threshold(Z, lam)
        return lam, np.sign(Z) * np.maximum(np.abs(Z) - theta[:, None], 0.0)
    raise ValueError(f"unsupported norm kind {norm_kind!r}")
