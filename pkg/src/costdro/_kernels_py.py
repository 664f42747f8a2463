"""Reference numpy kernels for corner evaluation.

Row j of the corner matrix is phi[j, k] = a[k] + z_j . (v_k - xhat_j): the
value of the log-growth constraint integrand for sample j at corner k, where
``a`` holds log(c(w) + w . v_k).
"""
import numpy as np


def corner_values(a, Z, X, V):
    return a[None, :] + Z @ V.T - np.einsum("ji,ji->j", Z, X)[:, None]


def corner_min(a, Z, X, V):
    """Row-wise minimum over corners and the first (lowest-index) minimizer."""
    phi = corner_values(a, Z, X, V)
    idx = np.argmin(phi, axis=1)
    return phi[np.arange(phi.shape[0]), idx], idx.astype(np.int64)


def softmin(a, Z, X, V, tau):
    """Log-sum-exp smoothed minimum over corners.

    Returns the smoothed row minima, the sample-averaged softmin weights per
    corner, and the softmin-weighted corner mean for each sample.
    """
    phi = corner_values(a, Z, X, V)
    mn = phi.min(axis=1, keepdims=True)
    e = np.exp(-(phi - mn) / tau)
    s = e.sum(axis=1, keepdims=True)
    p = e / s
    vals = mn[:, 0] - tau * np.log(s[:, 0])
    return vals, p.mean(axis=0), p @ V
