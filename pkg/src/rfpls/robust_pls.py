"""Partial robust M-regression: SIMPLS made resistant by iterative reweighting.

Each observation carries a case weight built from two Hampel factors,
one for its response residual and one for its leverage in score space.
Starting weights use the response distances from the median and the row
distances from the spatial median of the data; each pass then refits a
case-weighted SIMPLS, rescores all observations on the original scale,
and rebuilds the weights from the new residuals and score leverages.
Iteration stops when the response loadings stabilize.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BreakdownError, DegenerateScaleError
from .robust import DEFAULT_HAMPEL, HampelConstants, hampel_weight, l1_median, mad_scale
from .simpls import weighted_simpls_fit

_WEIGHT_FLOOR = 1e-6


@dataclass(frozen=True)
class RobustPLSFit:
    """Weighted SIMPLS fit at the final iteration of the reweighting loop.

    ``W_r``/``scores_r``/``gamma_r`` play the roles of the classical
    weight vectors, scores and response loadings; ``weights`` holds the
    final case weights in [1e-6, 1].
    """

    W_r: np.ndarray
    scores_r: np.ndarray
    gamma0: float
    gamma_r: np.ndarray
    x_center: np.ndarray
    weights: np.ndarray
    iterations: int
    converged: bool
    rank_exhausted: bool


def _limit_weights(values: np.ndarray) -> np.ndarray:
    """Weights when a scale collapses to 0: keep exactly-central points only."""
    return (values == 0.0).astype(float)


def initial_weights(X: np.ndarray, y: np.ndarray,
                    consts: HampelConstants = DEFAULT_HAMPEL,
                    weight_fn=None) -> np.ndarray:
    """Starting case weights from response and leverage outlyingness.

    The residual factor downweights responses far from the median in MAD
    units; the leverage factor downweights rows far from the spatial
    median of ``X`` relative to the median such distance.  The product
    is floored at 1e-6 so no observation disappears before the first
    fit.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    n = X.shape[0]
    if y.size != n:
        raise ValueError(f"X has {n} rows but y has {y.size}")
    if n < 3:
        raise ValueError(f"need at least 3 observations, got {n}")
    wfn = weight_fn if weight_fn is not None else (lambda v: hampel_weight(v, consts))

    scale_y = mad_scale(y)
    if scale_y == 0.0:
        raise DegenerateScaleError("response MAD is zero; residual weights undefined")
    w_resid = wfn(np.abs(y - np.median(y)) / scale_y)

    center = l1_median(X)
    dist = np.linalg.norm(X - center, axis=1)
    scale_d = float(np.median(dist))
    if scale_d == 0.0:
        raise DegenerateScaleError("leverage distances have zero median; "
                                   "leverage weights undefined")
    w_lev = wfn(dist / scale_d)
    return np.clip(w_resid * w_lev, _WEIGHT_FLOOR, 1.0)


def prm_fit(X: np.ndarray, y: np.ndarray, h: int, tol: float = 1e-2,
            max_iter: int = 100, consts: HampelConstants = DEFAULT_HAMPEL,
            weight_fn=None) -> RobustPLSFit:
    """Robust SIMPLS of ``y`` on rows of ``X`` by iterative reweighting.

    Parameters
    ----------
    X : ndarray of shape (n, p)
    y : ndarray of shape (n,)
    h : int
        Requested number of components.
    tol : float
        Relative change in the response loadings below which the loop
        stops.
    max_iter : int
        Iteration cap; hitting it returns ``converged=False`` rather
        than raising.
    consts : HampelConstants
        Cutoffs for both weight factors.
    weight_fn : callable, optional
        Replacement for the Hampel factor, called on nonnegative
        standardized distances.  ``lambda v: np.ones_like(v)`` turns the
        procedure into classical SIMPLS.

    Notes
    -----
    Residuals use the fitted intercept, i.e. ``y - (gamma0 + scores @
    gamma)``; leverage distances are measured from the spatial median of
    the corrected scores and standardized by their median.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    n = X.shape[0]
    if h < 1:
        raise ValueError(f"h must be at least 1, got {h}")
    if n < h + 2:
        raise ValueError(f"need at least h + 2 = {h + 2} observations, got {n}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be at least 1, got {max_iter}")
    wfn = weight_fn if weight_fn is not None else (lambda v: hampel_weight(v, consts))

    weights = initial_weights(X, y, consts, weight_fn)
    gamma_prev: np.ndarray | None = None
    fit = None
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        fit = weighted_simpls_fit(X, y, weights, h)
        resid = y - (fit.gamma0 + fit.scores @ fit.gamma)
        scale_r = mad_scale(resid)
        if scale_r == 0.0:
            w_resid = _limit_weights(resid)
        else:
            w_resid = np.asarray(wfn(np.abs(resid) / scale_r), dtype=float)
        center = l1_median(fit.scores)
        dist = np.linalg.norm(fit.scores - center, axis=1)
        scale_d = float(np.median(dist))
        if scale_d == 0.0:
            w_lev = _limit_weights(dist)
        else:
            w_lev = np.asarray(wfn(dist / scale_d), dtype=float)
        raw = w_resid * w_lev
        if (raw > 0).sum() < 2:
            raise BreakdownError("fewer than 2 observations kept positive weight")
        weights = np.clip(raw, _WEIGHT_FLOOR, 1.0)
        if gamma_prev is not None and gamma_prev.size == fit.gamma.size:
            base = float(np.linalg.norm(gamma_prev))
            move = float(np.linalg.norm(fit.gamma - gamma_prev))
            if move <= tol * max(base, 1e-300):
                converged = True
                break
        gamma_prev = fit.gamma
    return RobustPLSFit(W_r=fit.W, scores_r=fit.scores, gamma0=fit.gamma0,
                        gamma_r=fit.gamma, x_center=fit.x_center,
                        weights=weights, iterations=iterations,
                        converged=converged, rank_exhausted=fit.rank_exhausted)
