"""Robust primitives: Tukey bisquare, Hampel pieces, scale, spatial median,
M-estimation on component scores, and efficiency-based tuning.

Function arguments named ``u``, ``x`` or ``e`` accept scalars or arrays;
scalars come back as floats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BreakdownError, DegenerateScaleError, EfficiencyUndefinedError


@dataclass(frozen=True)
class HampelConstants:
    """Cutoffs of the three-part redescending Hampel function.

    The defaults 1.65 / 1.96 / 3.09 are roughly the 0.95, 0.975 and
    0.999 standard normal quantiles.
    """

    c1: float = 1.65
    c2: float = 1.96
    c3: float = 3.09

    def __post_init__(self):
        if not (0 < self.c1 < self.c2 < self.c3):
            raise ValueError(f"need 0 < c1 < c2 < c3, got {self.c1}, {self.c2}, {self.c3}")


DEFAULT_HAMPEL = HampelConstants()


def _as_array(u) -> tuple[np.ndarray, bool]:
    arr = np.asarray(u, dtype=float)
    return arr, arr.ndim == 0


def _maybe_scalar(out: np.ndarray, scalar: bool):
    return float(out) if scalar else out


def tukey_rho(u, c: float):
    """Bisquare loss: 1 - [1 - (u/c)^2]^3 for |u| <= c, else 1."""
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    arr, scalar = _as_array(u)
    z = np.clip(np.abs(arr) / c, 0.0, 1.0)
    return _maybe_scalar(1.0 - (1.0 - z * z) ** 3, scalar)


def tukey_kappa(u, c: float):
    """Bisquare sub-gradient (up to 6/c^2): u [1 - (u/c)^2]^2 for |u| <= c, else 0."""
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    arr, scalar = _as_array(u)
    z = arr / c
    inside = np.abs(arr) <= c
    out = np.where(inside, arr * (1.0 - z * z) ** 2, 0.0)
    return _maybe_scalar(out, scalar)


def bisquare_weight(e, c: float):
    """IRLS weight kappa(e)/e: [1 - (e/c)^2]^2 for |e| <= c, else 0; 1 at e = 0."""
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    arr, scalar = _as_array(e)
    z = arr / c
    out = np.where(np.abs(arr) <= c, (1.0 - z * z) ** 2, 0.0)
    return _maybe_scalar(out, scalar)


def hampel_f(x, consts: HampelConstants = DEFAULT_HAMPEL):
    """Three-part redescending Hampel function (odd in ``x``)."""
    arr, scalar = _as_array(x)
    ax = np.abs(arr)
    c1, c2, c3 = consts.c1, consts.c2, consts.c3
    mag = np.select(
        [ax <= c1, ax <= c2, ax <= c3],
        [ax, c1, c1 * (c3 - ax) / (c3 - c2)],
        default=0.0,
    )
    return _maybe_scalar(np.sign(arr) * mag, scalar)


def hampel_weight(x, consts: HampelConstants = DEFAULT_HAMPEL):
    """Downweighting factor f(x)/x with the limit value 1 at x = 0.

    Even in ``x``, equal to 1 on [0, c1], decays to 0 at c3 and stays 0
    beyond.
    """
    arr, scalar = _as_array(x)
    ax = np.abs(arr)
    c1, c2, c3 = consts.c1, consts.c2, consts.c3
    out = np.ones_like(ax)
    mid = (ax > c1) & (ax <= c2)
    desc = (ax > c2) & (ax <= c3)
    np.divide(c1, ax, out=out, where=mid)
    np.divide(c1 * (c3 - ax), (c3 - c2) * ax, out=out, where=desc)
    out[ax > c3] = 0.0
    return _maybe_scalar(out, scalar)


def mad_scale(e: np.ndarray) -> float:
    """Raw median absolute deviation about the median (no consistency factor)."""
    arr = np.asarray(e, dtype=float).ravel()
    if arr.size < 2:
        raise ValueError(f"need at least 2 values, got {arr.size}")
    if not np.isfinite(arr).all():
        raise ValueError("values must be finite")
    return float(np.median(np.abs(arr - np.median(arr))))


def l1_median(points: np.ndarray, tol: float = 1e-8, max_iter: int = 500) -> np.ndarray:
    """Spatial (L1) median of rows by damped Weiszfeld iteration.

    Coincident points are handled by the standard correction: when the
    iterate sits on a data point, the pull of the remaining points is
    balanced against that point's multiplicity, so the iteration cannot
    stall at a non-optimal vertex.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] < 1:
        raise ValueError("need at least one point")
    if not np.isfinite(pts).all():
        raise ValueError("points must be finite")
    center = np.median(pts, axis=0)
    spread = float(np.linalg.norm(pts - center, axis=1).max())
    if spread == 0.0:
        return center
    eps = 1e-12 * spread
    m = center
    for _ in range(max_iter):
        diff = pts - m
        dist = np.linalg.norm(diff, axis=1)
        on_point = dist < eps
        free = ~on_point
        if not free.any():
            return m
        inv = 1.0 / dist[free]
        tpoint = (pts[free] * inv[:, None]).sum(axis=0) / inv.sum()
        if on_point.any():
            resultant = (diff[free] * inv[:, None]).sum(axis=0)
            rnorm = float(np.linalg.norm(resultant))
            multiplicity = float(on_point.sum())
            if rnorm <= multiplicity:
                return m
            frac = multiplicity / rnorm
            m_new = (1.0 - frac) * tpoint + frac * m
        else:
            m_new = tpoint
        step = float(np.linalg.norm(m_new - m))
        m = m_new
        if step < tol * spread:
            break
    return m


@dataclass(frozen=True)
class MEstimate:
    """Result of iteratively reweighted M-estimation on scores.

    ``delta`` are the slope coefficients, ``intercept`` the fitted
    constant, ``scale`` the final residual MAD, and ``weights`` the last
    IRLS weights (all 1 for a clean fit, 0 for rejected observations).
    """

    delta: np.ndarray
    intercept: float
    c: float
    scale: float
    iterations: int
    converged: bool
    weights: np.ndarray


def m_estimate(scores: np.ndarray, y: np.ndarray, c: float, tol: float = 1e-8,
               max_iter: int = 100, weight_fn=None) -> MEstimate:
    """Tukey bisquare M-regression of ``y`` on ``scores`` with intercept.

    Starts from least squares, then alternates residual-MAD rescaling
    with weighted least squares until the coefficient vector moves by
    less than ``tol`` in relative terms.  A zero residual MAD means more
    than half the observations are fitted exactly; the estimate is
    returned as converged with limit weights (1 on exact residuals,
    0 elsewhere).

    ``weight_fn(e, c)`` may replace the bisquare weights; passing
    ``lambda e, c: np.ones_like(e)`` reduces the fit to least squares.
    """
    Z = np.atleast_2d(np.asarray(scores, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    n, h = Z.shape
    if y.size != n:
        raise ValueError(f"scores has {n} rows but y has {y.size}")
    if n < h + 2:
        raise ValueError(f"need at least h + 2 = {h + 2} observations, got {n}")
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    if not (np.isfinite(Z).all() and np.isfinite(y).all()):
        raise ValueError("scores and y must be finite")
    wfn = weight_fn if weight_fn is not None else bisquare_weight

    design = np.column_stack([np.ones(n), Z])
    theta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < h + 1:
        raise BreakdownError(f"score design is rank deficient ({rank} < {h + 1})")

    converged = False
    iterations = 0
    weights = np.ones(n)
    scale = 0.0
    for iterations in range(1, max_iter + 1):
        resid = y - design @ theta
        scale = mad_scale(resid)
        if scale == 0.0:
            weights = (resid == 0.0).astype(float)
            converged = True
            break
        weights = np.asarray(wfn(resid / scale, c), dtype=float)
        if (weights > 0).sum() < h + 2:
            raise BreakdownError(f"only {int((weights > 0).sum())} observations kept "
                                 f"positive weight; need at least {h + 2}")
        sw = np.sqrt(weights)
        theta_new, _, rank, _ = np.linalg.lstsq(sw[:, None] * design, sw * y, rcond=None)
        if rank < h + 1 or not np.isfinite(theta_new).all():
            raise BreakdownError("weighted score design collapsed to rank "
                                 f"{rank} < {h + 1}")
        move = float(np.linalg.norm(theta_new - theta))
        base = float(np.linalg.norm(theta))
        theta = theta_new
        if move <= tol * max(base, 1e-300):
            converged = True
            break
    return MEstimate(delta=theta[1:], intercept=float(theta[0]), c=float(c),
                     scale=float(scale), iterations=iterations,
                     converged=converged, weights=weights)


def efficiency_factor(e: np.ndarray, c: float, step: float = 1e-4) -> float:
    """Empirical efficiency of the bisquare at cutoff ``c``.

    Computed as ``[sum dkappa/de]^2 / (n sum kappa^2)`` with a central
    finite difference of half-width ``step``; residuals ``e`` are
    expected on the standardized scale.  Raises when every residual
    falls beyond ``c`` (zero denominator).
    """
    arr = np.asarray(e, dtype=float).ravel()
    if arr.size < 2:
        raise ValueError(f"need at least 2 residuals, got {arr.size}")
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    kap = tukey_kappa(arr, c)
    denom = arr.size * float(kap @ kap)
    if denom == 0.0:
        raise EfficiencyUndefinedError(f"all residuals fall beyond c = {c}; "
                                       "efficiency factor undefined")
    slopes = (tukey_kappa(arr + step, c) - tukey_kappa(arr - step, c)) / (2.0 * step)
    return float(slopes.sum() ** 2 / denom)


def select_tuning(scores: np.ndarray, y: np.ndarray,
                  grid: np.ndarray | None = None) -> float:
    """Pick the bisquare cutoff maximizing the empirical efficiency factor.

    Residuals come from a least-squares fit of ``y`` on the scores (with
    intercept) and are standardized by their MAD; candidate cutoffs
    default to the grid 1.0, 1.1, ..., 10.0.  Ties go to the largest
    cutoff.
    """
    Z = np.atleast_2d(np.asarray(scores, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    n, h = Z.shape
    if y.size != n:
        raise ValueError(f"scores has {n} rows but y has {y.size}")
    if n < h + 2:
        raise ValueError(f"need at least h + 2 = {h + 2} observations, got {n}")
    cands = np.linspace(1.0, 10.0, 91) if grid is None else np.asarray(grid, dtype=float)
    if cands.size == 0 or (cands <= 0).any():
        raise ValueError("candidate cutoffs must be positive")
    design = np.column_stack([np.ones(n), Z])
    theta, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ theta
    scale = mad_scale(resid)
    if scale == 0.0:
        raise DegenerateScaleError("residual MAD is zero; cutoff selection undefined")
    e = resid / scale
    best_c = None
    best_tau = -np.inf
    for c in cands:
        try:
            tau = efficiency_factor(e, float(c))
        except EfficiencyUndefinedError:
            continue
        if tau >= best_tau:
            best_tau, best_c = tau, float(c)
    if best_c is None:
        raise EfficiencyUndefinedError("every candidate cutoff rejects all residuals")
    return best_c
