"""B-spline basis systems, curve smoothing, and Gram-matrix machinery.

Functional predictors observed on a grid are represented by coefficient
vectors in a clamped B-spline basis.  The inner-product geometry of the
basis is carried by its Gram matrix ``Psi``; mapping coefficient vectors
through a symmetric square root of ``Psi`` turns L2 inner products of
curves into plain Euclidean ones, which is what lets multivariate
regression machinery operate on functional data.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import BSpline
from scipy.linalg import block_diag


@dataclass(frozen=True)
class BasisSystem:
    """A clamped B-spline basis on a closed interval.

    Parameters
    ----------
    domain : tuple of float
        Closed interval ``(a, b)`` with ``a < b``.
    num_basis : int
        Number of basis functions ``K``.
    order : int
        Spline order (degree + 1); 4 gives cubic splines.
    knots : ndarray
        Full knot vector of length ``K + order`` with ``order``-fold
        repeated boundary knots.
    """

    domain: tuple[float, float]
    num_basis: int
    order: int
    knots: np.ndarray


def build_bspline_system(domain: tuple[float, float], num_basis: int,
                         order: int = 4) -> BasisSystem:
    """Construct a clamped B-spline basis with equispaced interior knots.

    Parameters
    ----------
    domain : tuple of float
        Interval ``(a, b)`` with ``a < b``.
    num_basis : int
        Number of basis functions; must satisfy ``num_basis >= order``.
    order : int
        Spline order, at least 1.

    Returns
    -------
    BasisSystem
    """
    a, b = float(domain[0]), float(domain[1])
    if not np.isfinite([a, b]).all() or a >= b:
        raise ValueError(f"domain must be a finite interval (a, b) with a < b, got ({a}, {b})")
    if order < 1:
        raise ValueError(f"order must be at least 1, got {order}")
    if num_basis < order:
        raise ValueError(f"num_basis must be at least order={order}, got {num_basis}")
    interior = np.linspace(a, b, num_basis - order + 2)[1:-1]
    knots = np.concatenate([np.full(order, a), interior, np.full(order, b)])
    return BasisSystem(domain=(a, b), num_basis=num_basis, order=order, knots=knots)


def evaluate_basis(system: BasisSystem, points: np.ndarray) -> np.ndarray:
    """Evaluate all basis functions at the given points.

    Returns an array of shape ``(len(points), num_basis)``.  Rows sum to
    one (partition of unity) and points outside the domain are rejected.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 1:
        raise ValueError(f"points must be one-dimensional, got shape {pts.shape}")
    if not np.isfinite(pts).all():
        raise ValueError("points must be finite")
    a, b = system.domain
    if (pts < a).any() or (pts > b).any():
        raise ValueError(f"points must lie within the domain [{a}, {b}]")
    mat = BSpline.design_matrix(pts, system.knots, system.order - 1,
                                extrapolate=False)
    return mat.toarray()


def gram_from_function(basis_fn: Callable[[np.ndarray], np.ndarray],
                       breakpoints: np.ndarray, num_points: int) -> np.ndarray:
    """Gram matrix of a generic basis by Gauss-Legendre panels.

    ``basis_fn`` maps points of shape ``(q,)`` to values of shape
    ``(q, K)``; integration runs over each panel between consecutive
    breakpoints with ``num_points`` nodes, so the result is exact for
    piecewise polynomials of degree below ``num_points`` on the panels.
    """
    bps = np.asarray(breakpoints, dtype=float)
    if bps.ndim != 1 or bps.size < 2 or (np.diff(bps) <= 0).any():
        raise ValueError("breakpoints must be strictly increasing with at least 2 entries")
    if num_points < 1:
        raise ValueError(f"num_points must be positive, got {num_points}")
    nodes, weights = leggauss(num_points)
    gram = None
    for lo, hi in zip(bps[:-1], bps[1:]):
        half = 0.5 * (hi - lo)
        vals = basis_fn(0.5 * (lo + hi) + half * nodes)
        contrib = (vals * (half * weights)[:, None]).T @ vals
        gram = contrib if gram is None else gram + contrib
    return 0.5 * (gram + gram.T)


def gram_matrix(system: BasisSystem) -> np.ndarray:
    """Gram matrix ``Psi[k, l] = int psi_k(t) psi_l(t) dt`` of the basis.

    Exact up to rounding: products of order-``o`` splines have polynomial
    degree ``2(o - 1)`` on each knot span, within reach of an ``o``-point
    Gauss rule.
    """
    return gram_from_function(lambda x: evaluate_basis(system, x),
                              np.unique(system.knots), system.order)


def _eigh_psd(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric PSD matrix with a negativity check."""
    sym = 0.5 * (mat + mat.T)
    evals, evecs = np.linalg.eigh(sym)
    top = max(float(evals[-1]), 0.0)
    if evals[0] < -1e-8 * max(top, 1.0):
        raise ValueError(f"matrix is not positive semidefinite: min eigenvalue {evals[0]:.3e}")
    return np.maximum(evals, 0.0), evecs


def sqrt_gram(psi: np.ndarray) -> np.ndarray:
    """Symmetric square root of a Gram matrix via eigendecomposition."""
    evals, evecs = _eigh_psd(np.asarray(psi, dtype=float))
    root = (evecs * np.sqrt(evals)) @ evecs.T
    return 0.5 * (root + root.T)


def inv_sqrt_gram(psi: np.ndarray) -> np.ndarray:
    """Pseudo-inverse square root; eigenvalues below 1e-12 of the largest are dropped."""
    evals, evecs = _eigh_psd(np.asarray(psi, dtype=float))
    cutoff = 1e-12 * max(float(evals[-1]), 0.0)
    inv = np.where(evals > cutoff, 1.0 / np.sqrt(np.maximum(evals, cutoff)), 0.0)
    root = (evecs * inv) @ evecs.T
    return 0.5 * (root + root.T)


def smooth_curves(values: np.ndarray, grid: np.ndarray,
                  system: BasisSystem) -> np.ndarray:
    """Least-squares basis coefficients for curves observed on a common grid.

    Parameters
    ----------
    values : ndarray of shape (n, J)
        One row per curve, sampled at the ``J`` grid points.
    grid : ndarray of shape (J,)
        Strictly increasing observation points inside the basis domain,
        with ``J >= num_basis``.
    system : BasisSystem

    Returns
    -------
    ndarray of shape (n, num_basis)
        Coefficient rows ``D`` minimizing ``||values - D B^T||`` where
        ``B`` is the basis evaluated on the grid.
    """
    vals = np.atleast_2d(np.asarray(values, dtype=float))
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or (np.diff(grid) <= 0).any():
        raise ValueError("grid must be strictly increasing")
    if vals.shape[1] != grid.size:
        raise ValueError(f"curves have {vals.shape[1]} columns but the grid has {grid.size} points")
    if not np.isfinite(vals).all():
        raise ValueError("curve values must be finite")
    if grid.size < system.num_basis:
        raise ValueError(f"need at least num_basis={system.num_basis} grid points, got {grid.size}")
    bmat = evaluate_basis(system, grid)
    coefs, _, rank, _ = np.linalg.lstsq(bmat, vals.T, rcond=None)
    if rank < system.num_basis:
        raise ValueError(f"collocation matrix is rank deficient ({rank} < {system.num_basis}); "
                         "use fewer basis functions or a denser grid")
    return coefs.T


@dataclass(frozen=True)
class MultiFunctionalDesign:
    """Basis representation of several functional predictors for one sample.

    Attributes
    ----------
    systems : tuple of BasisSystem
        One basis per predictor.
    D : ndarray of shape (n, p)
        Stacked coefficient rows, ``p = sum of num_basis``.
    Psi : ndarray of shape (p, p)
        Block-diagonal Gram matrix of the stacked basis.
    Psi_half, Psi_inv_half : ndarray of shape (p, p)
        Symmetric square root of ``Psi`` and its pseudo-inverse.
    A : ndarray of shape (n, p)
        Geometry-corrected design ``D @ Psi_half.T``; Euclidean inner
        products of its rows equal L2 inner products of the curves.
    """

    systems: tuple[BasisSystem, ...]
    D: np.ndarray
    Psi: np.ndarray
    Psi_half: np.ndarray
    Psi_inv_half: np.ndarray
    A: np.ndarray

    @property
    def n(self) -> int:
        return self.D.shape[0]

    @property
    def total_basis(self) -> int:
        return self.D.shape[1]

    def block_slices(self) -> list[slice]:
        """Column ranges of each predictor inside ``D`` / ``A``."""
        sizes = [s.num_basis for s in self.systems]
        offsets = np.concatenate([[0], np.cumsum(sizes)])
        return [slice(int(lo), int(hi)) for lo, hi in zip(offsets[:-1], offsets[1:])]

    def take(self, rows: np.ndarray) -> "MultiFunctionalDesign":
        """Row subset sharing the basis geometry."""
        rows = np.asarray(rows)
        return replace(self, D=self.D[rows], A=self.A[rows])


def build_design(curves: Sequence[np.ndarray], grids: Sequence[np.ndarray],
                 systems: Sequence[BasisSystem]) -> MultiFunctionalDesign:
    """Smooth every predictor and assemble the stacked design.

    Parameters
    ----------
    curves : sequence of ndarray
        ``curves[m]`` has shape ``(n, J_m)``; all predictors share ``n``.
    grids : sequence of ndarray
        ``grids[m]`` has shape ``(J_m,)``.
    systems : sequence of BasisSystem
        One basis per predictor.
    """
    if not (len(curves) == len(grids) == len(systems)) or len(curves) == 0:
        raise ValueError("curves, grids and systems must have equal nonzero length")
    blocks = []
    for m, (vals, grid, system) in enumerate(zip(curves, grids, systems)):
        coefs = smooth_curves(vals, grid, system)
        if blocks and coefs.shape[0] != blocks[0].shape[0]:
            raise ValueError(f"predictor {m + 1} has {coefs.shape[0]} curves but "
                             f"predictor 1 has {blocks[0].shape[0]}")
        blocks.append(coefs)
    D = np.hstack(blocks)
    grams = [gram_matrix(s) for s in systems]
    Psi = block_diag(*grams)
    Psi_half = block_diag(*[sqrt_gram(g) for g in grams])
    Psi_inv_half = block_diag(*[inv_sqrt_gram(g) for g in grams])
    A = D @ Psi_half.T
    return MultiFunctionalDesign(systems=tuple(systems), D=D, Psi=Psi,
                                 Psi_half=Psi_half, Psi_inv_half=Psi_inv_half, A=A)
