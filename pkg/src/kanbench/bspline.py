"""Uniform B-spline grids and Cox-de Boor basis evaluation.

A grid with G intervals and order k spans [domain_min, domain_max] with
G+1 equally spaced interior knots, extended by k uniformly spaced knots
beyond each end (G+2k+1 knots total), which yields G+k basis functions.

Query points outside the domain are clamped to the nearest boundary before
basis evaluation, and the basis derivative is defined as zero strictly
outside the domain.  This keeps spline edge activations total functions of
unbounded layer outputs: beyond the grid the spline term is frozen at its
boundary value and contributes no input gradient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError


@dataclass(frozen=True)
class SplineGrid:
    """Knot layout shared by every spline edge of a KAN layer."""

    domain_min: float
    domain_max: float
    intervals: int
    order: int
    knots: np.ndarray = field(repr=False)

    @property
    def basis_count(self) -> int:
        return self.intervals + self.order


def make_grid(domain_min: float, domain_max: float, intervals: int, order: int) -> SplineGrid:
    """Build a uniform grid; raises ConfigError on invalid sizes or domain."""
    if intervals < 1:
        raise ConfigError(f"grid intervals must be >= 1, got {intervals}")
    if order < 1:
        raise ConfigError(f"spline order must be >= 1, got {order}")
    if not domain_min < domain_max:
        raise ConfigError(f"invalid spline domain [{domain_min}, {domain_max}]")
    h = (domain_max - domain_min) / intervals
    knots = domain_min + h * np.arange(-order, intervals + order + 1, dtype=np.float64)
    knots.setflags(write=False)
    return SplineGrid(float(domain_min), float(domain_max), int(intervals), int(order), knots)


def _clamp(grid: SplineGrid, x: np.ndarray) -> np.ndarray:
    return np.clip(x, grid.domain_min, grid.domain_max)


def _raw_basis(knots: np.ndarray, degree: int, x: np.ndarray) -> np.ndarray:
    """Cox-de Boor recursion for all degree-`degree` bases at points x.

    x must already lie inside [knots[degree], knots[-degree-1]].  Returns an
    array of shape (len(x), len(knots) - degree - 1).
    """
    t = knots
    xc = x[:, None]
    # Degree 0: half-open span indicators.  At the right domain boundary the
    # mass sits on the span just outside the domain; the recursion folds it
    # back into the last in-domain basis by continuity.
    b = ((xc >= t[:-1]) & (xc < t[1:])).astype(np.float64)
    for d in range(1, degree + 1):
        left = (xc - t[: -(d + 1)]) / (t[d:-1] - t[: -(d + 1)]) * b[:, :-1]
        right = (t[d + 1 :] - xc) / (t[d + 1 :] - t[1:-d]) * b[:, 1:]
        b = left + right
    return b


def basis_matrix(grid: SplineGrid, x: np.ndarray) -> np.ndarray:
    """Evaluate all G+k basis functions at each point of a 1-D array.

    Points are clamped to the grid domain.  Shape: (len(x), G+k).
    """
    x = np.asarray(x, dtype=np.float64)
    return _raw_basis(grid.knots, grid.order, _clamp(grid, x.ravel()))


def basis_derivative_matrix(grid: SplineGrid, x: np.ndarray) -> np.ndarray:
    """d/dx of every basis function; zero rows for points outside the domain."""
    x = np.asarray(x, dtype=np.float64).ravel()
    clamped = _clamp(grid, x)
    t, k = grid.knots, grid.order
    lower = _raw_basis(t, k - 1, clamped)  # (n, G+k+1)
    d1 = t[k:-1] - t[: -k - 1]
    d2 = t[k + 1 :] - t[1:-k]
    deriv = k * (lower[:, :-1] / d1 - lower[:, 1:] / d2)
    outside = (x < grid.domain_min) | (x > grid.domain_max)
    deriv[outside] = 0.0
    return deriv


def basis_eval(grid: SplineGrid, x: float) -> np.ndarray:
    """Basis values at a single point (clamped to the domain)."""
    return basis_matrix(grid, np.array([x]))[0]


def basis_eval_derivative(grid: SplineGrid, x: float) -> np.ndarray:
    """Basis derivatives at a single point; zero vector beyond the domain."""
    return basis_derivative_matrix(grid, np.array([x]))[0]


def spline_eval(grid: SplineGrid, coeffs: np.ndarray, x: float) -> float:
    """Sum of coefficients times basis values at x."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape != (grid.basis_count,):
        raise ShapeError(
            f"expected {grid.basis_count} spline coefficients, got shape {coeffs.shape}"
        )
    return float(coeffs @ basis_eval(grid, x))
