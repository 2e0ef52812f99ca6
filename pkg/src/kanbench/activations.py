"""Scalar activations with analytic gradients, and the KAN edge activation.

The parameterized SiLU z/(1+exp(-beta*z)) is the hidden-neuron activation
of the MLP architecture (one trainable beta per neuron).  KAN edges use the
fixed-beta=1 SiLU plus a weighted B-spline; the edge can equivalently be
written as a weight row times a nonlinear feature vector, which
``kan_edge_feature_form`` exposes and the tests hold equal to the direct
evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bspline import SplineGrid, basis_eval, spline_eval
from .errors import ShapeError


def sigmoid(z):
    """Logistic function, overflow-safe for any finite argument."""
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(-np.abs(z))
    out = np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return float(out) if out.ndim == 0 else out


def silu(z, beta=1.0):
    """Parameterized SiLU: z * sigmoid(beta * z)."""
    z = np.asarray(z, dtype=np.float64)
    out = z * sigmoid(np.asarray(beta) * z)
    return float(out) if out.ndim == 0 else out


def silu_grad(z, beta):
    """Partials of silu(z, beta): returns (d/dz, d/dbeta).

    With s = sigmoid(beta*z): d/dz = s + beta*z*s*(1-s), d/dbeta = z^2*s*(1-s).
    """
    z = np.asarray(z, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    s = sigmoid(beta * z)
    bump = s * (1.0 - s)
    d_z = s + beta * z * bump
    d_beta = z * z * bump
    if d_z.ndim == 0:
        return float(d_z), float(d_beta)
    return d_z, d_beta


def softmax(z):
    """Row-wise softmax of a (C,) vector or (n, C) matrix, max-shifted."""
    z = np.asarray(z, dtype=np.float64)
    if z.size == 0:
        raise ShapeError("softmax of an empty input")
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


@dataclass
class KanEdge:
    """One KAN connection: SiLU weight, spline weight, spline coefficients."""

    w_b: float
    w_s: float
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)


def kan_edge_eval(edge: KanEdge, grid: SplineGrid, x: float) -> float:
    """w_b * SiLU(x) + w_s * spline(x); the SiLU term sees the raw input."""
    _check_edge(edge, grid)
    return edge.w_b * silu(x, 1.0) + edge.w_s * spline_eval(grid, edge.coeffs, x)


def kan_edge_feature_form(edge: KanEdge, grid: SplineGrid, x: float):
    """The same edge as (weights, features) with equal dot product.

    weights = (w_b, w_s*c_1, ..., w_s*c_M); features = (SiLU(x), B_1(x), ..., B_M(x)).
    """
    _check_edge(edge, grid)
    weights = np.concatenate(([edge.w_b], edge.w_s * edge.coeffs))
    features = np.concatenate(([silu(x, 1.0)], basis_eval(grid, x)))
    return weights, features


def _check_edge(edge: KanEdge, grid: SplineGrid):
    if edge.coeffs.shape != (grid.basis_count,):
        raise ShapeError(
            f"edge has {edge.coeffs.shape} coefficients, grid expects ({grid.basis_count},)"
        )
