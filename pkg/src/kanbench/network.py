"""Layer stacks for both architectures, with exact reverse-mode gradients.

Two architectures share one Network container:

* ``mlp`` -- dense hidden layers where neuron i applies SiLU with its own
  trainable beta_i, followed by a plain linear head.
* ``kan`` -- layers whose every edge carries w_b * SiLU(x) + w_s * spline(x)
  on a grid shared across the layer; nodes only sum incoming edges.  The
  head is one more KAN layer.

The head output goes through sigmoid (binary, one unit) or softmax
(multi-class, one unit per class).  Batches are row-major: X is (n, D),
weight matrices are (n_out, n_in), so a layer computes X @ W.T + b.

Parameters flatten to a single vector in a fixed order: hidden layers first,
then the head.  Within a dense layer: W row-major, then b, then beta (the
head has no beta).  Within a KAN layer: edges row-major over (output node,
input node), each edge contributing (w_b, w_s, coefficients).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .activations import KanEdge, sigmoid, silu, silu_grad, softmax
from .bspline import SplineGrid, basis_derivative_matrix, basis_matrix, make_grid
from .errors import ConfigError, ShapeError, UsageError
from .numerics import RngStream

FORMAT_VERSION = 1
DEFAULT_SPLINE_DOMAIN = (-1.0, 1.0)


@dataclass
class NetworkConfig:
    """Architecture description consumed by init_network / param counting."""

    arch: str  # "mlp" | "kan"
    input_dim: int
    hidden_widths: list
    n_classes: int = 2
    grid_size: int = 3
    spline_order: int = 3
    spline_domain: tuple = DEFAULT_SPLINE_DOMAIN
    # Default binary head is one sigmoid unit for both architectures; set
    # True to give a binary KAN a 2-unit softmax head instead.
    kan_binary_softmax: bool = False

    def validate(self):
        if self.arch not in ("mlp", "kan"):
            raise ConfigError(f"unknown architecture {self.arch!r}")
        if self.input_dim < 1:
            raise ConfigError(f"input_dim must be >= 1, got {self.input_dim}")
        if len(self.hidden_widths) < 1 or any(w < 1 for w in self.hidden_widths):
            raise ConfigError(f"bad hidden widths {self.hidden_widths}")
        if self.n_classes < 2:
            raise ConfigError(f"need at least 2 classes, got {self.n_classes}")

    @property
    def head_units(self) -> int:
        if self.n_classes == 2 and not (self.arch == "kan" and self.kan_binary_softmax):
            return 1
        return self.n_classes

    @property
    def head_kind(self) -> str:
        return "sigmoid" if self.head_units == 1 else "softmax"


class DenseSiLULayer:
    """W x + b followed by per-neuron SiLU(.; beta_i)."""

    def __init__(self, W: np.ndarray, b: np.ndarray, beta: np.ndarray):
        self.W = np.asarray(W, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.beta = np.asarray(beta, dtype=np.float64)
        if self.beta.shape != (self.W.shape[0],) or self.b.shape != (self.W.shape[0],):
            raise ShapeError("b and beta must have one entry per output neuron")

    n_params = property(lambda self: self.W.size + self.b.size + self.beta.size)

    def forward(self, X):
        Z = X @ self.W.T + self.b
        return silu(Z, self.beta), (X, Z)

    def backward(self, dA, cache):
        X, Z = cache
        dz_local, dbeta_local = silu_grad(Z, self.beta)
        dZ = dA * dz_local
        grads = {
            "W": dZ.T @ X,
            "b": dZ.sum(axis=0),
            "beta": (dA * dbeta_local).sum(axis=0),
        }
        return dZ @ self.W, grads

    def flat_params(self):
        return np.concatenate([self.W.ravel(), self.b, self.beta])

    def set_flat_params(self, vec):
        w, rest = np.split(vec, [self.W.size])
        self.W = w.reshape(self.W.shape)
        self.b, self.beta = np.split(rest, [self.b.size])


class LinearLayer:
    """Plain affine map; the MLP head before sigmoid/softmax."""

    def __init__(self, W: np.ndarray, b: np.ndarray):
        self.W = np.asarray(W, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)

    n_params = property(lambda self: self.W.size + self.b.size)

    def forward(self, X):
        return X @ self.W.T + self.b, (X,)

    def backward(self, dZ, cache):
        (X,) = cache
        return dZ @ self.W, {"W": dZ.T @ X, "b": dZ.sum(axis=0)}

    def flat_params(self):
        return np.concatenate([self.W.ravel(), self.b])

    def set_flat_params(self, vec):
        w, b = np.split(vec, [self.W.size])
        self.W = w.reshape(self.W.shape)
        self.b = b


class KanLayer:
    """Matrix of spline-edge activations; output node j sums its edges."""

    def __init__(self, grid: SplineGrid, w_b: np.ndarray, w_s: np.ndarray, coeffs: np.ndarray):
        self.grid = grid
        self.w_b = np.asarray(w_b, dtype=np.float64)
        self.w_s = np.asarray(w_s, dtype=np.float64)
        self.coeffs = np.asarray(coeffs, dtype=np.float64)
        n_out, n_in = self.w_b.shape
        if self.coeffs.shape != (n_out, n_in, grid.basis_count):
            raise ShapeError(
                f"coefficient block {self.coeffs.shape} does not match "
                f"({n_out}, {n_in}, {grid.basis_count})"
            )

    n_params = property(lambda self: self.w_b.size + self.w_s.size + self.coeffs.size)

    def edge(self, j: int, i: int) -> KanEdge:
        """The (output j, input i) connection as a standalone edge."""
        return KanEdge(float(self.w_b[j, i]), float(self.w_s[j, i]), self.coeffs[j, i].copy())

    def forward(self, X):
        n, n_in = X.shape
        S = silu(X, 1.0)
        B = basis_matrix(self.grid, X.ravel()).reshape(n, n_in, -1)
        # per-edge spline values: (n, n_out, n_in)
        edge_spline = np.einsum("nim,jim->nji", B, self.coeffs)
        Y = S @ self.w_b.T + np.einsum("nji,ji->nj", edge_spline, self.w_s)
        return Y, (X, S, B, edge_spline)

    def backward(self, dY, cache):
        X, S, B, edge_spline = cache
        n, n_in = X.shape
        grads = {
            "w_b": dY.T @ S,
            "w_s": np.einsum("nj,nji->ji", dY, edge_spline),
            "coeffs": self.w_s[:, :, None] * np.einsum("nj,nim->jim", dY, B),
        }
        dsilu, _ = silu_grad(X, 1.0)
        dB = basis_derivative_matrix(self.grid, X.ravel()).reshape(n, n_in, -1)
        edge_spline_dx = np.einsum("nim,jim->nji", dB, self.coeffs)
        dX = dsilu * (dY @ self.w_b) + np.einsum("nj,nji,ji->ni", dY, edge_spline_dx, self.w_s)
        return dX, grads

    def flat_params(self):
        # row-major over edges, each contributing (w_b, w_s, coeffs)
        per_edge = np.concatenate(
            [self.w_b[:, :, None], self.w_s[:, :, None], self.coeffs], axis=2
        )
        return per_edge.ravel()

    def set_flat_params(self, vec):
        n_out, n_in = self.w_b.shape
        per_edge = vec.reshape(n_out, n_in, 2 + self.grid.basis_count)
        self.w_b = np.ascontiguousarray(per_edge[:, :, 0])
        self.w_s = np.ascontiguousarray(per_edge[:, :, 1])
        self.coeffs = np.ascontiguousarray(per_edge[:, :, 2:])


@dataclass
class GradientBundle:
    """Per-layer gradients in network order, plus the input gradient."""

    layer_grads: list
    d_input: np.ndarray
    _order: list = field(repr=False)

    def flat(self) -> np.ndarray:
        """Concatenate all gradients in flatten_params order."""
        parts = []
        for grads, keys in zip(self.layer_grads, self._order):
            if "coeffs" in grads:  # KAN layer: interleave per edge
                parts.append(
                    np.concatenate(
                        [grads["w_b"][:, :, None], grads["w_s"][:, :, None], grads["coeffs"]],
                        axis=2,
                    ).ravel()
                )
            else:
                parts.append(np.concatenate([grads[k].ravel() for k in keys]))
        return np.concatenate(parts)


class Network:
    """Ordered layer stack plus output head for either architecture."""

    def __init__(self, config: NetworkConfig, layers: list, head):
        self.config = config
        self.layers = layers
        self.head = head

    @property
    def arch(self):
        return self.config.arch

    # -- forward / backward -------------------------------------------------

    def forward(self, X):
        """Returns (probs, cache); probs is (n,) binary or (n, C) multiclass."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.config.input_dim:
            raise ShapeError(
                f"expected input of shape (n, {self.config.input_dim}), got {X.shape}"
            )
        caches = []
        h = X
        for layer in self.layers:
            h, c = layer.forward(h)
            caches.append(c)
        logits, head_cache = self.head.forward(h)
        if self.config.head_kind == "sigmoid":
            probs = sigmoid(logits[:, 0])
        else:
            probs = softmax(logits)
        cache = {"owner": self, "caches": caches, "head": head_cache, "probs": probs}
        return probs, cache

    def backward(self, cache, d_probs) -> GradientBundle:
        """Exact gradients of a scalar loss given its gradient w.r.t. probs."""
        if cache.get("owner") is not self:
            raise UsageError("backward called with a cache from a different network")
        probs = cache["probs"]
        d_probs = np.asarray(d_probs, dtype=np.float64)
        if d_probs.shape != probs.shape:
            raise UsageError(
                f"upstream gradient shape {d_probs.shape} does not match probs {probs.shape}"
            )
        if self.config.head_kind == "sigmoid":
            dlogits = (d_probs * probs * (1.0 - probs))[:, None]
        else:
            inner = (d_probs * probs).sum(axis=1, keepdims=True)
            dlogits = probs * (d_probs - inner)

        d_h, head_grads = self.head.backward(dlogits, cache["head"])
        rev = []
        for layer, c in zip(reversed(self.layers), reversed(cache["caches"])):
            d_h, grads = layer.backward(d_h, c)
            rev.append(grads)
        layer_grads = list(reversed(rev)) + [head_grads]
        order = [_param_keys(l) for l in self.layers] + [_param_keys(self.head)]
        return GradientBundle(layer_grads, d_h, order)

    # -- parameter plumbing --------------------------------------------------

    def _all_layers(self):
        return [*self.layers, self.head]

    def param_count(self) -> int:
        return int(sum(l.n_params for l in self._all_layers()))

    def flatten_params(self) -> np.ndarray:
        return np.concatenate([l.flat_params() for l in self._all_layers()])

    def set_flat_params(self, vec: np.ndarray):
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (self.param_count(),):
            raise ShapeError(
                f"parameter vector has shape {vec.shape}, expected ({self.param_count()},)"
            )
        pos = 0
        for layer in self._all_layers():
            n = layer.n_params
            layer.set_flat_params(vec[pos : pos + n].copy())
            pos += n
        return self

    def clone(self) -> "Network":
        fresh = build_network(self.config)
        fresh.set_flat_params(self.flatten_params())
        return fresh

    # -- serialization ---------------------------------------------------------

    def to_json_dict(self) -> dict:
        c = self.config
        return {
            "format_version": FORMAT_VERSION,
            "arch": c.arch,
            "input_dim": c.input_dim,
            "hidden_widths": list(c.hidden_widths),
            "n_classes": c.n_classes,
            "head": c.head_kind,
            "grid_size": c.grid_size,
            "spline_order": c.spline_order,
            "spline_domain": list(c.spline_domain),
            "kan_binary_softmax": c.kan_binary_softmax,
            "params": self.flatten_params().tolist(),
        }

    def save_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh)
            fh.write("\n")


def network_from_json_dict(doc: dict) -> Network:
    if doc.get("format_version") != FORMAT_VERSION:
        raise ConfigError(
            f"network document version {doc.get('format_version')!r}, "
            f"expected {FORMAT_VERSION}"
        )
    config = NetworkConfig(
        arch=doc["arch"],
        input_dim=doc["input_dim"],
        hidden_widths=list(doc["hidden_widths"]),
        n_classes=doc["n_classes"],
        grid_size=doc["grid_size"],
        spline_order=doc["spline_order"],
        spline_domain=tuple(doc["spline_domain"]),
        kan_binary_softmax=doc.get("kan_binary_softmax", False),
    )
    net = build_network(config)
    return net.set_flat_params(np.asarray(doc["params"], dtype=np.float64))


def load_network_json(path) -> Network:
    with open(path, encoding="utf-8") as fh:
        return network_from_json_dict(json.load(fh))


def _param_keys(layer):
    if isinstance(layer, DenseSiLULayer):
        return ("W", "b", "beta")
    if isinstance(layer, KanLayer):
        return ("w_b", "w_s", "coeffs")
    return ("W", "b")


def _dims(config: NetworkConfig):
    return [config.input_dim, *config.hidden_widths, config.head_units]


def build_network(config: NetworkConfig) -> Network:
    """Allocate a network with zero parameters (betas/w_s included)."""
    config.validate()
    dims = _dims(config)
    if config.arch == "mlp":
        layers = [
            DenseSiLULayer(np.zeros((o, i)), np.zeros(o), np.zeros(o))
            for i, o in zip(dims[:-2], dims[1:-1])
        ]
        head = LinearLayer(np.zeros((dims[-1], dims[-2])), np.zeros(dims[-1]))
    else:
        grid = make_grid(*config.spline_domain, config.grid_size, config.spline_order)
        m = grid.basis_count
        layers = [
            KanLayer(grid, np.zeros((o, i)), np.zeros((o, i)), np.zeros((o, i, m)))
            for i, o in zip(dims[:-2], dims[1:-1])
        ]
        head = KanLayer(
            grid,
            np.zeros((dims[-1], dims[-2])),
            np.zeros((dims[-1], dims[-2])),
            np.zeros((dims[-1], dims[-2], m)),
        )
    return Network(config, layers, head)


def init_network(config: NetworkConfig, rng: RngStream) -> Network:
    """Seeded initialization.

    MLP: W ~ Glorot-uniform, b = 0, beta = 1.  KAN: w_b ~ Glorot-uniform,
    w_s = 1, spline coefficients ~ N(0, 0.1^2).
    """
    net = build_network(config)
    for layer in net._all_layers():
        if isinstance(layer, (DenseSiLULayer, LinearLayer)):
            n_out, n_in = layer.W.shape
            bound = np.sqrt(6.0 / (n_in + n_out))
            layer.W = rng.uniform(-bound, bound, size=(n_out, n_in))
            if isinstance(layer, DenseSiLULayer):
                layer.beta = np.ones(n_out)
        else:
            n_out, n_in = layer.w_b.shape
            bound = np.sqrt(6.0 / (n_in + n_out))
            layer.w_b = rng.uniform(-bound, bound, size=(n_out, n_in))
            layer.w_s = np.ones((n_out, n_in))
            layer.coeffs = 0.1 * rng.standard_normal((n_out, n_in, layer.grid.basis_count))
    return net


def param_count_for(config: NetworkConfig) -> int:
    """Closed-form learnable-parameter count for a configuration.

    MLP: each hidden layer has N_in*N_out weights + N_out biases + N_out
    betas; the head has weights + biases only.  KAN: every layer (head
    included) has N_in*N_out edges, each holding w_b, w_s and G+k spline
    coefficients, with no node biases.
    """
    config.validate()
    dims = _dims(config)
    if config.arch == "mlp":
        hidden = sum(i * o + 2 * o for i, o in zip(dims[:-2], dims[1:-1]))
        return hidden + dims[-2] * dims[-1] + dims[-1]
    per_edge = config.grid_size + config.spline_order + 2
    return sum(i * o for i, o in zip(dims[:-1], dims[1:])) * per_edge
