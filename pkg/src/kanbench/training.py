"""Losses, optimizers, and the fixed training protocol.

Every experiment trains for a fixed number of epochs (default 20) at a
fixed learning rate (default 0.05).  An epoch sweeps the training split in
seeded, shuffled mini-batches (default size 32, the convention of the
mainstream frameworks this protocol mirrors); batch_size=None selects a
single full-batch step per epoch, which consumes no randomness.  Either
way a run is a pure function of (initial network, data, config, rng).
Adam is the default optimizer; plain gradient descent is available via
TrainConfig.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .data import Dataset
from .errors import ConfigError, DataError, DivergenceError, ShapeError
from .network import Network
from .numerics import rng_derive

PROB_EPS = 1e-12  # probabilities are clamped to [PROB_EPS, 1 - PROB_EPS] before log


@dataclass
class TrainConfig:
    epochs: int = 20
    learning_rate: float = 0.05
    optimizer: str = "adam"  # "adam" | "gd"
    batch_size: Optional[int] = 32  # None = one full-batch step per epoch

    def validate(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate < 0:
            raise ConfigError(f"learning rate must be >= 0, got {self.learning_rate}")
        if self.optimizer not in ("adam", "gd"):
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")
        if self.batch_size is not None and self.batch_size < 1:
            raise ConfigError(f"batch size must be >= 1, got {self.batch_size}")


@dataclass
class TrainHistory:
    losses: list = field(default_factory=list)


def bce_loss(probs: np.ndarray, labels: np.ndarray):
    """Mean binary cross-entropy and its gradient w.r.t. probs.

    Probabilities are clamped away from {0, 1}; the gradient is that of the
    clamped surrogate, so it stays finite under saturation.
    """
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if probs.shape != labels.shape:
        raise ShapeError(f"probs shape {probs.shape} != labels shape {labels.shape}")
    n = probs.size
    p = np.clip(probs, PROB_EPS, 1.0 - PROB_EPS)
    loss = -np.mean(labels * np.log(p) + (1.0 - labels) * np.log(1.0 - p))
    d_probs = (-labels / p + (1.0 - labels) / (1.0 - p)) / n
    return float(loss), d_probs


def cce_loss(probs: np.ndarray, labels: np.ndarray):
    """Mean categorical cross-entropy and its gradient w.r.t. probs."""
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels)
    if probs.ndim != 2 or labels.shape != (probs.shape[0],):
        raise ShapeError(f"probs {probs.shape} incompatible with labels {labels.shape}")
    n, c = probs.shape
    if labels.min() < 0 or labels.max() >= c:
        raise DataError(f"labels outside [0, {c}): {labels.min()}..{labels.max()}")
    rows = np.arange(n)
    p_true = np.clip(probs[rows, labels], PROB_EPS, 1.0 - PROB_EPS)
    loss = -np.mean(np.log(p_true))
    d_probs = np.zeros_like(probs)
    d_probs[rows, labels] = -1.0 / (p_true * n)
    return float(loss), d_probs


class Adam:
    """Adam with bias correction (beta1=0.9, beta2=0.999, eps=1e-8)."""

    def __init__(self, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0
        self.m = None
        self.v = None

    def step(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        if self.m is None:
            self.m = np.zeros_like(params)
            self.v = np.zeros_like(params)
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grads
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grads**2
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        return params - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class GradientDescent:
    def __init__(self, lr):
        self.lr = lr

    def step(self, params, grads):
        return params - self.lr * grads


def make_optimizer(cfg: TrainConfig):
    return Adam(cfg.learning_rate) if cfg.optimizer == "adam" else GradientDescent(cfg.learning_rate)


def loss_for_head(net: Network):
    return bce_loss if net.config.head_kind == "sigmoid" else cce_loss


def train(net: Network, data: Dataset, cfg: TrainConfig, rng=None):
    """Seeded mini-batch (or full-batch) training; returns (net, TrainHistory).

    Mutates and returns ``net``.  ``rng`` drives the per-epoch shuffle when
    mini-batching; if omitted, a fixed stream is derived so the call stays
    deterministic.  The recorded per-epoch loss is the sample-weighted mean
    of that epoch's batch losses.  Raises DivergenceError (carrying the
    epoch, network, and losses so far) if any loss stops being finite.
    """
    cfg.validate()
    if data.n == 0:
        raise DataError("cannot train on an empty dataset")
    loss_fn = loss_for_head(net)
    labels = data.labels if net.config.head_kind == "softmax" else data.labels.astype(np.float64)
    opt = make_optimizer(cfg)
    params = net.flatten_params()
    history = TrainHistory()
    full_batch = cfg.batch_size is None or cfg.batch_size >= data.n
    if not full_batch and rng is None:
        rng = rng_derive(0, 0)
    for epoch in range(cfg.epochs):
        order = np.arange(data.n) if full_batch else rng.permutation(data.n)
        step = data.n if full_batch else cfg.batch_size
        epoch_loss = 0.0
        for start in range(0, data.n, step):
            idx = order[start : start + step]
            probs, cache = net.forward(data.features[idx])
            loss, d_probs = loss_fn(probs, labels[idx])
            if not np.isfinite(loss):
                raise DivergenceError(epoch, net, list(history.losses))
            epoch_loss += loss * len(idx)
            grads = net.backward(cache, d_probs).flat()
            params = opt.step(params, grads)
            net.set_flat_params(params)
        history.losses.append(epoch_loss / data.n)
    return net, history


def evaluate_accuracy(net: Network, data: Dataset) -> float:
    """Fraction of correct predictions.

    Binary: predicted class is 1 iff prob > 0.5 (exactly 0.5 counts as
    class 0).  Multi-class: argmax, ties broken toward the lowest index.
    """
    if data.n == 0:
        raise DataError("cannot evaluate on an empty dataset")
    probs, _ = net.forward(data.features)
    if probs.ndim == 1:
        pred = (probs > 0.5).astype(np.int64)
    else:
        pred = probs.argmax(axis=1)
    return float(np.mean(pred == data.labels))
