"""The experimental protocol as an engine.

One experiment = one (dataset, architecture, depth, spline config) cell,
repeated ``reps`` times.  Repetition r derives its own split stream
(master_seed, 2r) and init stream (master_seed, 2r+1), so any repetition
can be replayed in isolation and repetitions can run in parallel without
changing the results.  Synthetic datasets are generated once per
experiment from the reserved stream id DATASET_STREAM_ID, so runs sharing
a master seed (e.g. the MLP and KAN sides of one figure) see identical
data and identical splits.

Divergent training (non-finite loss) is recorded on the repetition and the
model is still evaluated; failures are findings, not aborts.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .data import (
    Dataset,
    gen_printer_like,
    gen_two_cluster,
    load_csv,
    standardize_fit_apply,
    stratified_split,
)
from .errors import ConfigError, DivergenceError, UsageError
from .network import NetworkConfig, init_network
from .numerics import rng_derive
from .training import TrainConfig, evaluate_accuracy, train

RESULTS_SCHEMA_VERSION = 1
DATASET_STREAM_ID = 2**31 - 1  # reserved; collides with a rep stream only past 2^30 reps
SYNTHETIC_SIZES = {"synthetic-a": 1000, "synthetic-b": 100}


@dataclass(frozen=True)
class DatasetRef:
    """Where an experiment's data comes from."""

    kind: str  # "synthetic-a" | "synthetic-b" | "printer-like" | "csv"
    path: Optional[str] = None
    schema: Optional[str] = None

    def describe(self) -> str:
        if self.kind == "csv":
            return f"csv:{self.schema}:{self.path}"
        return self.kind


@dataclass(frozen=True)
class ExperimentSpec:
    dataset: DatasetRef
    arch: str
    depth: int
    width: int = 2
    grid_size: int = 3
    spline_order: int = 3
    reps: int = 25
    test_frac: float = 0.3
    train: TrainConfig = field(default_factory=TrainConfig)
    master_seed: int = 0
    standardize: bool = True

    def validate(self):
        if self.reps < 1:
            raise ConfigError(f"reps must be >= 1, got {self.reps}")
        if self.depth < 1:
            raise ConfigError(f"depth must be >= 1, got {self.depth}")
        if self.arch not in ("mlp", "kan"):
            raise ConfigError(f"unknown architecture {self.arch!r}")
        self.train.validate()


@dataclass
class RepetitionResult:
    rep_index: int
    split_seed: int
    init_seed: int
    test_accuracy: float
    param_count: int
    final_train_loss: Optional[float]
    wall_time_ms: float
    diverged: bool = False


@dataclass
class Summary:
    median: float
    minimum: float
    maximum: float
    mean: float
    std: float


@dataclass
class ExperimentRun:
    spec: ExperimentSpec
    results: list
    summary: Summary


def resolve_dataset(ref: DatasetRef, master_seed: int) -> Dataset:
    """Materialize the experiment's dataset (synthetic data is seeded)."""
    if ref.kind in SYNTHETIC_SIZES:
        return gen_two_cluster(SYNTHETIC_SIZES[ref.kind], rng_derive(master_seed, DATASET_STREAM_ID))
    if ref.kind == "printer-like":
        return gen_printer_like(rng_derive(master_seed, DATASET_STREAM_ID))
    if ref.kind == "csv":
        return load_csv(ref.path, ref.schema)
    raise ConfigError(f"unknown dataset reference {ref.kind!r}")


def network_config_for(spec: ExperimentSpec, data: Dataset) -> NetworkConfig:
    return NetworkConfig(
        arch=spec.arch,
        input_dim=data.dim,
        hidden_widths=[spec.width] * spec.depth,
        n_classes=data.class_count,
        grid_size=spec.grid_size,
        spline_order=spec.spline_order,
    )


def run_repetition(spec: ExperimentSpec, data: Dataset, rep: int) -> RepetitionResult:
    """One split -> standardize -> init -> train -> evaluate cycle."""
    split_sid, init_sid = 2 * rep, 2 * rep + 1
    pair = stratified_split(data, spec.test_frac, rng_derive(spec.master_seed, split_sid), split_sid)
    if spec.standardize:
        pair = standardize_fit_apply(pair)
    init_rng = rng_derive(spec.master_seed, init_sid)
    net = init_network(network_config_for(spec, data), init_rng)
    started = time.perf_counter()
    diverged = False
    final_loss: Optional[float]
    try:
        # the init stream keeps flowing into the batch shuffle, so one stream
        # id captures all of a repetition's training stochasticity
        net, history = train(net, pair.train, spec.train, init_rng)
        final_loss = history.losses[-1]
    except DivergenceError as err:
        net = err.network
        final_loss = err.losses[-1] if err.losses else None
        diverged = True
    accuracy = evaluate_accuracy(net, pair.test)
    wall_ms = (time.perf_counter() - started) * 1000.0
    return RepetitionResult(
        rep_index=rep,
        split_seed=split_sid,
        init_seed=init_sid,
        test_accuracy=accuracy,
        param_count=net.param_count(),
        final_train_loss=final_loss,
        wall_time_ms=wall_ms,
        diverged=diverged,
    )


def _rep_star(args):
    return run_repetition(*args)


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> ExperimentRun:
    """All repetitions of one spec; parallel execution changes nothing."""
    spec.validate()
    data = resolve_dataset(spec.dataset, spec.master_seed)
    tasks = [(spec, data, rep) for rep in range(spec.reps)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_rep_star, tasks))
    else:
        results = [run_repetition(*t) for t in tasks]
    results.sort(key=lambda r: r.rep_index)
    return ExperimentRun(spec, results, summarize(results))


def depth_sweep(base: ExperimentSpec, depths, jobs: int = 1) -> dict:
    """run_experiment per depth; all depths share the base master seed."""
    if not depths:
        raise ConfigError("depth sweep needs at least one depth")
    return {d: run_experiment(replace(base, depth=d), jobs) for d in depths}


def order_sweep(base: ExperimentSpec, orders, jobs: int = 1) -> dict:
    """run_experiment per spline order (KAN only, the paper's depth-2 setup)."""
    if base.arch != "kan":
        raise ConfigError("order sweep applies to the kan architecture only")
    if not orders:
        raise ConfigError("order sweep needs at least one order")
    return {k: run_experiment(replace(base, spline_order=k), jobs) for k in orders}


def summarize(results) -> Summary:
    """Order statistics of test accuracy; even-count median is the midpoint."""
    if len(results) == 0:
        raise UsageError("cannot summarize zero results")
    acc = np.array([getattr(r, "test_accuracy", r) for r in results], dtype=np.float64)
    return Summary(
        median=float(np.median(acc)),
        minimum=float(acc.min()),
        maximum=float(acc.max()),
        mean=float(acc.mean()),
        std=float(acc.std()),
    )


# -- export / import ----------------------------------------------------------


def _spec_dict(spec: ExperimentSpec) -> dict:
    return {
        "dataset": spec.dataset.describe(),
        "arch": spec.arch,
        "depth": spec.depth,
        "width": spec.width,
        "grid_size": spec.grid_size,
        "spline_order": spec.spline_order,
        "reps": spec.reps,
        "test_frac": spec.test_frac,
        "epochs": spec.train.epochs,
        "learning_rate": spec.train.learning_rate,
        "optimizer": spec.train.optimizer,
        "batch_size": spec.train.batch_size,
        "master_seed": spec.master_seed,
        "standardize": spec.standardize,
    }


def _result_dict(r: RepetitionResult) -> dict:
    return {
        "rep_index": r.rep_index,
        "split_seed": r.split_seed,
        "init_seed": r.init_seed,
        "test_accuracy": r.test_accuracy,
        "param_count": r.param_count,
        "final_train_loss": r.final_train_loss,
        "wall_time_ms": r.wall_time_ms,
        "diverged": r.diverged,
    }


def runs_to_document(runs) -> dict:
    return {
        "schema_version": RESULTS_SCHEMA_VERSION,
        "runs": [
            {
                "spec": _spec_dict(run.spec),
                "results": [_result_dict(r) for r in run.results],
                "summary": {
                    "median": run.summary.median,
                    "min": run.summary.minimum,
                    "max": run.summary.maximum,
                    "mean": run.summary.mean,
                    "std": run.summary.std,
                },
            }
            for run in runs
        ],
    }


def export_results(runs, path, format: str = "json"):
    """Write runs as versioned JSON or flat per-repetition CSV."""
    if format == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(runs_to_document(runs), fh, indent=2)
            fh.write("\n")
    elif format == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["experiment", "arch", "depth", "width", "grid", "order", "rep", "accuracy", "param_count"]
            )
            for run in runs:
                s = run.spec
                for r in run.results:
                    writer.writerow(
                        [
                            s.dataset.describe(),
                            s.arch,
                            s.depth,
                            s.width,
                            s.grid_size,
                            s.spline_order,
                            r.rep_index,
                            repr(r.test_accuracy),
                            r.param_count,
                        ]
                    )
    else:
        raise ConfigError(f"unknown export format {format!r}")


def load_results_document(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("schema_version")
    if version != RESULTS_SCHEMA_VERSION:
        raise ConfigError(
            f"results schema version mismatch: expected {RESULTS_SCHEMA_VERSION}, found {version}"
        )
    return doc
