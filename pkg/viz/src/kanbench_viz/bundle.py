"""Parsing of kanbench result exports into plot-ready groups.

The benchmark writes either a versioned JSON document

    {"schema_version": 1,
     "runs": [{"spec": {...}, "results": [...], "summary": {...}}, ...]}

or a flat CSV with columns
experiment,arch,depth,width,grid,order,rep,accuracy,param_count.

A bundle holds one group per run: its label, repetition accuracies, the
parameter count, and the exported median when the source carries one (the
CSV export does not; the midpoint median of the accuracies is used then,
which is the same statistic the benchmark exports).  Groups are keyed by
(arch, depth) for depth sweeps; if every run shares arch and depth but the
spline order varies, the sweep is keyed by order instead.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Optional

EXPECTED_SCHEMA_VERSION = 1
CSV_HEADER = ["experiment", "arch", "depth", "width", "grid", "order", "rep",
              "accuracy", "param_count"]


class BundleError(ValueError):
    """A results file is missing, malformed, or has the wrong schema."""


@dataclass
class ResultGroup:
    arch: str
    depth: int
    order: int
    accuracies: list
    param_count: int
    median: Optional[float] = None

    def tick_median(self) -> float:
        """Exported median when present, else the same midpoint rule."""
        if self.median is not None:
            return self.median
        ordered = sorted(self.accuracies)
        n = len(ordered)
        mid = n // 2
        return ordered[mid] if n % 2 else (ordered[mid - 1] + ordered[mid]) / 2.0

    def key(self, by_order: bool) -> str:
        return f"order {self.order}" if by_order else f"{self.arch} depth {self.depth}"


@dataclass
class ResultBundle:
    groups: list = field(default_factory=list)

    @property
    def keyed_by_order(self) -> bool:
        archs = {g.arch for g in self.groups}
        depths = {g.depth for g in self.groups}
        orders = {g.order for g in self.groups}
        return len(archs) == 1 and len(depths) == 1 and len(orders) > 1

    def labels(self) -> list:
        by_order = self.keyed_by_order
        return [g.key(by_order) for g in self.groups]


def _check_accuracies(values, where):
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise BundleError(f"{where}: accuracy {v} outside [0, 1]")


def _groups_from_json(path) -> list:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as err:
        raise BundleError(f"{path}: not valid JSON ({err})")
    version = doc.get("schema_version")
    if version != EXPECTED_SCHEMA_VERSION:
        raise BundleError(
            f"{path}: schema version mismatch, expected {EXPECTED_SCHEMA_VERSION}, "
            f"found {version}"
        )
    groups = []
    for run in doc.get("runs", []):
        spec, results = run["spec"], run["results"]
        accuracies = [r["test_accuracy"] for r in results]
        _check_accuracies(accuracies, path)
        counts = {r["param_count"] for r in results}
        if len(counts) != 1:
            raise BundleError(f"{path}: inconsistent param_count within one run: {counts}")
        groups.append(
            ResultGroup(
                arch=spec["arch"],
                depth=int(spec["depth"]),
                order=int(spec["spline_order"]),
                accuracies=accuracies,
                param_count=counts.pop(),
                median=run["summary"]["median"],
            )
        )
    return groups


def _groups_from_csv(path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise BundleError(f"{path}: empty file")
        if header != CSV_HEADER:
            raise BundleError(f"{path}: unexpected CSV header {header}")
        by_key = {}
        for row in reader:
            if not row:
                continue
            experiment, arch, depth, _width, _grid, order, _rep, accuracy, count = row
            key = (experiment, arch, int(depth), int(order))
            group = by_key.get(key)
            if group is None:
                group = by_key[key] = ResultGroup(
                    arch=arch, depth=int(depth), order=int(order),
                    accuracies=[], param_count=int(count),
                )
            if int(count) != group.param_count:
                raise BundleError(f"{path}: inconsistent param_count for {key}")
            group.accuracies.append(float(accuracy))
        for group in by_key.values():
            _check_accuracies(group.accuracies, path)
    return list(by_key.values())


def load_results(paths) -> ResultBundle:
    """Merge one or more exported result files into a bundle."""
    if isinstance(paths, (str, bytes)) or hasattr(paths, "__fspath__"):
        paths = [paths]
    groups = []
    for path in paths:
        text = str(path)
        groups.extend(_groups_from_csv(path) if text.endswith(".csv") else _groups_from_json(path))
    if not groups:
        raise BundleError("no result groups found in the given files")
    return ResultBundle(groups)
