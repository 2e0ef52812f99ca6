"""Command-line entry point.

Subcommands:

* ``gen-data``     write a synthetic two-cluster dataset as generic CSV
* ``bench``        run the depth sweep for one architecture and export results
* ``order-sweep``  run the spline-order sweep (KAN, depth 2, width 2)
* ``count-params`` print MLP and KAN parameter counts side by side

Defaults reproduce the study protocol: width 2, 25 repetitions, 70-30
splits, 20 epochs at learning rate 0.05, grid size 3, spline order 3,
standardization on.  Exit codes: 0 success, 2 invalid flags or
configuration, 3 dataset/file problems.
"""

from __future__ import annotations

import argparse
import sys

from .bench import (
    DatasetRef,
    ExperimentSpec,
    depth_sweep,
    export_results,
    order_sweep,
)
from .data import gen_two_cluster, save_csv
from .errors import ConfigError, DataError
from .network import NetworkConfig, param_count_for
from .numerics import rng_derive
from .training import TrainConfig

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 2, 3


def _int_list(text):
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_protocol_flags(p, with_spline=True):
    p.add_argument("--width", type=int, default=2, help="hidden-layer width")
    p.add_argument("--reps", type=int, default=25, help="repetitions per configuration")
    p.add_argument("--test-frac", type=float, default=0.3, help="test fraction of each split")
    p.add_argument("--epochs", type=int, default=20, help="training epochs")
    p.add_argument("--lr", type=float, default=0.05, help="learning rate")
    p.add_argument("--optimizer", choices=("adam", "gd"), default="adam", help="optimizer")
    p.add_argument("--batch-size", type=int, default=32,
                   help="mini-batch size; 0 selects full-batch steps")
    if with_spline:
        p.add_argument("--grid", type=int, default=None, help="spline grid size (default 3)")
        p.add_argument("--order", type=int, default=None, help="spline order (default 3)")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--standardize", choices=("on", "off"), default="on",
                   help="standardize features with train-split statistics")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel repetition workers (results identical to sequential)")


def _add_data_flags(p):
    p.add_argument("--data", required=True,
                   help="synthetic-a | synthetic-b | printer-like | path to a CSV file")
    p.add_argument("--schema", choices=("cancer", "printer", "generic"), default=None,
                   help="CSV schema (required when --data is a path)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kanbench",
        description="Benchmark per-neuron-SiLU MLPs against spline-edge KANs on small datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="write a synthetic two-cluster dataset to CSV",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--n", type=int, required=True, help="sample count (multiple of 4, >= 8)")
    p.add_argument("--seed", type=int, required=True, help="generator seed")
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("bench", help="depth sweep for one architecture",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--model", choices=("mlp", "kan"), required=True)
    _add_data_flags(p)
    p.add_argument("--depths", type=_int_list, default=[1, 2, 3], help="depths to sweep")
    _add_protocol_flags(p)
    p.add_argument("--out", required=True, help="output results JSON path")
    p.add_argument("--csv-out", default=None, help="also export per-repetition CSV here")

    p = sub.add_parser("order-sweep", help="KAN spline-order sweep at depth 2",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_data_flags(p)
    p.add_argument("--orders", type=_int_list, default=[1, 2, 3, 4, 5], help="spline orders")
    p.add_argument("--depth", type=int, default=2, help="network depth (must be 2)")
    _add_protocol_flags(p, with_spline=False)
    p.add_argument("--grid", type=int, default=3, help="spline grid size")
    p.add_argument("--out", required=True, help="output results JSON path")
    p.add_argument("--csv-out", default=None, help="also export per-repetition CSV here")

    p = sub.add_parser("count-params", help="parameter counts for both architectures",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--input-dim", type=int, required=True, help="number of input features")
    p.add_argument("--classes", type=int, default=2, help="number of classes")
    p.add_argument("--depths", type=_int_list, default=[1, 2, 3], help="depths to tabulate")
    p.add_argument("--width", type=int, default=2, help="hidden-layer width")
    p.add_argument("--grid", type=int, default=3, help="spline grid size")
    p.add_argument("--order", type=int, default=3, help="spline order")
    return parser


def _dataset_ref(args):
    if args.data in ("synthetic-a", "synthetic-b", "printer-like"):
        if args.schema is not None:
            raise ConfigError("--schema applies only when --data is a CSV path")
        return DatasetRef(kind=args.data)
    if args.schema is None:
        raise ConfigError("--schema is required when --data is a CSV path")
    return DatasetRef(kind="csv", path=args.data, schema=args.schema)


def _print_table(header, rows, stream):
    widths = [max(len(str(cell)) for cell in col) for col in zip(header, *rows)]
    for row in [header, *rows]:
        print("  ".join(str(cell).rjust(w) for cell, w in zip(row, widths)), file=stream)


def cmd_gen_data(args, stream):
    data = gen_two_cluster(args.n, rng_derive(args.seed, 0))
    save_csv(data, args.out)
    print(f"wrote {data.n} samples ({data.dim} features, {data.class_count} classes) to {args.out}",
          file=stream)
    return EXIT_OK


def cmd_bench(args, stream):
    if args.model == "mlp" and (args.grid is not None or args.order is not None):
        raise ConfigError("--grid/--order only apply to --model kan")
    spec = ExperimentSpec(
        dataset=_dataset_ref(args),
        arch=args.model,
        depth=1,
        width=args.width,
        grid_size=args.grid if args.grid is not None else 3,
        spline_order=args.order if args.order is not None else 3,
        reps=args.reps,
        test_frac=args.test_frac,
        train=TrainConfig(args.epochs, args.lr, args.optimizer,
                          args.batch_size if args.batch_size > 0 else None),
        master_seed=args.seed,
        standardize=args.standardize == "on",
    )
    runs = depth_sweep(spec, args.depths, jobs=args.jobs)
    export_results(list(runs.values()), args.out, "json")
    if args.csv_out:
        export_results(list(runs.values()), args.csv_out, "csv")
    rows = [
        [d, run.spec.arch, run.results[0].param_count,
         f"{run.summary.median:.4f}", f"{run.summary.minimum:.4f}", f"{run.summary.maximum:.4f}"]
        for d, run in runs.items()
    ]
    _print_table(["depth", "arch", "params", "median", "min", "max"], rows, stream)
    print(f"results written to {args.out}", file=stream)
    return EXIT_OK


def cmd_order_sweep(args, stream):
    if args.depth != 2:
        raise ConfigError(f"the order sweep runs at depth 2, got --depth {args.depth}")
    if args.width != 2:
        raise ConfigError(f"the order sweep runs at width 2, got --width {args.width}")
    bad = [k for k in args.orders if not 1 <= k <= 5]
    if bad or not args.orders:
        raise ConfigError(f"orders must lie in 1..5, got {args.orders}")
    spec = ExperimentSpec(
        dataset=_dataset_ref(args),
        arch="kan",
        depth=2,
        width=2,
        grid_size=args.grid,
        spline_order=3,
        reps=args.reps,
        test_frac=args.test_frac,
        train=TrainConfig(args.epochs, args.lr, args.optimizer,
                          args.batch_size if args.batch_size > 0 else None),
        master_seed=args.seed,
        standardize=args.standardize == "on",
    )
    runs = order_sweep(spec, args.orders, jobs=args.jobs)
    export_results(list(runs.values()), args.out, "json")
    if args.csv_out:
        export_results(list(runs.values()), args.csv_out, "csv")
    rows = [
        [k, run.results[0].param_count,
         f"{run.summary.median:.4f}", f"{run.summary.minimum:.4f}", f"{run.summary.maximum:.4f}"]
        for k, run in runs.items()
    ]
    _print_table(["order", "params", "median", "min", "max"], rows, stream)
    print(f"results written to {args.out}", file=stream)
    return EXIT_OK


def cmd_count_params(args, stream):
    rows = []
    for depth in args.depths:
        common = dict(input_dim=args.input_dim, hidden_widths=[args.width] * depth,
                      n_classes=args.classes)
        mlp = param_count_for(NetworkConfig(arch="mlp", **common))
        kan = param_count_for(
            NetworkConfig(arch="kan", grid_size=args.grid, spline_order=args.order, **common)
        )
        rows.append([depth, mlp, kan])
    _print_table(["depth", "mlp_params", "kan_params"], rows, stream)
    return EXIT_OK


COMMANDS = {
    "gen-data": cmd_gen_data,
    "bench": cmd_bench,
    "order-sweep": cmd_order_sweep,
    "count-params": cmd_count_params,
}


def main(argv=None, stream=None) -> int:
    stream = stream if stream is not None else sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, stream)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
