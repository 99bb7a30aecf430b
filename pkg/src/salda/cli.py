"""Command-line entry points.

    salda run --config exp.json [flag overrides]
    salda compare results_a.csv results_b.csv [--out prefix]
    salda self-test [--seed N]

Flags override config fields; a config file is optional when --dataset is
given.  SALDA_THREADS controls worker threads for the fold grid.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import ExperimentConfig, ResultTable, compare_report, run_experiment, self_test
from .scatter import VARIANTS


def _label_column(text):
    try:
        return int(text)
    except ValueError:
        return text


def _build_parser():
    parser = argparse.ArgumentParser(prog="salda", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a cross-validated experiment")
    run.add_argument("--config", help="JSON experiment config")
    run.add_argument("--dataset", help="CSV dataset path")
    run.add_argument("--label-column", type=_label_column, default=None,
                     help="label column name or 0-based index (default: last)")
    run.add_argument("--variants", default=None,
                     help=f"comma-separated selectors or 'all' ({', '.join(VARIANTS)})")
    run.add_argument("--graph", choices=["full", "knn"], default=None)
    run.add_argument("--kernel", choices=["paper", "squared"], default=None,
                     help="heat-kernel exponent: plain distance (paper) or squared")
    run.add_argument("--folds", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--epsilon", type=float, default=None)
    run.add_argument("--dims", type=int, default=None, help="projection dimension override")
    run.add_argument("--knn-k", type=int, default=None, help="neighbour count override")
    run.add_argument("--leaky-standardize", action="store_true",
                     help="fit standardization on the full dataset (literal protocol, leaks)")
    run.add_argument("--centroid", choices=["auto", "mean", "weighted"], default=None)
    run.add_argument("--out", default=None, help="results CSV path")
    run.add_argument("--timings", default=None, help="wall-time CSV path")
    run.add_argument("--predictions", default=None, help="per-sample predictions CSV path")
    run.add_argument("--dump-saliency", default=None, help="per-class saliency JSON path")

    comp = sub.add_parser("compare", help="merge result CSVs into a comparison report")
    comp.add_argument("results", nargs="+", help="results CSV files from 'salda run'")
    comp.add_argument("--out", default=None, help="prefix for <prefix>.csv and <prefix>.txt")

    st = sub.add_parser("self-test", help="run the embedded verification suite")
    st.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_run(args):
    if args.config:
        cfg = ExperimentConfig.from_json(Path(args.config).read_text(encoding="utf-8"))
    elif args.dataset:
        cfg = ExperimentConfig(dataset=args.dataset)
    else:
        print("error: provide --config or --dataset", file=sys.stderr)
        return 2

    variants = None
    if args.variants:
        variants = VARIANTS if args.variants == "all" else tuple(args.variants.split(","))
    cfg = cfg.with_overrides(
        dataset=args.dataset,
        label_column=args.label_column,
        variants=variants,
        graph=args.graph,
        kernel=args.kernel,
        folds=args.folds,
        seed=args.seed,
        epsilon=args.epsilon,
        dims=args.dims,
        knn_k=args.knn_k,
        standardize="global" if args.leaky_standardize else None,
        centroid=args.centroid,
        output=args.out,
        timings=args.timings,
        predictions=args.predictions,
        dump_saliency=args.dump_saliency,
    )
    table = run_experiment(cfg)
    print(table.to_text(), end="")
    return 0


def _cmd_compare(args):
    tables = [
        ResultTable.from_csv(Path(p).read_text(encoding="utf-8")) for p in args.results
    ]
    csv_text, text = compare_report(tables)
    if args.out:
        Path(args.out + ".csv").write_text(csv_text, encoding="utf-8")
        Path(args.out + ".txt").write_text(text, encoding="utf-8")
    print(text, end="")
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare":
            return _cmd_compare(args)
        return self_test(seed=args.seed)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
