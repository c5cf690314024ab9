"""Command-line interface: ``wmrfuse {gen,ingest-check,run,rank,lae-curve}``.

Exit status is 0 on success, 1 when a plan fails while running and 2 for
configuration or input errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ._types import ContractError
from .archive import build_archive, load_laes, read_archive, write_archive
from .config import ConfigError, load_config
from .datasets import GENERATORS, generate_dataset, ingest_csv, write_csv
from .evaluation import bhattacharyya_distance, run_plan, run_realization, wborda_rank
from .reports import format_summary, lae_curve, read_cells, write_curve, write_reports

log = logging.getLogger("wmrfuse")

EXIT_OK, EXIT_PLAN_FAILURE, EXIT_CONFIG_ERROR = 0, 1, 2


def _global_options(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=default, help="override the random seed")
    parser.add_argument("--out", default=default, help="output file or directory")
    parser.add_argument("--jobs", type=int, default=default, help="parallel worker processes")
    parser.add_argument(
        "--quiet", action="store_true", default=argparse.SUPPRESS if suppress else False,
        help="only print errors",
    )


def build_parser():
    parser = argparse.ArgumentParser(prog="wmrfuse", description=__doc__.splitlines()[0])
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a synthetic dataset as CSV")
    p.add_argument("generator", choices=GENERATORS)
    p.add_argument("-n", type=int, required=True, help="number of samples")

    p = sub.add_parser("ingest-check", parents=[common], help="validate and describe a CSV dataset")
    p.add_argument("csv")
    p.add_argument("--label-column", default="label")
    p.add_argument("--positive-label", default="1")

    p = sub.add_parser("run", parents=[common], help="run every plan of a config file")
    p.add_argument("config")

    p = sub.add_parser("rank", parents=[common], help="wBorda ranking of saved cell records")
    p.add_argument("cells", nargs="+", help="cells.jsonl files")

    p = sub.add_parser("lae-curve", parents=[common], help="sample a member's local accuracy curve")
    p.add_argument("archive")
    p.add_argument("--member", type=int, default=0)
    p.add_argument("--points", type=int, default=101)
    return parser


def cmd_gen(args):
    data = generate_dataset(args.generator, args.n, 0 if args.seed is None else args.seed)
    out = args.out or f"{args.generator}.csv"
    write_csv(data, out)
    log.info("wrote %d x %d samples to %s", data.n_samples, data.dimension, out)
    return EXIT_OK


def cmd_ingest_check(args):
    data = ingest_csv(args.csv, args.label_column, args.positive_label)
    n1 = int(data.y.sum())
    print(f"{data.name}: {data.n_samples} samples, dimension {data.dimension}")
    print(f"class balance: OMEGA_1={data.n_samples - n1} OMEGA_2={n1}")
    if data.has_both_classes():
        print(f"Bhattacharyya distance: {bhattacharyya_distance(data):.6f}")
    return EXIT_OK


def cmd_run(args):
    try:
        cfg = load_config(args.config, seed_override=args.seed)
        datasets = {spec.name: spec.source.load() for spec in cfg.plans}
        for spec in cfg.plans:
            for k in spec.plan.k_splits:
                if k > datasets[spec.name].dimension:
                    raise ConfigError(f"plan {spec.name}: k={k} exceeds dataset dimension")
    except ContractError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    out_dir = Path(args.out or cfg.output_dir)
    jobs = args.jobs or cfg.jobs
    cells = []
    archives = []
    for spec in cfg.plans:
        data = datasets[spec.name]
        log.info("plan %s: %s, %s, K=%s", spec.name, data.name, spec.plan.classifier_kind.value, spec.plan.k_splits)
        try:
            cells.extend(run_plan(data, spec.plan, jobs=jobs))
            for k in spec.plan.k_splits:
                fitted = run_realization(data, spec.plan, k, 0, keep_models=True)
                archives.append((spec.name, k, build_archive(
                    spec.name, data.name, k, 0, fitted["partition"], fitted["members"],
                    fitted["laes"], fitted["priors"], fitted["rules"],
                )))
        except Exception as exc:  # report the failing plan, keep the exit code contract
            print(f"plan {spec.name} failed: {exc}", file=sys.stderr)
            return EXIT_PLAN_FAILURE
    table = write_reports(cells, out_dir)
    (out_dir / "archives").mkdir(exist_ok=True)
    (out_dir / "curves").mkdir(exist_ok=True)
    for name, k, record in archives:
        write_archive(record, out_dir / "archives" / f"{name}_k{k}.json")
        for i, est in enumerate(load_laes(record)):
            write_curve(lae_curve(est, 101), out_dir / "curves" / f"{name}_k{k}_m{i}.tsv")
    if not args.quiet:
        sys.stdout.write(format_summary(table))
    return EXIT_OK


def cmd_rank(args):
    cells = []
    for path in args.cells:
        cells.extend(read_cells(path))
    table = wborda_rank(cells)
    if args.out:
        write_reports(cells, args.out)
    sys.stdout.write(format_summary(table))
    return EXIT_OK


def cmd_lae_curve(args):
    laes = load_laes(read_archive(args.archive))
    if not 0 <= args.member < len(laes):
        raise ContractError(f"member index {args.member} out of range (archive has {len(laes)})")
    curve = lae_curve(laes[args.member], args.points)
    if args.out:
        write_curve(curve, args.out)
    else:
        sys.stdout.write("# score\tlocal_accuracy\n")
        for s, a in curve:
            sys.stdout.write(f"{float(s)!r}\t{float(a)!r}\n")
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "ingest-check": cmd_ingest_check,
    "run": cmd_run,
    "rank": cmd_rank,
    "lae-curve": cmd_lae_curve,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ContractError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
