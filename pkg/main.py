"""
命令行入口

    python main.py stats <dataset_dir>
    python main.py run --config configs/experiment_config.yaml
    python main.py compare <a.csv> <b.csv>
    python main.py sweep --param lambda --values 0 0.1 0.2 --config configs/experiment_config.yaml
    python main.py report <results.csv | model.json>

退出码: 0 成功, 1 用法或配置错误, 2 数据错误
"""
import argparse
import logging
import sys
from pathlib import Path

from core.config import LOG_LEVELS, load_config
from core.dataset import DEFAULT_BUG_COLUMN, load_dataset_dir, summarize
from core.exceptions import ConfigError, DataError
from core.fwtnb import load_model
from core.harness import compare, run_experiment, sweep
from utils.report import comparison_table, model_report, results_table, stats_table, sweep_table
from utils.results_io import read_results, write_results, write_sweep

logger = logging.getLogger("cpdp")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="cpdp", description="TOMO + FWTNB cross-project defect prediction")
    parser.add_argument("--log-level", choices=LOG_LEVELS, default=None)
    commands = parser.add_subparsers(dest="command", required=True)

    stats = commands.add_parser("stats", help="dataset statistics table")
    stats.add_argument("dataset_dir", type=Path)
    stats.add_argument("--bug-column", default=DEFAULT_BUG_COLUMN)

    run = commands.add_parser("run", help="run an experiment from a config file")
    run.add_argument("--config", type=Path, required=True)

    cmp = commands.add_parser("compare", help="compare two results CSVs pair by pair")
    cmp.add_argument("results_a", type=Path)
    cmp.add_argument("results_b", type=Path)
    cmp.add_argument("--output", type=Path, default=None)

    sw = commands.add_parser("sweep", help="sweep lambda or sigma with full source data")
    sw.add_argument("--param", choices=("lambda", "sigma"), required=True)
    sw.add_argument("--values", type=float, nargs="+", required=True)
    sw.add_argument("--config", type=Path, required=True)
    sw.add_argument("--output", type=Path, default=None)

    report = commands.add_parser("report", help="render a results CSV or a model JSON")
    report.add_argument("path", type=Path)
    return parser


def _apply_level(args, cfg_level: str):
    if args.log_level is None:
        logging.getLogger().setLevel(cfg_level)


def _write_text(text: str, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    logger.info("Saved %s", path)


def dispatch(args) -> int:
    if args.command == "stats":
        datasets = load_dataset_dir(args.dataset_dir, bug_column=args.bug_column)
        print(stats_table([summarize(ds) for ds in datasets]), end="")

    elif args.command == "run":
        cfg = load_config(args.config)
        _apply_level(args, cfg.log_level)
        results = run_experiment(cfg)
        write_results(results, cfg.output)
        print(results_table(results), end="")

    elif args.command == "compare":
        table = comparison_table(compare(read_results(args.results_a), read_results(args.results_b)))
        if args.output is not None:
            _write_text(table, args.output)
        print(table, end="")

    elif args.command == "sweep":
        cfg = load_config(args.config)
        _apply_level(args, cfg.log_level)
        rows = sweep(args.param, args.values, cfg)
        output = args.output or cfg.output.with_name(f"sweep_{args.param}.csv")
        write_sweep(rows, args.param, output)
        print(sweep_table(rows, args.param), end="")

    elif args.command == "report":
        if args.path.suffix.lower() == ".json":
            print(model_report(load_model(args.path)), end="")
        else:
            print(results_table(read_results(args.path)), end="")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level or "INFO", format=LOG_FORMAT)
    try:
        return dispatch(args)
    except ConfigError as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except (DataError, FileNotFoundError) as e:
        logger.error("%s", e)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
