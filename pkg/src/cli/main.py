"""
Command-line Interface
======================
Subcommands:
    run     train an experiment manifest and write CSVs + summary
    plan    print the matched width lists and parameter counts
    merge   combine summary files into one results table

Exit codes:
    0 success
    2 configuration error
    3 data error
    4 all runs failed
    5 capacity error
    6 merge/report error
"""

import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional

from src.core.capacity import CapacityError
from src.services.datasets import DatasetError
from src.services.experiment_runner import (
    format_plan,
    load_experiment_config,
    plan_only,
    run_experiment,
)
from src.services.reporting import ReportError, format_table, report_merge
from src.services.training import AllRunsFailedError
from src.utils.config import ConfigurationError
from src.utils.logger import get_logger, setup_from_config


logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_ALL_FAILED = 4
EXIT_CAPACITY = 5
EXIT_MERGE = 6


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m src.cli",
        description="Parameter-matched real vs. complex MLP experiments",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Train both domains of a manifest with 4 concurrent runs
  %(prog)s run --config configs/experiments/mnist_fixed_k0.yaml --workers 4

  # Show the matched widths for a 500k budget without training
  %(prog)s plan --config configs/experiments/mnist_budget.yaml

  # Merge every summary under results/ into one table
  %(prog)s merge results
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Train an experiment")
    run.add_argument("--config", "-c", type=Path, help="Experiment manifest (YAML)")
    run.add_argument("--out", "-o", type=Path, help="Output directory (default: runner.output_dir)")
    run.add_argument("--workers", "-w", type=int, help="Concurrent runs")
    run.add_argument("--seed", "-s", type=int, help="Base seed; run i uses seed + i (synthetic data keeps data_seed)")
    run.add_argument("--epochs", type=int, help="Override the epoch count")
    run.add_argument("--runs", type=int, help="Override the number of runs")

    plan = sub.add_parser("plan", help="Print matched plans without training")
    plan.add_argument("--config", "-c", type=Path, help="Experiment manifest (YAML)")
    plan.add_argument("--input-dim", type=int, help="Override the input dimension")
    plan.add_argument("--output-dim", type=int, help="Override the number of classes")

    merge = sub.add_parser("merge", help="Merge summary files into one table")
    merge.add_argument("directory", type=Path, help="Directory searched for summary files")
    merge.add_argument("--csv", type=Path, help="Also write the merged rows to this CSV")

    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, object]:
    mapping = {
        "out": "output_dir",
        "workers": "workers",
        "seed": "base_seed",
        "epochs": "epochs",
        "runs": "runs",
        "input_dim": "input_dim",
        "output_dim": "output_dim",
    }
    return {key: getattr(args, flag) for flag, key in mapping.items() if hasattr(args, flag)}


def cmd_run(args: argparse.Namespace) -> int:
    experiment = load_experiment_config(args.config, _overrides(args))
    summaries = run_experiment(experiment)
    for s in summaries:
        best = "n/a" if s.best_test_acc is None else f"{s.best_test_acc:.4f}"
        print(
            f"{s.domain.value:>7}  best={best}  failed={s.failed_runs}/{s.runs}  "
            f"params={s.params_no_bias}"
        )
    return EXIT_OK


def cmd_plan(args: argparse.Namespace) -> int:
    experiment = load_experiment_config(args.config, _overrides(args))
    print(format_plan(plan_only(experiment)))
    return EXIT_OK


def cmd_merge(args: argparse.Namespace) -> int:
    frame = report_merge(args.directory)
    if args.csv:
        args.csv.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(args.csv, index=False)
    print(format_table(frame).to_string())
    return EXIT_OK


COMMANDS = {"run": cmd_run, "plan": cmd_plan, "merge": cmd_merge}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_from_config()
    try:
        return COMMANDS[args.command](args)
    except ConfigurationError as e:
        field = getattr(e, "field", None)
        logger.error(f"Configuration error{f' in {field!r}' if field else ''}: {e}")
        return EXIT_CONFIG
    except DatasetError as e:
        logger.error(f"Data error: {e}")
        return EXIT_DATA
    except AllRunsFailedError as e:
        logger.error(str(e))
        return EXIT_ALL_FAILED
    except CapacityError as e:
        logger.error(f"Capacity error: {e}")
        return EXIT_CAPACITY
    except ReportError as e:
        logger.error(f"Report error: {e}")
        return EXIT_MERGE


if __name__ == "__main__":
    sys.exit(main())
