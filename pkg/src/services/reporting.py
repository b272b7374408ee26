"""
Reporting
=========
Per-run CSV trajectories, JSON-lines experiment summaries, and merging of
summaries from many experiments into one results table.
"""

from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import pandas as pd

from src.models.experiment import DomainSummary, EpochDiagnostics, RunResult
from src.utils.logger import get_logger


logger = get_logger(__name__)

PathLike = Union[str, Path]
SUMMARY_GLOB = "*summary*.jsonl"
KEY_COLUMNS = ["dataset", "k", "activation", "domain"]
DOMAIN_LABELS = {"real": "R", "complex": "C"}


class ReportError(Exception):
    """Base class for report reading and writing errors."""
    pass


class MergeConflictError(ReportError):
    """Raised when two summary records share a key but disagree."""

    def __init__(self, key: Tuple, first: PathLike, second: PathLike) -> None:
        super().__init__(f"Conflicting records for {key} in {first} and {second}")
        self.key = key
        self.files = (Path(first), Path(second))


# -----------------------------------------------------------------------------
# Run Trajectories
# -----------------------------------------------------------------------------

def write_run_csv(result: RunResult, path: PathLike) -> Path:
    """One row per completed epoch, columns as EpochDiagnostics.CSV_COLUMNS."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        [d.model_dump() for d in result.diagnostics],
        columns=list(EpochDiagnostics.CSV_COLUMNS),
    )
    frame.to_csv(path, index=False, float_format="%.17g")
    return path


def read_run_csv(path: PathLike) -> List[EpochDiagnostics]:
    frame = pd.read_csv(path)
    missing = set(EpochDiagnostics.CSV_COLUMNS) - set(frame.columns)
    if missing:
        raise ReportError(f"{path} is missing columns: {sorted(missing)}")
    return [EpochDiagnostics(**row) for row in frame.to_dict(orient="records")]


# -----------------------------------------------------------------------------
# Summaries
# -----------------------------------------------------------------------------

def write_summary(summaries: Sequence[DomainSummary], path: PathLike) -> Path:
    """One JSON record per line, one line per domain."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for summary in summaries:
            f.write(summary.model_dump_json() + "\n")
    logger.info(f"Wrote {len(summaries)} summary record(s) to {path}")
    return path


def read_summary(path: PathLike) -> List[DomainSummary]:
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                records.append(DomainSummary.model_validate_json(line))
            except ValueError as e:
                raise ReportError(f"{path}:{number}: not a summary record ({e})") from e
    return records


def summary_row(summary: DomainSummary) -> Dict:
    row = summary.model_dump(mode="json", exclude={"best_of_n", "follow"})
    row["delta_correlation"] = summary.follow.delta_correlation if summary.follow else None
    row["convergence_lag"] = summary.follow.convergence_lag if summary.follow else None
    return row


def report_merge(directory: PathLike) -> pd.DataFrame:
    """
    Combine every summary file below a directory into one table.

    Rows are keyed by (dataset, k, activation, domain). Identical duplicates
    collapse into one row.

    Raises:
        MergeConflictError: If one key maps to two different records
        ReportError: If the directory holds no summaries
    """
    directory = Path(directory)
    files = sorted(directory.rglob(SUMMARY_GLOB))
    if not files:
        raise ReportError(f"No summary files ({SUMMARY_GLOB}) below {directory}")

    seen: Dict[Tuple, Tuple[DomainSummary, Path]] = {}
    for path in files:
        for record in read_summary(path):
            if record.key in seen:
                previous, origin = seen[record.key]
                if previous != record:
                    raise MergeConflictError(record.key, origin, path)
                continue
            seen[record.key] = (record, path)

    rows = [summary_row(record) for record, _ in seen.values()]
    frame = pd.DataFrame(rows).sort_values(KEY_COLUMNS).reset_index(drop=True)
    logger.info(f"Merged {len(frame)} rows from {len(files)} summary file(s)")
    return frame


def format_table(frame: pd.DataFrame, value: str = "best_test_acc") -> pd.DataFrame:
    """
    Pivot merged rows into rows (dataset, k, activation) and columns R / C.
    """
    table = frame.pivot_table(
        index=["dataset", "k", "activation"],
        columns="domain",
        values=value,
        aggfunc="first",
    )
    table = table.rename(columns=DOMAIN_LABELS)
    table.columns.name = None
    ordered = [c for c in ("R", "C") if c in table.columns]
    return table[ordered]


__all__ = [
    "ReportError",
    "MergeConflictError",
    "write_run_csv",
    "read_run_csv",
    "write_summary",
    "read_summary",
    "summary_row",
    "report_merge",
    "format_table",
]
