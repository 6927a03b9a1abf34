import logging
from pathlib import Path
from typing import List, Sequence

import pandas as pd

from core.evaluator import EvalRecord
from core.exceptions import DatasetFormatError, EmptyDatasetError
from core.harness import METRICS, PairResult, SweepRow
from utils.report import results_table

logger = logging.getLogger(__name__)

RESULT_COLUMNS = ["source", "target", "repetition"] + list(METRICS)
SWEEP_COLUMNS = ["mean_g", "std_g", "mean_mcc", "std_mcc"]


def summary_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + "_summary.txt")


def results_frame(results: Sequence[PairResult]) -> pd.DataFrame:
    rows = []
    for r in results:
        for rep, record in enumerate(r.records):
            rows.append([r.source, r.target, rep] + [getattr(record, m) for m in METRICS])
    return pd.DataFrame(rows, columns=RESULT_COLUMNS)


def write_results(results: Sequence[PairResult], path) -> Path:
    """每次重复一行的结果 CSV, 旁边附带 mean±std 汇总文本"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    results_frame(results).to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    with open(summary_path(path), "w", encoding="utf-8", newline="\n") as f:
        f.write(results_table(results))
    logger.info("Results saved to %s", path)
    return path


def read_results(path) -> List[PairResult]:
    """读取结果 CSV, 按数据对分组 (保持文件中首次出现的顺序)"""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Results file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype={"source": str, "target": str})
    except pd.errors.EmptyDataError:
        raise EmptyDatasetError(f"{path}: file is empty")
    missing = [c for c in RESULT_COLUMNS if c not in frame.columns]
    if missing:
        raise DatasetFormatError(f"{path}: missing result columns {missing}")
    if frame.empty:
        raise EmptyDatasetError(f"{path}: no result rows")
    if frame[list(METRICS)].isna().any().any():
        raise DatasetFormatError(f"{path}: empty metric cells")

    results = []
    for (source, target), group in frame.groupby(["source", "target"], sort=False):
        group = group.sort_values("repetition", kind="stable")
        records = tuple(
            EvalRecord(pd=float(row.pd), pf=float(row.pf), g_measure=float(row.g_measure), mcc=float(row.mcc))
            for row in group.itertuples(index=False)
        )
        results.append(PairResult(source, target, records))
    return results


def write_sweep(rows: Sequence[SweepRow], param: str, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        [[r.value, r.mean_g, r.std_g, r.mean_mcc, r.std_mcc] for r in rows],
        columns=[param] + SWEEP_COLUMNS,
    )
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    logger.info("Sweep results saved to %s", path)
    return path
