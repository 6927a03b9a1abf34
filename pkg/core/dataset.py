import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from core.exceptions import (
    DatasetFormatError,
    DatasetParseError,
    DimensionMismatchError,
    DomainError,
    EmptyDatasetError,
)

logger = logging.getLogger(__name__)

DEFAULT_BUG_COLUMN = "bug"
MISSING_TOKENS = ("", "?")
# PROMISE 文件中以数值形式出现的标识列
IDENTIFIER_NAMES = ("version",)


@dataclass(frozen=True, eq=False)
class DefectDataset:
    """
    带标签的缺陷数据集 (行 = 模块, 列 = 软件度量)

    Args:
        name: 数据集名称 (默认取文件名, 如 ant-1.7)
        feature_names: 度量列名, 长度 k
        rows: (n, k) 浮点矩阵, 清洗前允许 NaN
        labels: (n,) 取值 {0, 1}, 1 表示有缺陷
        provenance: 来源信息 (路径、跳过的标识列、缺陷列名)
    """
    name: str
    feature_names: Tuple[str, ...]
    rows: np.ndarray
    labels: np.ndarray
    provenance: Dict[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        if rows.ndim != 2 or labels.ndim != 1:
            raise DimensionMismatchError(f"Dataset '{self.name}': rows must be 2-D and labels 1-D")
        if rows.shape[0] == 0:
            raise EmptyDatasetError(f"Dataset '{self.name}' has no rows")
        if rows.shape[0] != labels.shape[0]:
            raise DimensionMismatchError(
                f"Dataset '{self.name}': {rows.shape[0]} rows but {labels.shape[0]} labels")
        if rows.shape[1] != len(self.feature_names):
            raise DimensionMismatchError(
                f"Dataset '{self.name}': {rows.shape[1]} columns but {len(self.feature_names)} feature names")
        if not np.isin(labels, (0, 1)).all():
            raise DatasetFormatError(f"Dataset '{self.name}': labels must be 0 or 1")
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", labels)

    @property
    def n_instances(self) -> int:
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return self.rows.shape[1]

    @property
    def minority_rows(self) -> np.ndarray:
        return self.rows[self.labels == 1]

    @property
    def majority_rows(self) -> np.ndarray:
        return self.rows[self.labels == 0]

    def replace_rows(self, rows: np.ndarray, labels: np.ndarray = None, **provenance) -> "DefectDataset":
        """返回替换了数据(和标签)的新数据集, 名称与列名不变"""
        merged = dict(self.provenance)
        merged.update(provenance)
        return DefectDataset(
            name=self.name,
            feature_names=self.feature_names,
            rows=rows,
            labels=self.labels if labels is None else labels,
            provenance=merged,
        )

    def subset(self, indices: Sequence[int]) -> "DefectDataset":
        indices = np.asarray(indices, dtype=int)
        return self.replace_rows(self.rows[indices], self.labels[indices])


@dataclass(frozen=True)
class DatasetStats:
    name: str
    n_metrics: int
    n_instances: int
    n_defective: int
    defective_rate: float


def _numeric_column(values: pd.Series) -> Tuple[pd.Series, pd.Series]:
    """把字符串列转成数值; 返回 (数值列, 无法解析的非缺失单元掩码)"""
    stripped = values.str.strip()
    missing = stripped.isin(MISSING_TOKENS)
    numeric = pd.to_numeric(stripped.where(~missing), errors="coerce")
    bad = numeric.isna() & ~missing
    return numeric, bad


def _identifier_columns(frame: pd.DataFrame, bug_column: str) -> List[str]:
    """
    识别前导标识列 (类名、版本号等)

    从左到右, 多数单元无法解析为数值的列或名为 version 的列视为标识列,
    遇到第一个度量列即停止; 之后的文本单元按解析错误处理。
    """
    skipped = []
    for column in frame.columns:
        if column == bug_column:
            continue
        _, bad = _numeric_column(frame[column])
        present = ~frame[column].str.strip().isin(MISSING_TOKENS)
        is_text = present.any() and bad.sum() * 2 > present.sum()
        if not is_text and column.split(".")[0].strip().lower() not in IDENTIFIER_NAMES:
            break
        skipped.append(column)
    return skipped


def load_promise_csv(path, bug_column: str = DEFAULT_BUG_COLUMN) -> DefectDataset:
    """
    读取 PROMISE 格式的缺陷 CSV, 缺陷数 > 0 的行标记为 1 (不做清洗)

    Args:
        path: CSV 文件路径 (UTF-8, 首行为表头)
        bug_column: 缺陷数列名
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise EmptyDatasetError(f"{path}: file is empty")

    if bug_column not in frame.columns:
        raise DatasetFormatError(f"{path}: defect column '{bug_column}' not found")
    if frame.empty:
        raise EmptyDatasetError(f"{path}: no data rows")

    skipped = _identifier_columns(frame, bug_column)
    metric_columns = [c for c in frame.columns if c != bug_column and c not in skipped]
    if not metric_columns:
        raise DatasetFormatError(f"{path}: no numeric metric column")

    matrix = np.empty((len(frame), len(metric_columns)), dtype=float)
    for j, column in enumerate(metric_columns + [bug_column]):
        numeric, bad = _numeric_column(frame[column])
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise DatasetParseError(
                f"{path}: non-numeric value {frame[column].iloc[row]!r} at data row {row + 1}, column '{column}'",
                row=row + 1, column=column)
        if column == bug_column:
            if numeric.isna().any():
                row = int(np.flatnonzero(numeric.isna().to_numpy())[0])
                raise DatasetParseError(f"{path}: missing defect count at data row {row + 1}",
                                        row=row + 1, column=column)
            bugs = numeric.to_numpy(dtype=float)
        else:
            matrix[:, j] = numeric.to_numpy(dtype=float)

    labels = (bugs > 0).astype(int)
    logger.info("Loaded %s: %d rows, %d metrics, skipped identifier columns %s",
                path.stem, len(frame), len(metric_columns), skipped)
    return DefectDataset(
        name=path.stem,
        feature_names=tuple(metric_columns),
        rows=matrix,
        labels=labels,
        provenance={"path": str(path), "skipped_columns": list(skipped), "bug_column": bug_column},
    )


def load_dataset_dir(directory, bug_column: str = DEFAULT_BUG_COLUMN) -> List[DefectDataset]:
    """按文件名顺序读取目录下全部 *.csv"""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"Dataset directory not found: {directory}")
    files = sorted(directory.glob("*.csv"))
    if not files:
        raise EmptyDatasetError(f"No CSV files in {directory}")
    return [load_promise_csv(f, bug_column=bug_column) for f in files]


def clean(ds: DefectDataset) -> DefectDataset:
    """删除含缺失值的行以及重复行 (特征与标签都相同), 保留首次出现的顺序"""
    finite = np.isfinite(ds.rows).all(axis=1)
    rows, labels = ds.rows[finite], ds.labels[finite]
    if rows.shape[0] == 0:
        raise EmptyDatasetError(f"Dataset '{ds.name}' is empty after cleaning")

    keyed = np.column_stack([rows, labels])
    _, first = np.unique(keyed, axis=0, return_index=True)
    keep = np.sort(first)

    removed = ds.n_instances - keep.size
    if removed:
        logger.info("Cleaning %s removed %d rows (%d missing, %d duplicate)",
                    ds.name, removed, int((~finite).sum()), rows.shape[0] - keep.size)
    return ds.replace_rows(rows[keep], labels[keep])


def log_transform(ds: DefectDataset) -> DefectDataset:
    """每个单元 v 替换为 ln(v + 1)"""
    if np.any(ds.rows < 0):
        raise DomainError(f"Dataset '{ds.name}' has negative metric values; ln(v+1) needs v >= 0")
    return ds.replace_rows(np.log1p(ds.rows))


def prepare(ds: DefectDataset) -> DefectDataset:
    return log_transform(clean(ds))


def summarize(ds: DefectDataset) -> DatasetStats:
    n = ds.n_instances
    defective = int(ds.labels.sum())
    return DatasetStats(
        name=ds.name,
        n_metrics=ds.n_features,
        n_instances=n,
        n_defective=defective,
        defective_rate=defective / n,
    )
