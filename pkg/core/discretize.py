import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple, Union

import numpy as np

from core.dataset import DefectDataset
from core.exceptions import DatasetFormatError, DimensionMismatchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DiscretizationModel:
    """每个特征的升序切分点; 特征 j 的取值个数 n_j = len(cuts[j]) + 1"""
    cuts: Tuple[np.ndarray, ...]

    def __post_init__(self):
        cuts = tuple(np.asarray(c, dtype=float).ravel() for c in self.cuts)
        for j, c in enumerate(cuts):
            if c.size > 1 and np.any(np.diff(c) <= 0):
                raise DatasetFormatError(f"Cut points of feature {j} are not strictly ascending")
        object.__setattr__(self, "cuts", cuts)

    @property
    def n_features(self) -> int:
        return len(self.cuts)

    @property
    def bin_counts(self) -> np.ndarray:
        return np.array([c.size + 1 for c in self.cuts], dtype=int)

    def to_dict(self) -> Dict[str, List[List[float]]]:
        return {"cuts": [c.tolist() for c in self.cuts]}

    @classmethod
    def from_dict(cls, data: Dict) -> "DiscretizationModel":
        return cls(tuple(np.asarray(c, dtype=float) for c in data["cuts"]))


def _entropy(counts: np.ndarray) -> np.ndarray:
    """按最后一维计算类别熵 (比特), 支持批量"""
    counts = np.asarray(counts, dtype=float)
    totals = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(totals > 0, counts / totals, 0.0)
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=-1)


def _split(values: np.ndarray, codes: np.ndarray, n_classes: int, cuts: List[float]):
    """
    对已排序的一段数据递归二分

    候选切分点只取相邻两个不同取值之间、且位于类别边界上的中点
    (两侧取值组都是同一个纯类别时不可能是最优切分)。
    """
    n = values.size
    starts = np.flatnonzero(np.r_[True, values[1:] != values[:-1]])
    if starts.size < 2:
        return

    # 每个取值组的类别计数
    group_of = np.cumsum(np.r_[True, values[1:] != values[:-1]]) - 1
    group_counts = np.zeros((starts.size, n_classes))
    np.add.at(group_counts, (group_of, codes), 1.0)
    total = group_counts.sum(axis=0)

    present = group_counts > 0
    pure_class = np.where(present.sum(axis=1) == 1, present.argmax(axis=1), -1)
    boundary = ~((pure_class[:-1] >= 0) & (pure_class[:-1] == pure_class[1:]))
    if not boundary.any():
        return

    left = np.cumsum(group_counts, axis=0)[:-1][boundary]
    right = total - left
    n_left = left.sum(axis=1)
    n_right = n - n_left

    ent_all = float(_entropy(total))
    ent_left = _entropy(left)
    ent_right = _entropy(right)
    gains = ent_all - (n_left * ent_left + n_right * ent_right) / n
    best = int(np.argmax(gains))

    m = int((total > 0).sum())
    m1 = int((left[best] > 0).sum())
    m2 = int((right[best] > 0).sum())
    delta = np.log2(3 ** m - 2) - (m * ent_all - m1 * ent_left[best] - m2 * ent_right[best])
    threshold = (np.log2(n - 1) + delta) / n
    if gains[best] <= threshold:
        return

    group_index = int(np.flatnonzero(boundary)[best])
    split_at = int(starts[group_index + 1])
    cut = (values[split_at - 1] + values[split_at]) / 2.0
    cuts.append(float(cut))
    _split(values[:split_at], codes[:split_at], n_classes, cuts)
    _split(values[split_at:], codes[split_at:], n_classes, cuts)


def fit_mdlp(values, labels) -> np.ndarray:
    """
    Fayyad-Irani MDLP 有监督离散化, 返回升序切分点 (可能为空)

    Args:
        values: 单个特征的取值
        labels: 类别标签, 与 values 等长
    """
    values = np.asarray(values, dtype=float).ravel()
    labels = np.asarray(labels).ravel()
    if values.size != labels.size:
        raise DimensionMismatchError(f"MDLP inputs differ in length: {values.size} vs {labels.size}")
    if values.size == 0:
        raise DimensionMismatchError("MDLP needs at least one value")

    _, codes = np.unique(labels, return_inverse=True)
    n_classes = int(codes.max()) + 1
    order = np.argsort(values, kind="stable")
    cuts: List[float] = []
    if n_classes > 1:
        _split(values[order], codes[order], n_classes, cuts)
    return np.array(sorted(cuts), dtype=float)


def fit_all(ds: DefectDataset) -> DiscretizationModel:
    """对每个特征分别拟合 MDLP"""
    cuts = tuple(fit_mdlp(ds.rows[:, j], ds.labels) for j in range(ds.n_features))
    logger.debug("MDLP on %s: cut counts %s", ds.name, [c.size for c in cuts])
    return DiscretizationModel(cuts)


def apply(model: DiscretizationModel, data: Union[DefectDataset, np.ndarray]) -> np.ndarray:
    """
    把连续值映射为区间编号: bin = 严格小于该值的切分点个数

    超出拟合范围的值落入两端区间。
    """
    rows = data.rows if isinstance(data, DefectDataset) else np.asarray(data, dtype=float)
    if rows.ndim == 1:
        rows = rows.reshape(1, -1)
    if rows.shape[1] != model.n_features:
        raise DimensionMismatchError(
            f"Data has {rows.shape[1]} features but the discretizer was fit on {model.n_features}")
    bins = np.empty(rows.shape, dtype=int)
    for j, cuts in enumerate(model.cuts):
        bins[:, j] = np.searchsorted(cuts, rows[:, j], side="left")
    return bins
