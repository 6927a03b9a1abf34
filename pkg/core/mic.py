"""
最大信息系数 (MIC), 由 minepy 的 MINE 估计

MINE 的网格只沿升序构造, 这里对两个坐标轴分别取正反两种方向并取最大值,
使结果对任意严格单调变换 (包括递减变换) 不变。
"""
import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from minepy import MINE

from core.dataset import DefectDataset
from core.exceptions import ConfigError, DimensionMismatchError, DomainError, InsufficientDataError

logger = logging.getLogger(__name__)

MIN_SAMPLES = 4


@dataclass(frozen=True)
class MineParams:
    alpha: float = 0.6  # B(n) = n^alpha
    c: int = 15  # x 轴团块数上限为 c * 列数

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ConfigError(f"MINE alpha must be in (0, 1], got {self.alpha}")
        if self.c < 1:
            raise ConfigError(f"MINE c must be >= 1, got {self.c}")


@dataclass(frozen=True, eq=False)
class MicProfile:
    """每个特征与类标签之间的 MIC"""
    scores: np.ndarray
    mic_sum: float = field(init=False)

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=float)
        if scores.ndim != 1:
            raise DimensionMismatchError("MIC scores must be a 1-D sequence")
        if np.any((scores < 0) | (scores > 1)):
            raise DomainError("MIC scores must lie in [0, 1]")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "mic_sum", float(scores.sum()))

    @classmethod
    def uniform(cls, k: int) -> "MicProfile":
        """所有特征同等重要 (TNB)"""
        return cls(np.ones(k))

    def __len__(self):
        return self.scores.size


def mic_score(x, y, params: MineParams = None) -> float:
    """
    x 与 y 的最大信息系数, 取值 [0, 1]

    Args:
        x, y: 等长的实数序列, 长度 >= 4
        params: MINE 参数, 默认 alpha=0.6, c=15
    """
    params = params or MineParams()
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise DimensionMismatchError(f"MIC inputs differ in length: {x.size} vs {y.size}")
    if x.size < MIN_SAMPLES:
        raise InsufficientDataError(f"MIC needs at least {MIN_SAMPLES} samples, got {x.size}")
    if np.all(x == x[0]) or np.all(y == y[0]):
        return 0.0

    mine = MINE(alpha=params.alpha, c=params.c)
    score = 0.0
    for sx, sy in itertools.product((1.0, -1.0), repeat=2):
        mine.compute_score(sx * x, sy * y)
        score = max(score, mine.mic())
    return float(min(max(score, 0.0), 1.0))


def mic_profile(ds: DefectDataset, params: MineParams = None) -> MicProfile:
    """每个度量与类标签的 MIC (常数列为 0)"""
    params = params or MineParams()
    if ds.n_instances < MIN_SAMPLES:
        raise InsufficientDataError(
            f"Dataset '{ds.name}' has {ds.n_instances} rows; MIC needs at least {MIN_SAMPLES}")
    scores = np.array([mic_score(ds.rows[:, j], ds.labels, params) for j in range(ds.n_features)])
    logger.debug("MIC profile for %s: sum=%.4f", ds.name, scores.sum())
    return MicProfile(scores)
