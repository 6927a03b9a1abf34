"""
少数类过采样: TOMO (面向迁移的少数类过采样) 与经典 SMOTE

TOMO 的近邻顺序同时考虑源域少数类样本之间的距离和它们到目标域
"潜在少数类"簇中心的距离, λ 控制两者的比重。
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.cluster import KMeans
from sklearn.neighbors import NearestNeighbors

from core.dataset import DefectDataset
from core.exceptions import (
    ConfigError,
    DegenerateClusterError,
    DimensionMismatchError,
    InsufficientDataError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ClusterSplit:
    """
    Args:
        assignment: 每个目标行所属的簇, 1 表示较小的 "潜在少数类" 簇
        minority_centroid: 较小簇的中心
    """
    assignment: np.ndarray
    minority_centroid: np.ndarray


@dataclass(frozen=True)
class TomoParams:
    ratio: float = 1.0  # 期望的 少数类/多数类 比例
    lam: float = 0.4
    rng_seed: int = 0

    def __post_init__(self):
        if not self.ratio > 0:
            raise ConfigError(f"TOMO ratio must be > 0, got {self.ratio}")
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError(f"TOMO lambda must be in [0, 1], got {self.lam}")


@dataclass(frozen=True, eq=False)
class SyntheticBatch:
    """
    合成的少数类样本及其来源

    base_index / neighbor_index 指向输入源数据集的行号, r 为每行的随机系数。
    branch 记录 TOMO 走的分支 (a, b, c, none), SMOTE 生成的批次为 smote。
    """
    rows: np.ndarray
    base_index: np.ndarray
    neighbor_index: np.ndarray
    r: np.ndarray
    branch: str = "none"

    @property
    def n0(self) -> int:
        return self.rows.shape[0]

    @classmethod
    def empty(cls, k: int, branch: str = "none") -> "SyntheticBatch":
        return cls(np.empty((0, k)), np.empty(0, dtype=int), np.empty(0, dtype=int), np.empty(0), branch)


def two_means(T, seed: int) -> ClusterSplit:
    """
    把目标数据分成两个簇 (欧氏距离的 2-means), 较小的簇视为潜在少数类

    初始中心: 用种子随机选一点, 取离它最远的点为第一个中心,
    再取离第一个中心最远的点为第二个中心。两簇大小相同时取中心范数较小者。
    """
    T = np.asarray(T, dtype=float)
    if T.ndim != 2 or T.shape[0] < 2:
        raise InsufficientDataError("2-means needs a target matrix with at least 2 rows")
    if np.all(T == T[0]):
        raise DegenerateClusterError("All target rows are identical; no meaningful 2-way split")

    rng = np.random.default_rng(seed)
    start = int(rng.integers(T.shape[0]))
    first = T[np.argmax(np.linalg.norm(T - T[start], axis=1))]
    second = T[np.argmax(np.linalg.norm(T - first, axis=1))]

    kmeans = KMeans(n_clusters=2, init=np.vstack([first, second]), n_init=1, tol=0.0,
                    algorithm="lloyd", max_iter=1000)
    raw = kmeans.fit_predict(T)

    sizes = np.bincount(raw, minlength=2)
    if np.any(sizes == 0):
        raise DegenerateClusterError("2-means produced an empty cluster")
    centroids = np.vstack([T[raw == c].mean(axis=0) for c in (0, 1)])
    if sizes[0] != sizes[1]:
        minority = int(np.argmin(sizes))
    else:
        minority = int(np.argmin(np.linalg.norm(centroids, axis=1)))

    return ClusterSplit(
        assignment=(raw == minority).astype(int),
        minority_centroid=centroids[minority],
    )


def _row_normalize(matrix: np.ndarray, mask: np.ndarray) -> np.ndarray:
    masked = np.where(mask, matrix, 0.0)
    sums = masked.sum(axis=1, keepdims=True)
    sums[sums == 0] = 1.0
    return masked / sums


def neighbor_order(S_P, c_min, lam: float) -> np.ndarray:
    """
    混合距离下的近邻索引矩阵 NeigInd

    Args:
        S_P: 已按到 c_min 的距离升序排列的少数类样本 (n_P, k)
        c_min: 目标域潜在少数类簇中心
        lam: 源域内部距离的权重, 1 - lam 为到簇中心距离的权重

    Returns:
        (n_P, n_P - 1) 矩阵, 第 i 行为除 i 以外其他行按混合距离升序的索引
    """
    S_P = np.asarray(S_P, dtype=float)
    c_min = np.asarray(c_min, dtype=float).ravel()
    n_P = S_P.shape[0]
    if n_P < 2:
        raise InsufficientDataError(f"Neighbour ordering needs at least 2 minority rows, got {n_P}")
    if S_P.shape[1] != c_min.size:
        raise DimensionMismatchError("Minority rows and centroid differ in dimension")
    if not 0.0 <= lam <= 1.0:
        raise ConfigError(f"lambda must be in [0, 1], got {lam}")

    off_diagonal = ~np.eye(n_P, dtype=bool)
    dist_ss = _row_normalize(cdist(S_P, S_P), off_diagonal)
    dist_ts = _row_normalize(np.tile(cdist(c_min[None, :], S_P), (n_P, 1)), off_diagonal)

    dist_h = lam * dist_ss + (1.0 - lam) * dist_ts
    dist_h[~off_diagonal] = np.inf
    return np.argsort(dist_h, axis=1, kind="stable")[:, :n_P - 1]


def _plan(n0: int, n_P: int) -> Tuple[np.ndarray, np.ndarray, str]:
    """按 k = n0 / n_P 选择分支, 返回 (基样本位置, 近邻名次, 分支名)"""
    k = n0 / n_P
    rows = np.arange(n_P)
    if k < 1:
        return np.arange(n0), np.zeros(n0, dtype=int), "a"

    fk = math.floor(k)
    if k <= n_P - 1:
        bases = [np.repeat(rows, fk)]
        ranks = [np.tile(np.arange(fk), n_P)]
        used = fk
        branch = "b"
    else:
        passes = fk // (n_P - 1)
        extra = fk - passes * (n_P - 1)
        bases = [np.tile(np.repeat(rows, n_P - 1), passes), np.repeat(rows, extra)]
        ranks = [np.tile(np.arange(n_P - 1), passes * n_P), np.tile(np.arange(extra), n_P)]
        used = extra
        branch = "c"

    remainder = n0 - fk * n_P
    bases.append(np.arange(remainder))
    ranks.append(np.full(remainder, used, dtype=int))
    return np.concatenate(bases).astype(int), np.concatenate(ranks).astype(int), branch


def _open_unit(rng: np.random.Generator, size: int) -> np.ndarray:
    """(0, 1) 上的均匀随机数, 恰为 0 的抽样重抽"""
    r = rng.random(size)
    zero = r == 0.0
    while zero.any():
        r[zero] = rng.random(int(zero.sum()))
        zero = r == 0.0
    return r


def tomo(S: DefectDataset, T, params: TomoParams, interpolate: bool = False) -> SyntheticBatch:
    """
    TOMO 过采样

    Args:
        S: 源数据集, 少数类 = 标签 1
        T: 目标数据的特征矩阵 (无标签)
        params: ratio / lambda / 随机种子
        interpolate: True 时使用 SMOTE 的内插方向 base + r * (nb - base)

    Returns:
        n0 = floor(n_N * ratio) - n_P 行合成样本 (n0 <= 0 时为空批次)
    """
    T = np.asarray(T, dtype=float)
    minority_index = np.flatnonzero(S.labels == 1)
    n_P = minority_index.size
    n_N = S.n_instances - n_P
    if n_P < 2:
        raise InsufficientDataError(f"TOMO needs at least 2 minority rows in '{S.name}', got {n_P}")
    if n_N == 0:
        raise InsufficientDataError(f"TOMO needs majority rows in '{S.name}'")
    if T.ndim != 2 or T.shape[1] != S.n_features:
        raise DimensionMismatchError(
            f"Target has shape {T.shape}, source '{S.name}' has {S.n_features} features")

    n0 = math.floor(n_N * params.ratio) - n_P
    if n0 <= 0:
        logger.debug("TOMO on %s: nothing to synthesize (n0=%d)", S.name, n0)
        return SyntheticBatch.empty(S.n_features)

    rng = np.random.default_rng(params.rng_seed)
    split = two_means(T, int(rng.integers(2 ** 31)))

    S_P = S.rows[minority_index]
    order = np.argsort(np.linalg.norm(S_P - split.minority_centroid, axis=1), kind="stable")
    S_P = S_P[order]
    source_index = minority_index[order]
    neighbors = neighbor_order(S_P, split.minority_centroid, params.lam)

    base_pos, ranks, branch = _plan(n0, n_P)
    neighbor_pos = neighbors[base_pos, ranks]
    r = _open_unit(rng, n0)

    base = S_P[base_pos]
    step = r[:, None] * (S_P[neighbor_pos] - base)
    rows = base + step if interpolate else base - step

    logger.debug("TOMO on %s: n_P=%d n_N=%d n0=%d branch=%s", S.name, n_P, n_N, n0, branch)
    return SyntheticBatch(
        rows=rows,
        base_index=source_index[base_pos],
        neighbor_index=source_index[neighbor_pos],
        r=r,
        branch=branch,
    )


def smote(S_P, N: int, k: int, seed: int) -> SyntheticBatch:
    """
    经典 SMOTE: 每个少数类样本生成 N/100 个合成样本, 近邻从 k 个最近邻中随机选

    返回的索引指向 S_P 的行号。
    """
    S_P = np.asarray(S_P, dtype=float)
    n_P = S_P.shape[0]
    if N <= 0 or N % 100:
        raise ConfigError(f"SMOTE percent must be a positive multiple of 100, got {N}")
    if k < 1:
        raise ConfigError(f"SMOTE k_neighbors must be >= 1, got {k}")
    if n_P <= k:
        raise InsufficientDataError(f"SMOTE with k={k} needs more than {k} minority rows, got {n_P}")

    _, indices = NearestNeighbors(n_neighbors=k + 1).fit(S_P).kneighbors(S_P)
    # 去掉自身 (重复点时自身未必排在第一列)
    candidates = np.array([row[row != i][:k] for i, row in enumerate(indices)])

    per_row = N // 100
    rng = np.random.default_rng(seed)
    base_pos = np.repeat(np.arange(n_P), per_row)
    neighbor_pos = candidates[base_pos, rng.integers(k, size=base_pos.size)]
    r = rng.random(base_pos.size)
    base = S_P[base_pos]
    rows = base + r[:, None] * (S_P[neighbor_pos] - base)
    return SyntheticBatch(rows=rows, base_index=base_pos, neighbor_index=neighbor_pos, r=r, branch="smote")


def smote_dataset(S: DefectDataset, N: int, k: int, seed: int) -> SyntheticBatch:
    """对 S 的少数类做 SMOTE, 索引换算为 S 的行号"""
    minority_index = np.flatnonzero(S.labels == 1)
    batch = smote(S.rows[minority_index], N, k, seed)
    logger.debug("SMOTE%d on %s: %d synthetic rows", N, S.name, batch.n0)
    return SyntheticBatch(
        rows=batch.rows,
        base_index=minority_index[batch.base_index],
        neighbor_index=minority_index[batch.neighbor_index],
        r=batch.r,
        branch=batch.branch,
    )


def augment(S: DefectDataset, batch: SyntheticBatch) -> DefectDataset:
    """把合成样本 (标签 1) 追加到源数据集之后"""
    if batch.n0 == 0:
        return S
    if batch.rows.shape[1] != S.n_features:
        raise DimensionMismatchError("Synthetic rows do not match the source feature count")
    return S.replace_rows(
        np.vstack([S.rows, batch.rows]),
        np.concatenate([S.labels, np.ones(batch.n0, dtype=int)]),
        synthetic_rows=batch.n0,
        sampler_branch=batch.branch,
    )
