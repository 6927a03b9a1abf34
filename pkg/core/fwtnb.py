"""
特征加权迁移朴素贝叶斯 (FWTNB) 以及不加权的 TNB

训练: 按源样本与目标域取值范围的 MIC 加权匹配度计算数据引力权重,
用加权计数 + 拉普拉斯平滑估计先验和条件概率。
预测: 在对数空间中对每个特征的条件概率取指数 e_j = exp(MIC_j / (σ² · ΣMIC)),
TNB 即所有 e_j = 1 的特例。
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from core.dataset import DefectDataset
from core.discretize import DiscretizationModel
from core.exceptions import (
    ConfigError,
    DataError,
    DatasetFormatError,
    DimensionMismatchError,
    DomainError,
    EmptyDatasetError,
)
from core.mic import MicProfile

logger = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1
N_CLASSES = 2


def _matrix(data: Union[DefectDataset, np.ndarray]) -> np.ndarray:
    rows = data.rows if isinstance(data, DefectDataset) else np.asarray(data, dtype=float)
    if rows.ndim != 2:
        raise DimensionMismatchError("Expected a 2-D feature matrix")
    return rows


@dataclass(frozen=True, eq=False)
class TargetRanges:
    """目标数据每个特征的 [min, max]"""
    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        mins = np.asarray(self.mins, dtype=float).ravel()
        maxs = np.asarray(self.maxs, dtype=float).ravel()
        if mins.shape != maxs.shape:
            raise DimensionMismatchError("Range bounds differ in length")
        if np.any(mins > maxs):
            raise DomainError("Every target range needs min <= max")
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)

    @property
    def n_features(self) -> int:
        return self.mins.size

    @classmethod
    def unbounded(cls, k: int) -> "TargetRanges":
        return cls(np.full(k, -np.inf), np.full(k, np.inf))


@dataclass(frozen=True, eq=False)
class InstanceWeights:
    s: np.ndarray  # 加权匹配度
    w: np.ndarray  # 数据引力权重


def target_ranges(T) -> TargetRanges:
    T = _matrix(T)
    if T.shape[0] == 0:
        raise EmptyDatasetError("Target data is empty; cannot compute metric ranges")
    return TargetRanges(T.min(axis=0), T.max(axis=0))


def similarity(S, ranges: TargetRanges, mic: MicProfile) -> np.ndarray:
    """m_i = Σ_j h(a_ij) · MIC_j, h 为落在目标范围内的指示函数"""
    S = _matrix(S)
    if not S.shape[1] == ranges.n_features == len(mic):
        raise DimensionMismatchError(
            f"Feature counts disagree: source {S.shape[1]}, ranges {ranges.n_features}, MIC {len(mic)}")
    inside = (S >= ranges.mins) & (S <= ranges.maxs)
    return inside.astype(float) @ mic.scores


def gravitation_weights(s, mic_sum: float) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return s / (mic_sum - s + 1.0) ** 2


def instance_weights(S, ranges: TargetRanges, mic: MicProfile, normalized: bool = False) -> InstanceWeights:
    """
    源样本的数据引力权重

    Args:
        normalized: True 时先把匹配度除以 ΣMIC (取值 [0, 1]), 即 w = s / (2 - s)^2
    """
    s = similarity(S, ranges, mic)
    if mic.mic_sum == 0:
        logger.warning("All MIC scores are zero; every instance weight is 0 and training reduces to Laplace priors")
        return InstanceWeights(s=s, w=np.zeros_like(s))
    if normalized:
        s = s / mic.mic_sum
        return InstanceWeights(s=s, w=gravitation_weights(s, 1.0))
    return InstanceWeights(s=s, w=gravitation_weights(s, mic.mic_sum))


@dataclass(frozen=True, eq=False)
class FwtnbModel:
    """
    训练好的加权朴素贝叶斯模型 (不可变, 可在多个预测调用间共享)

    Args:
        priors: (2,) 类先验
        conditionals: 每个特征一个 (n_j, 2) 矩阵, [v, c] = P(a_j = v | c)
        mic: 特征的 MIC, 决定预测时的指数
        sigma: 指数的温度参数
        discretizer: 训练时使用的离散化模型
        feature_names: 特征名
    """
    priors: np.ndarray
    conditionals: Tuple[np.ndarray, ...]
    mic: MicProfile
    sigma: float
    discretizer: DiscretizationModel
    feature_names: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigError(f"sigma must be > 0, got {self.sigma}")
        if not len(self.conditionals) == len(self.mic) == self.discretizer.n_features:
            raise DimensionMismatchError("Model parts disagree on the number of features")
        object.__setattr__(self, "priors", np.asarray(self.priors, dtype=float))
        object.__setattr__(self, "conditionals", tuple(np.asarray(c, dtype=float) for c in self.conditionals))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_features(self) -> int:
        return len(self.conditionals)

    @property
    def exponents(self) -> np.ndarray:
        if self.mic.mic_sum == 0:
            return np.ones(self.n_features)
        return np.exp(self.mic.scores / (self.sigma ** 2 * self.mic.mic_sum))

    def to_dict(self) -> Dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "feature_names": list(self.feature_names),
            "sigma": self.sigma,
            "mic": self.mic.scores.tolist(),
            "priors": self.priors.tolist(),
            "conditionals": [c.tolist() for c in self.conditionals],
            "cuts": self.discretizer.to_dict()["cuts"],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "FwtnbModel":
        if not isinstance(data, dict):
            raise DatasetFormatError("Model document must be a JSON object")
        version = data.get("format_version")
        if version != MODEL_FORMAT_VERSION:
            raise DatasetFormatError(f"Unsupported model format_version {version!r}")
        try:
            return cls(
                priors=data["priors"],
                conditionals=tuple(data["conditionals"]),
                mic=MicProfile(data["mic"]),
                sigma=float(data["sigma"]),
                discretizer=DiscretizationModel.from_dict({"cuts": data["cuts"]}),
                feature_names=data.get("feature_names", ()),
            )
        except DataError:
            raise
        except KeyError as e:
            raise DatasetFormatError(f"Model document is missing {e}")
        except (TypeError, ValueError) as e:
            raise DatasetFormatError(f"Malformed model document: {e}")


def fit(bins, labels, w, mic: MicProfile, sigma: float, discretizer: DiscretizationModel,
        feature_names: Optional[Sequence[str]] = None) -> FwtnbModel:
    """
    加权训练

    P(c) = (Σ w_i[c_i = c] + 1) / (Σ w_i + 2)
    P(a_j = v | c) = (Σ w_i[a_ij = v][c_i = c] + 1) / (Σ w_i[c_i = c] + n_j)
    """
    bins = np.asarray(bins, dtype=int)
    labels = np.asarray(labels, dtype=int)
    w = np.asarray(w, dtype=float)
    n = bins.shape[0]
    if labels.shape != (n,) or w.shape != (n,):
        raise DimensionMismatchError(f"fit got {n} rows, {labels.size} labels and {w.size} weights")
    if bins.shape[1] != discretizer.n_features or len(mic) != discretizer.n_features:
        raise DimensionMismatchError("Discretized data, MIC profile and discretizer disagree on features")
    if np.any(w < 0):
        raise DomainError("Instance weights must be non-negative")
    counts = discretizer.bin_counts
    if np.any(bins < 0) or np.any(bins >= counts):
        raise DimensionMismatchError("Bin index outside the discretizer's range")

    class_weight = np.bincount(labels, weights=w, minlength=N_CLASSES)
    priors = (class_weight + 1.0) / (w.sum() + N_CLASSES)

    conditionals = []
    for j, n_j in enumerate(counts):
        weighted = np.zeros((n_j, N_CLASSES))
        np.add.at(weighted, (bins[:, j], labels), w)
        conditionals.append((weighted + 1.0) / (class_weight + n_j))

    return FwtnbModel(
        priors=priors,
        conditionals=tuple(conditionals),
        mic=mic,
        sigma=sigma,
        discretizer=discretizer,
        feature_names=tuple(feature_names) if feature_names is not None else (),
    )


def _scores(model: FwtnbModel, U, exponents: np.ndarray) -> np.ndarray:
    U = np.asarray(U, dtype=int)
    if U.ndim == 1:
        U = U.reshape(1, -1)
    if U.shape[1] != model.n_features:
        raise DimensionMismatchError(f"Row has {U.shape[1]} bins, model expects {model.n_features}")
    counts = model.discretizer.bin_counts
    if np.any(U < 0) or np.any(U >= counts):
        raise DimensionMismatchError("Bin index outside the discretizer's range")

    scores = np.tile(np.log(model.priors), (U.shape[0], 1))
    for j, table in enumerate(model.conditionals):
        scores += exponents[j] * np.log(table[U[:, j]])
    return scores


def _decide(scores: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    posteriors = np.exp(scores - logsumexp(scores, axis=1, keepdims=True))
    # 打分相同时判为无缺陷
    labels = (scores[:, 1] > scores[:, 0]).astype(int)
    return labels, posteriors


def predict_batch(model: FwtnbModel, U) -> Tuple[np.ndarray, np.ndarray]:
    return _decide(_scores(model, U, model.exponents))


def tnb_predict_batch(model: FwtnbModel, U) -> Tuple[np.ndarray, np.ndarray]:
    return _decide(_scores(model, U, np.ones(model.n_features)))


def predict(model: FwtnbModel, u) -> Tuple[int, np.ndarray]:
    labels, posteriors = predict_batch(model, np.asarray(u).reshape(1, -1))
    return int(labels[0]), posteriors[0]


def tnb_predict(model: FwtnbModel, u) -> Tuple[int, np.ndarray]:
    labels, posteriors = tnb_predict_batch(model, np.asarray(u).reshape(1, -1))
    return int(labels[0]), posteriors[0]


def save_model(model: FwtnbModel, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model.to_dict(), f, ensure_ascii=False, indent=2)
    logger.info("Model saved to %s", path)
    return path


def load_model(path) -> FwtnbModel:
    with open(path, encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise DatasetFormatError(f"{path}: not a model document ({e})")
    return FwtnbModel.from_dict(data)
