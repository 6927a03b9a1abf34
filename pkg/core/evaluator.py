import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import mannwhitneyu

from core.exceptions import DimensionMismatchError, DomainError, EmptyDatasetError, InsufficientDataError

logger = logging.getLogger(__name__)

SIGNIFICANCE = 0.05
EXACT_LIMIT = 16  # 两组样本总数不超过该值且无并列时用精确分布

NEGLIGIBLE, SMALL, MEDIUM, LARGE = "Negligible", "Small", "Medium", "Large"
WIN, TIE, LOSE = "Win", "Tie", "Lose"

# Cliff's delta 的效应量阈值 (|δ| 小于阈值即取对应标签)
EFFECT_THRESHOLDS = ((0.147, NEGLIGIBLE), (0.33, SMALL), (0.474, MEDIUM))


@dataclass(frozen=True)
class ConfusionMatrix:
    """有缺陷为正类"""
    tp: int
    fn: int
    fp: int
    tn: int

    def __post_init__(self):
        for name in ("tp", "fn", "fp", "tn"):
            if getattr(self, name) < 0:
                raise DomainError(f"Confusion count {name} must be non-negative")
        if self.total < 1:
            raise EmptyDatasetError("Confusion matrix is empty")

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn


@dataclass(frozen=True)
class EvalRecord:
    pd: float
    pf: float
    g_measure: float
    mcc: float

    def as_dict(self):
        return {"pd": self.pd, "pf": self.pf, "g_measure": self.g_measure, "mcc": self.mcc}


@dataclass(frozen=True)
class StatResult:
    p_value: float
    delta: float
    effect: str
    verdict: str


def confusion(actual, predicted) -> ConfusionMatrix:
    actual = np.asarray(actual, dtype=int).ravel()
    predicted = np.asarray(predicted, dtype=int).ravel()
    if actual.size != predicted.size:
        raise DimensionMismatchError(f"{actual.size} actual labels but {predicted.size} predictions")
    if actual.size == 0:
        raise InsufficientDataError("Cannot build a confusion matrix from no labels")
    return ConfusionMatrix(
        tp=int(np.sum((actual == 1) & (predicted == 1))),
        fn=int(np.sum((actual == 1) & (predicted == 0))),
        fp=int(np.sum((actual == 0) & (predicted == 1))),
        tn=int(np.sum((actual == 0) & (predicted == 0))),
    )


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def metrics(cm: ConfusionMatrix) -> EvalRecord:
    """
    PD = tp/(tp+fn), PF = fp/(fp+tn), G = 2·PD·(1-PF)/(PD+1-PF), MCC

    分母为 0 的指标记为 0; 没有任何正类预测 (tp = fp = 0) 时 MCC 定义为 0。
    """
    tp, fn, fp, tn = cm.tp, cm.fn, cm.fp, cm.tn
    pd = _ratio(tp, tp + fn)
    pf = _ratio(fp, fp + tn)
    g = _ratio(2 * pd * (1 - pf), pd + (1 - pf))

    if tp == 0 and fp == 0:
        mcc = 0.0
    else:
        den = math.sqrt(float(tp + fp) * (tp + fn) * (tn + fp) * (tn + fn))
        mcc = _ratio(float(tp) * tn - float(fp) * fn, den)
    return EvalRecord(pd=pd, pf=pf, g_measure=g, mcc=mcc)


def _check_samples(a, b):
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise InsufficientDataError("Statistical comparison needs two non-empty samples")
    return a, b


def wilcoxon_ranksum(a, b) -> float:
    """
    双侧 Wilcoxon 秩和检验的 p 值

    样本总数 <= 16 且无并列时用精确零分布, 否则用带并列修正和连续性修正的正态近似。
    """
    a, b = _check_samples(a, b)
    pooled = np.concatenate([a, b])
    if np.all(pooled == pooled[0]):
        return 1.0
    has_ties = np.unique(pooled).size < pooled.size
    if pooled.size <= EXACT_LIMIT and not has_ties:
        result = mannwhitneyu(a, b, alternative="two-sided", method="exact")
    else:
        result = mannwhitneyu(a, b, alternative="two-sided", method="asymptotic", use_continuity=True)
    return float(min(max(result.pvalue, 0.0), 1.0))


def effect_size(delta: float) -> str:
    magnitude = abs(delta)
    for threshold, label in EFFECT_THRESHOLDS:
        if magnitude < threshold:
            return label
    return LARGE


def cliffs_delta(a, b):
    """δ = (#{x > y} - #{x < y}) / (|a|·|b|), 返回 (δ, 效应量标签)"""
    a, b = _check_samples(a, b)
    delta = float(np.sign(a[:, None] - b[None, :]).sum() / (a.size * b.size))
    return delta, effect_size(delta)


def win_tie_lose(a, b) -> str:
    """p >= 0.05 为 Tie, 否则按均值判定 a 相对 b 的胜负"""
    return compare_samples(a, b).verdict


def compare_samples(a, b) -> StatResult:
    a, b = _check_samples(a, b)
    p = wilcoxon_ranksum(a, b)
    delta, effect = cliffs_delta(a, b)
    if p >= SIGNIFICANCE:
        verdict = TIE
    elif a.mean() > b.mean():
        verdict = WIN
    else:
        verdict = LOSE
    return StatResult(p_value=p, delta=delta, effect=effect, verdict=verdict)
