"""
跨项目缺陷预测实验流程

源/目标数据对的构造、每次重复的抽样与方法流水线、结果汇总、方法间的统计比较以及参数扫描。
"""
import hashlib
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from core.config import ExperimentConfig
from core.dataset import DatasetStats, DefectDataset, load_dataset_dir, prepare, summarize
from core.discretize import apply, fit_all
from core.evaluator import EvalRecord, StatResult, compare_samples, confusion, metrics
from core.exceptions import ConfigError, InsufficientDataError, PairMismatchError, SubsampleError
from core.fwtnb import (
    FwtnbModel,
    fit,
    instance_weights,
    predict_batch,
    save_model,
    target_ranges,
    tnb_predict_batch,
)
from core.mic import MicProfile, mic_profile
from core.sampling import TomoParams, augment, smote_dataset, tomo

logger = logging.getLogger(__name__)

METRICS = ("pd", "pf", "g_measure", "mcc")
N_SOURCES = 7
N_TARGETS = 5
MAX_REDRAWS = 10
SWEEP_PARAMS = {"lambda": "lam", "sigma": "sigma"}

Pair = Tuple[str, str]


@dataclass(frozen=True, eq=False)
class PairResult:
    """一个数据对的全部重复结果, 均值/标准差可由 records 重新计算"""
    source: str
    target: str
    records: Tuple[EvalRecord, ...]
    model: Optional[FwtnbModel] = field(default=None, repr=False)

    @property
    def repetitions(self) -> int:
        return len(self.records)

    def values(self, metric: str) -> np.ndarray:
        return np.array([getattr(r, metric) for r in self.records], dtype=float)

    def mean(self, metric: str) -> float:
        return float(self.values(metric).mean())

    def std(self, metric: str) -> float:
        # 样本标准差; 只有一次重复时为 0
        values = self.values(metric)
        return float(values.std(ddof=1)) if values.size > 1 else 0.0


@dataclass(frozen=True)
class PairComparison:
    source: str
    target: str
    stats: Dict[str, StatResult]


@dataclass(frozen=True)
class Comparison:
    pairs: List[PairComparison]
    totals: Dict[str, Dict[str, int]]  # metric -> {Win, Tie, Lose}
    average_a: Dict[str, float]
    average_b: Dict[str, float]
    improvement: Dict[str, float]  # (A - B) / |B| 的平均值比较, B 为 0 时为 nan


@dataclass(frozen=True)
class SweepRow:
    value: float
    mean_g: float
    std_g: float
    mean_mcc: float
    std_mcc: float


def build_pairs(stats: Sequence[DatasetStats], n_sources: int = N_SOURCES,
                n_targets: int = N_TARGETS) -> List[Pair]:
    """
    缺陷率最低的 n_sources 个数据集作源, 最高的 n_targets 个作目标, 去掉源与目标相同的组合

    缺陷率相同时按名称排序。结果按目标分组, 组内按源的缺陷率升序。
    """
    names = [s.name for s in stats]
    if len(set(names)) != len(names):
        raise ConfigError("Dataset names must be distinct to build pairs")
    required = n_sources + n_targets - 1
    if len(stats) < required:
        raise InsufficientDataError(f"Building pairs needs at least {required} datasets, got {len(stats)}")

    ascending = sorted(stats, key=lambda s: (s.defective_rate, s.name))
    sources = [s.name for s in ascending[:n_sources]]
    largest = sorted(stats, key=lambda s: (-s.defective_rate, s.name))[:n_targets]
    targets = [s.name for s in sorted(largest, key=lambda s: (s.defective_rate, s.name))]
    return [(src, tgt) for tgt in targets for src in sources if src != tgt]


def derive_seed(*parts) -> int:
    """由主种子和 (源, 目标, 重复号, ...) 派生出稳定的 32 位种子, 与执行顺序无关"""
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def run_method(train: DefectDataset, target: DefectDataset, cfg: ExperimentConfig,
               seed: int) -> Tuple[EvalRecord, FwtnbModel]:
    """在一份训练数据上执行配置的方法, 并在完整目标数据上评估"""
    spec = cfg.method_spec
    if spec.sampler == "tomo":
        batch = tomo(train, target.rows, TomoParams(cfg.ratio, cfg.lam, seed), interpolate=cfg.interpolate)
        train = augment(train, batch)
    elif spec.sampler == "smote":
        batch = smote_dataset(train, spec.smote_percent, cfg.smote_k, seed)
        train = augment(train, batch)

    if spec.classifier == "fwtnb":
        mic = mic_profile(train, cfg.mine)
    else:
        mic = MicProfile.uniform(train.n_features)

    weights = instance_weights(train.rows, target_ranges(target.rows), mic, normalized=cfg.normalized_similarity)
    discretizer = fit_all(train)
    model = fit(apply(discretizer, train), train.labels, weights.w, mic, cfg.sigma, discretizer,
                feature_names=train.feature_names)

    target_bins = apply(discretizer, target)
    if spec.classifier == "fwtnb":
        predicted, _ = predict_batch(model, target_bins)
    else:
        predicted, _ = tnb_predict_batch(model, target_bins)
    return metrics(confusion(target.labels, predicted)), model


def _subsample(source: DefectDataset, fraction: float, seed: int) -> DefectDataset:
    if fraction >= 1.0:
        return source
    size = max(2, int(round(fraction * source.n_instances)))
    rng = np.random.default_rng(seed)
    return source.subset(np.sort(rng.choice(source.n_instances, size=size, replace=False)))


def run_pair(source: DefectDataset, target: DefectDataset, cfg: ExperimentConfig,
             show_progress: bool = False) -> PairResult:
    """
    对一个数据对重复执行 cfg.repetitions 次

    每次重复从源数据无放回抽取 train_fraction 的样本; 抽样缺少某一类时换种子重抽,
    最多重抽 MAX_REDRAWS 次。
    """
    logger.info("Pair %s => %s: %s x %d", source.name, target.name, cfg.method, cfg.repetitions)
    records = []
    model = None
    for rep in tqdm(range(cfg.repetitions), desc=f"{source.name}=>{target.name}",
                    disable=not show_progress, leave=False):
        for attempt in range(MAX_REDRAWS + 1):
            seed = derive_seed(cfg.seed, source.name, target.name, rep, attempt)
            train = _subsample(source, cfg.train_fraction, seed)
            if np.unique(train.labels).size == 2:
                break
            logger.warning("Subsample of %s (repetition %d, attempt %d) has a single class; redrawing",
                           source.name, rep, attempt)
        else:
            raise SubsampleError(
                f"Subsample of {source.name} lacks a class after {MAX_REDRAWS} redraws (repetition {rep})")
        record, model = run_method(train, target, cfg, derive_seed(seed, "method"))
        records.append(record)

    result = PairResult(source.name, target.name, tuple(records), model)
    logger.info("Pair %s => %s done: G=%.3f MCC=%.3f", source.name, target.name,
                result.mean("g_measure"), result.mean("mcc"))
    return result


def load_experiment_data(cfg: ExperimentConfig) -> Tuple[Dict[str, DefectDataset], List[DatasetStats]]:
    """读取全部数据集; 统计量取自原始数据, 实验使用清洗并对数变换后的数据"""
    raw = load_dataset_dir(cfg.dataset_dir, bug_column=cfg.bug_column)
    stats = [summarize(ds) for ds in raw]
    return {ds.name: prepare(ds) for ds in raw}, stats


def resolve_pairs(cfg: ExperimentConfig, datasets: Dict[str, DefectDataset],
                  stats: Sequence[DatasetStats]) -> List[Pair]:
    if cfg.pairs == "auto":
        return build_pairs(stats)
    missing = sorted({name for pair in cfg.pairs for name in pair} - set(datasets))
    if missing:
        raise ConfigError(f"Configured pairs name unknown datasets: {missing}")
    return list(cfg.pairs)


def run_pairs(cfg: ExperimentConfig, datasets: Dict[str, DefectDataset], pairs: Sequence[Pair]) -> List[PairResult]:
    if cfg.n_jobs == 1:
        return [run_pair(datasets[s], datasets[t], cfg, show_progress=True) for s, t in pairs]
    return Parallel(n_jobs=cfg.n_jobs)(delayed(run_pair)(datasets[s], datasets[t], cfg) for s, t in pairs)


def run_experiment(cfg: ExperimentConfig) -> List[PairResult]:
    datasets, stats = load_experiment_data(cfg)
    pairs = resolve_pairs(cfg, datasets, stats)
    logger.info("Running %s on %d pairs", cfg.method, len(pairs))
    results = run_pairs(cfg, datasets, pairs)

    if cfg.model_dir is not None:
        for result in results:
            save_model(result.model, cfg.model_dir / f"{result.source}__{result.target}.json")
    return results


def average(results: Sequence[PairResult], metric: str) -> float:
    """所有数据对均值的平均 (汇总表的 Average 行)"""
    return float(np.mean([r.mean(metric) for r in results]))


def compare(results_a: Sequence[PairResult], results_b: Sequence[PairResult]) -> Comparison:
    """逐数据对比较两种方法的重复结果 (秩和检验 + Cliff's delta)"""
    by_pair_b = {(r.source, r.target): r for r in results_b}
    keys_a = [(r.source, r.target) for r in results_a]
    if len(set(keys_a)) != len(keys_a) or set(keys_a) != set(by_pair_b) or len(by_pair_b) != len(results_b):
        raise PairMismatchError("The two result sets cover different source/target pairs")

    pairs = []
    totals = {m: {"Win": 0, "Tie": 0, "Lose": 0} for m in METRICS}
    for a in results_a:
        b = by_pair_b[(a.source, a.target)]
        if a.repetitions != b.repetitions:
            raise PairMismatchError(
                f"{a.source} => {a.target}: {a.repetitions} repetitions vs {b.repetitions}")
        stats = {m: compare_samples(a.values(m), b.values(m)) for m in METRICS}
        for m, stat in stats.items():
            totals[m][stat.verdict] += 1
        pairs.append(PairComparison(a.source, a.target, stats))

    average_a = {m: average(results_a, m) for m in METRICS}
    average_b = {m: average(list(by_pair_b.values()), m) for m in METRICS}
    improvement = {
        m: (average_a[m] - average_b[m]) / abs(average_b[m]) if average_b[m] else math.nan
        for m in METRICS
    }
    return Comparison(pairs, totals, average_a, average_b, improvement)


def sweep(param: str, values: Sequence[float], cfg: ExperimentConfig) -> List[SweepRow]:
    """
    对 lambda 或 sigma 做参数扫描

    每个取值下每个数据对只用全部源数据训练一次, 汇总各数据对的 G-Measure 与 MCC。
    """
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"Sweep parameter must be one of {sorted(SWEEP_PARAMS)}, got '{param}'")
    if not values:
        raise ConfigError("Sweep needs at least one value")

    datasets, stats = load_experiment_data(cfg)
    pairs = resolve_pairs(cfg, datasets, stats)
    rows = []
    for value in tqdm(values, desc=f"sweep {param}", disable=cfg.n_jobs != 1):
        run_cfg = cfg.replace(repetitions=1, train_fraction=1.0, **{SWEEP_PARAMS[param]: float(value)})
        results = run_pairs(run_cfg, datasets, pairs)
        g = np.array([r.mean("g_measure") for r in results])
        mcc = np.array([r.mean("mcc") for r in results])
        rows.append(SweepRow(
            value=float(value),
            mean_g=float(g.mean()),
            std_g=float(g.std(ddof=1)) if g.size > 1 else 0.0,
            mean_mcc=float(mcc.mean()),
            std_mcc=float(mcc.std(ddof=1)) if mcc.size > 1 else 0.0,
        ))
        logger.info("Sweep %s=%s: G=%.3f MCC=%.3f", param, value, rows[-1].mean_g, rows[-1].mean_mcc)
    return rows
