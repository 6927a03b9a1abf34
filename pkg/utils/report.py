import math
from typing import List, Sequence

import pandas as pd

from core.dataset import DatasetStats
from core.fwtnb import FwtnbModel
from core.harness import METRICS, Comparison, PairResult, SweepRow, average

METRIC_TITLES = {"pd": "PD", "pf": "PF", "g_measure": "G-Measure", "mcc": "MCC"}


def _render(frame: pd.DataFrame) -> str:
    return frame.to_string(index=False) + "\n"


def _percent(value: float) -> str:
    return "n/a" if math.isnan(value) else f"{value:+.2%}"


def stats_table(stats: Sequence[DatasetStats]) -> str:
    """数据集统计表: 度量数, 实例数, 缺陷实例数, 缺陷率"""
    frame = pd.DataFrame(
        [(s.name, s.n_metrics, s.n_instances, s.n_defective, f"{s.defective_rate:.4f}") for s in stats],
        columns=["Dataset", "# Metrics", "# Instances", "# Defective", "Defective Rate"],
    )
    return _render(frame)


def results_table(results: Sequence[PairResult]) -> str:
    """mean±std 汇总表, 末行为各数据对均值的平均"""
    rows = []
    for r in results:
        rows.append([f"{r.source}=>{r.target}"] +
                    [f"{r.mean(m):.3f}±{r.std(m):.3f}" for m in METRICS])
    rows.append(["Average"] + [f"{average(results, m):.3f}" for m in METRICS])
    frame = pd.DataFrame(rows, columns=["Source=>Target"] + [METRIC_TITLES[m] for m in METRICS])
    return _render(frame)


def comparison_table(comparison: Comparison) -> str:
    rows = []
    for pair in comparison.pairs:
        row = [f"{pair.source}=>{pair.target}"]
        for m in METRICS:
            stat = pair.stats[m]
            row.append(f"{stat.verdict} p={stat.p_value:.3f} d={stat.delta:+.3f} ({stat.effect})")
        rows.append(row)
    headers = ["Source=>Target"] + [METRIC_TITLES[m] for m in METRICS]
    lines = [_render(pd.DataFrame(rows, columns=headers))]

    summary = pd.DataFrame(
        [[METRIC_TITLES[m],
          "{Win}/{Tie}/{Lose}".format(**comparison.totals[m]),
          f"{comparison.average_a[m]:.3f}",
          f"{comparison.average_b[m]:.3f}",
          _percent(comparison.improvement[m])] for m in METRICS],
        columns=["Metric", "Win/Tie/Lose", "Average A", "Average B", "Improvement"],
    )
    lines.append(_render(summary))
    return "\n".join(lines)


def sweep_table(rows: Sequence[SweepRow], param: str) -> str:
    frame = pd.DataFrame(
        [(f"{r.value:g}", f"{r.mean_g:.3f}", f"{r.std_g:.3f}", f"{r.mean_mcc:.3f}", f"{r.std_mcc:.3f}")
         for r in rows],
        columns=[param, "mean G-Measure", "std G-Measure", "mean MCC", "std MCC"],
    )
    return _render(frame)


def model_report(model: FwtnbModel) -> str:
    """模型概要: 类先验, 以及每个特征的 MIC、预测指数和区间数"""
    names: List[str] = list(model.feature_names) or [f"f{j}" for j in range(model.n_features)]
    header = (f"sigma={model.sigma:g}  MIC sum={model.mic.mic_sum:.4f}  "
              f"P(clean)={model.priors[0]:.4f}  P(defective)={model.priors[1]:.4f}\n\n")
    frame = pd.DataFrame(
        [(name, f"{mic:.4f}", f"{e:.4f}", int(n)) for name, mic, e, n in
         zip(names, model.mic.scores, model.exponents, model.discretizer.bin_counts)],
        columns=["Feature", "MIC", "Exponent", "Bins"],
    )
    return header + _render(frame)
