from pathlib import Path
from typing import Sequence

import numpy as np

from core.dataset import DefectDataset

METRIC_NAMES = ("wmc", "dit", "noc", "cbo")


def write_promise_csv(path, metrics: np.ndarray, bugs: Sequence[int], metric_names=METRIC_NAMES) -> Path:
    """写一个 PROMISE 风格的 CSV: name, version, name, 度量..., bug"""
    path = Path(path)
    header = ["name", "version", "name"] + list(metric_names) + ["bug"]
    lines = [",".join(header)]
    for i, (row, bug) in enumerate(zip(metrics, bugs)):
        cells = [path.stem, "1.0", f"org.example.Class{i}"] + [f"{v:g}" for v in row] + [str(bug)]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def synthetic_metrics(n: int, n_defective: int, seed: int, k: int = len(METRIC_NAMES)):
    """有缺陷的模块度量偏大的非负整数度量 (Poisson)"""
    rng = np.random.default_rng(seed)
    labels = np.zeros(n, dtype=int)
    labels[:n_defective] = 1
    rng.shuffle(labels)
    scale = np.where(labels[:, None] == 1, 12.0, 4.0) * (1.0 + np.arange(k))
    return rng.poisson(scale).astype(float), labels


def synthetic_dataset(name: str, n: int, n_defective: int, seed: int) -> DefectDataset:
    rows, labels = synthetic_metrics(n, n_defective, seed)
    return DefectDataset(name, METRIC_NAMES, np.log1p(rows), labels)
