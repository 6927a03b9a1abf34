"""实验配置: YAML 文件映射到 ExperimentConfig, 并做取值校验"""
import dataclasses
import logging
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple, Union

import yaml

from core.exceptions import ConfigError
from core.mic import MineParams

logger = logging.getLogger(__name__)

SEED_ENV = "CPDP_SEED"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

# 方法名 -> (过采样器, 分类器, SMOTE 百分比; None 表示取 smote.percent)
METHODS: Dict[str, Tuple[Optional[str], str, Optional[int]]] = {
    "tomofwtnb": ("tomo", "fwtnb", None),
    "tomo+tnb": ("tomo", "tnb", None),
    "smote+tnb": ("smote", "tnb", None),
    "fwtnb+smote100": ("smote", "fwtnb", 100),
    "tnb+smote100": ("smote", "tnb", 100),
    "tnb": (None, "tnb", None),
    "fwtnb": (None, "fwtnb", None),
}
_INLINE_SMOTE = re.compile(r"^smote([1-5]00)\+tnb$")


@dataclass(frozen=True)
class MethodSpec:
    name: str
    sampler: Optional[str]  # tomo / smote / None
    classifier: str  # fwtnb / tnb
    smote_percent: Optional[int] = None


def resolve_method(name: str, smote_percent: int = 100) -> MethodSpec:
    """把方法名解析为 (过采样器, 分类器); smoteN+tnb 中 N 取 100..500"""
    inline = _INLINE_SMOTE.match(name)
    if inline:
        return MethodSpec(name, "smote", "tnb", int(inline.group(1)))
    if name not in METHODS:
        known = sorted(METHODS) + ["smoteN+tnb (N in 100..500)"]
        raise ConfigError(f"Unknown method '{name}'; expected one of {known}")
    sampler, classifier, percent = METHODS[name]
    if sampler == "smote" and percent is None:
        percent = smote_percent
    return MethodSpec(name, sampler, classifier, percent)


@dataclass(frozen=True)
class ExperimentConfig:
    """
    一次实验的全部参数 (默认值即论文实验的默认超参数)

    Args:
        dataset_dir: PROMISE CSV 所在目录
        pairs: "auto" 或 [(source, target), ...]
        method: 方法名, 见 METHODS
        ratio / lam / sigma: TOMO 比例, 近邻混合权重, FWTNB 温度
        repetitions / train_fraction: 每个数据对的重复次数与源数据抽样比例
        seed: 主随机种子
        output: 结果 CSV 路径
    """
    dataset_dir: Path
    pairs: Union[str, Tuple[Tuple[str, str], ...]] = "auto"
    method: str = "tomofwtnb"
    ratio: float = 1.0
    lam: float = 0.4
    sigma: float = 1.0
    repetitions: int = 30
    train_fraction: float = 0.9
    seed: int = 0
    output: Path = Path("results/results.csv")
    bug_column: str = "bug"
    smote_percent: int = 100
    smote_k: int = 5
    mine: MineParams = field(default_factory=MineParams)
    interpolate: bool = False
    normalized_similarity: bool = False
    n_jobs: int = 1
    model_dir: Optional[Path] = None
    log_level: str = "INFO"

    def __post_init__(self):
        if not 0 < self.train_fraction <= 1:
            raise ConfigError(f"train_fraction must be in (0, 1], got {self.train_fraction}")
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")
        if not 0 <= self.lam <= 1:
            raise ConfigError(f"lambda must be in [0, 1], got {self.lam}")
        if not self.sigma > 0:
            raise ConfigError(f"sigma must be > 0, got {self.sigma}")
        if not self.ratio > 0:
            raise ConfigError(f"ratio must be > 0, got {self.ratio}")
        if self.smote_percent <= 0 or self.smote_percent % 100:
            raise ConfigError(f"smote.percent must be a positive multiple of 100, got {self.smote_percent}")
        if self.smote_k < 1:
            raise ConfigError(f"smote.k_neighbors must be >= 1, got {self.smote_k}")
        if self.n_jobs == 0:
            raise ConfigError("n_jobs must be non-zero")
        if self.log_level not in LOG_LEVELS:
            raise ConfigError(f"log_level must be one of {LOG_LEVELS}, got {self.log_level}")
        if self.pairs != "auto":
            if isinstance(self.pairs, str) or any(not isinstance(p, (list, tuple)) for p in self.pairs):
                raise ConfigError("pairs must be 'auto' or a non-empty list of [source, target] names")
            pairs = tuple(tuple(p) for p in self.pairs)
            if not pairs or any(len(p) != 2 or not all(isinstance(n, str) for n in p) for p in pairs):
                raise ConfigError("pairs must be 'auto' or a non-empty list of [source, target] names")
            object.__setattr__(self, "pairs", pairs)
        resolve_method(self.method, self.smote_percent)

    @property
    def method_spec(self) -> MethodSpec:
        return resolve_method(self.method, self.smote_percent)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def _expect(value, kind, key: str):
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, bool):
        raise ConfigError(f"'{key}' must be an integer, got {value!r}")
    if not isinstance(value, kind):
        raise ConfigError(f"'{key}' must be of type {kind.__name__}, got {value!r}")
    return value


def _resolve(path, base_dir: Path) -> Path:
    path = Path(path).expanduser()
    return path if path.is_absolute() else (base_dir / path)


_SCALARS = {
    "method": str, "ratio": float, "lambda": float, "sigma": float, "repetitions": int,
    "train_fraction": float, "seed": int, "bug_column": str, "interpolate": bool,
    "normalized_similarity": bool, "n_jobs": int, "log_level": str,
}
_RENAMED = {"lambda": "lam"}
_SECTIONS = {
    "smote": {"percent": ("smote_percent", int), "k_neighbors": ("smote_k", int)},
    "mine": {"alpha": ("alpha", float), "c": ("c", int)},
}
_PATHS = ("dataset_dir", "output", "model_dir")


def config_from_mapping(data: Mapping, base_dir: Path = Path("."),
                        env: Optional[Mapping[str, str]] = None) -> ExperimentConfig:
    """由已解析的 YAML 映射构造配置; 相对路径以 base_dir 为基准"""
    if not isinstance(data, Mapping):
        raise ConfigError("Configuration must be a mapping of keys to values")
    env = os.environ if env is None else env
    allowed = set(_SCALARS) | set(_SECTIONS) | set(_PATHS) | {"pairs"}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"Unknown configuration key '{unknown[0]}'")
    if "dataset_dir" not in data:
        raise ConfigError("Configuration needs 'dataset_dir'")

    kwargs = {}
    for key, kind in _SCALARS.items():
        if key in data:
            kwargs[_RENAMED.get(key, key)] = _expect(data[key], kind, key)

    mine_kwargs = {}
    for section, fields in _SECTIONS.items():
        values = data.get(section) or {}
        if not isinstance(values, Mapping):
            raise ConfigError(f"'{section}' must be a mapping")
        extra = sorted(set(values) - set(fields))
        if extra:
            raise ConfigError(f"Unknown configuration key '{section}.{extra[0]}'")
        for key, (target, kind) in fields.items():
            if key in values:
                value = _expect(values[key], kind, f"{section}.{key}")
                (mine_kwargs if section == "mine" else kwargs)[target] = value
    kwargs["mine"] = MineParams(**mine_kwargs)

    for key in _PATHS:
        if data.get(key) is not None:
            kwargs[key] = _resolve(_expect(data[key], str, key), base_dir)

    pairs = data.get("pairs", "auto")
    if pairs != "auto":
        if not isinstance(pairs, list):
            raise ConfigError("pairs must be 'auto' or a list of [source, target]")
        kwargs["pairs"] = pairs

    if env.get(SEED_ENV) is not None:
        raw = env[SEED_ENV]
        try:
            kwargs["seed"] = int(raw)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}")
        logger.info("Seed overridden by %s=%s", SEED_ENV, raw)

    return ExperimentConfig(**kwargs)


def load_config(path, env: Optional[Mapping[str, str]] = None) -> ExperimentConfig:
    """读取 YAML 配置文件"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Configuration file not found: {path}")
    with open(path, encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}: invalid YAML ({e})")
    return config_from_mapping(data or {}, base_dir=path.parent, env=env)
