import tempfile
import unittest
from pathlib import Path

from core.config import ExperimentConfig, config_from_mapping, load_config, resolve_method
from core.exceptions import ConfigError


class ConfigFromMappingTest(unittest.TestCase):
    def test_defaults(self):
        cfg = config_from_mapping({"dataset_dir": "data"}, base_dir=Path("/exp"), env={})
        self.assertEqual(cfg.dataset_dir, Path("/exp/data"))
        self.assertEqual((cfg.method, cfg.ratio, cfg.lam, cfg.sigma), ("tomofwtnb", 1.0, 0.4, 1.0))
        self.assertEqual((cfg.repetitions, cfg.train_fraction), (30, 0.9))
        self.assertEqual((cfg.smote_percent, cfg.smote_k), (100, 5))
        self.assertEqual((cfg.mine.alpha, cfg.mine.c), (0.6, 15))
        self.assertEqual(cfg.pairs, "auto")
        self.assertIsNone(cfg.model_dir)

    def test_nested_sections_and_pairs(self):
        cfg = config_from_mapping({
            "dataset_dir": "/abs/data",
            "lambda": 0.7,
            "sigma": 2,
            "smote": {"percent": 300, "k_neighbors": 3},
            "mine": {"alpha": 0.5},
            "pairs": [["tomcat", "jedit-4.0"]],
            "model_dir": "models",
        }, base_dir=Path("/exp"), env={})
        self.assertEqual(cfg.dataset_dir, Path("/abs/data"))
        self.assertEqual((cfg.lam, cfg.sigma), (0.7, 2.0))
        self.assertEqual((cfg.smote_percent, cfg.smote_k, cfg.mine.alpha), (300, 3, 0.5))
        self.assertEqual(cfg.pairs, (("tomcat", "jedit-4.0"),))
        self.assertEqual(cfg.model_dir, Path("/exp/models"))

    def test_seed_from_environment(self):
        cfg = config_from_mapping({"dataset_dir": "d", "seed": 1}, env={"CPDP_SEED": "99"})
        self.assertEqual(cfg.seed, 99)
        with self.assertRaises(ConfigError):
            config_from_mapping({"dataset_dir": "d"}, env={"CPDP_SEED": "abc"})

    def test_unknown_keys(self):
        with self.assertRaises(ConfigError):
            config_from_mapping({"dataset_dir": "d", "lamda": 0.3}, env={})
        with self.assertRaises(ConfigError):
            config_from_mapping({"dataset_dir": "d", "smote": {"k": 3}}, env={})

    def test_invalid_values(self):
        for bad in ({"train_fraction": 0.0}, {"train_fraction": 1.5}, {"repetitions": 0},
                    {"lambda": 1.2}, {"sigma": 0}, {"ratio": -1}, {"smote": {"percent": 150}},
                    {"smote": {"k_neighbors": 0}}, {"method": "svm"}, {"repetitions": "ten"},
                    {"interpolate": "yes"}, {"pairs": "all"}, {"log_level": "LOUD"}):
            with self.subTest(bad=bad), self.assertRaises(ConfigError):
                config_from_mapping(dict({"dataset_dir": "d"}, **bad), env={})

    def test_missing_dataset_dir(self):
        with self.assertRaises(ConfigError):
            config_from_mapping({}, env={})


class LoadConfigTest(unittest.TestCase):
    def test_paths_resolve_against_config_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "conf" / "exp.yaml"
            path.parent.mkdir()
            path.write_text("dataset_dir: ../data\noutput: out/r.csv\nrepetitions: 3\n", encoding="utf-8")
            cfg = load_config(path, env={})
        self.assertEqual(cfg.dataset_dir, Path(tmp) / "conf" / ".." / "data")
        self.assertEqual(cfg.output, Path(tmp) / "conf" / "out" / "r.csv")
        self.assertEqual(cfg.repetitions, 3)

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            load_config("/nonexistent/exp.yaml", env={})

    def test_invalid_yaml(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bad.yaml"
            path.write_text("dataset_dir: [unclosed\n", encoding="utf-8")
            with self.assertRaises(ConfigError):
                load_config(path, env={})

    def test_shipped_config_is_valid(self):
        path = Path(__file__).resolve().parents[2] / "configs" / "experiment_config.yaml"
        cfg = load_config(path, env={})
        self.assertEqual(cfg.method, "tomofwtnb")


class MethodTest(unittest.TestCase):
    def test_resolution(self):
        spec = resolve_method("smote300+tnb")
        self.assertEqual((spec.sampler, spec.classifier, spec.smote_percent), ("smote", "tnb", 300))
        self.assertEqual(resolve_method("smote+tnb", 400).smote_percent, 400)
        self.assertEqual(resolve_method("fwtnb+smote100", 400).smote_percent, 100)
        self.assertEqual(resolve_method("tomofwtnb").sampler, "tomo")
        self.assertIsNone(resolve_method("tnb").sampler)
        with self.assertRaises(ConfigError):
            resolve_method("smote600+tnb")

    def test_replace_revalidates(self):
        cfg = ExperimentConfig(dataset_dir=Path("d"))
        self.assertEqual(cfg.replace(sigma=2.0).sigma, 2.0)
        with self.assertRaises(ConfigError):
            cfg.replace(sigma=-1.0)


if __name__ == "__main__":
    unittest.main()
