import tempfile
import unittest
from pathlib import Path

from core.dataset import DatasetStats
from core.evaluator import EvalRecord
from core.exceptions import DatasetFormatError, EmptyDatasetError
from core.harness import PairResult, SweepRow, compare
from utils.report import comparison_table, results_table, stats_table, sweep_table
from utils.results_io import read_results, summary_path, write_results, write_sweep


def results():
    return [
        PairResult("tomcat", "jedit-4.0", (EvalRecord(0.5, 0.25, 0.6, 0.3), EvalRecord(0.75, 0.5, 0.6, 0.2))),
        PairResult("camel-1.0", "ant-1.7", (EvalRecord(1.0, 0.0, 1.0, 1.0), EvalRecord(0.0, 0.0, 0.0, 0.0))),
    ]


class ResultsFileTest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_header_and_summary(self):
        path = write_results(results(), self.dir / "out" / "r.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        self.assertEqual(lines[0], "source,target,repetition,pd,pf,g_measure,mcc")
        self.assertEqual(len(lines), 5)
        self.assertTrue(lines[1].startswith("tomcat,jedit-4.0,0,"))
        summary = summary_path(path)
        self.assertEqual(summary.name, "r_summary.txt")
        self.assertIn("Average", summary.read_text(encoding="utf-8"))

    def test_read_back_keeps_pair_order(self):
        path = write_results(results(), self.dir / "r.csv")
        loaded = read_results(path)
        self.assertEqual([(r.source, r.target) for r in loaded], [("tomcat", "jedit-4.0"), ("camel-1.0", "ant-1.7")])
        self.assertEqual(loaded[0].records, results()[0].records)
        self.assertEqual(loaded[1].repetitions, 2)

    def test_repeated_writes_are_byte_identical(self):
        first = write_results(results(), self.dir / "a.csv")
        second = write_results(results(), self.dir / "b.csv")
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_malformed_files(self):
        missing = self.dir / "missing.csv"
        missing.write_text("source,target,pd\na,b,0.5\n", encoding="utf-8")
        with self.assertRaises(DatasetFormatError):
            read_results(missing)
        header_only = self.dir / "header.csv"
        header_only.write_text("source,target,repetition,pd,pf,g_measure,mcc\n", encoding="utf-8")
        with self.assertRaises(EmptyDatasetError):
            read_results(header_only)
        with self.assertRaises(FileNotFoundError):
            read_results(self.dir / "nope.csv")

    def test_sweep_file(self):
        rows = [SweepRow(0.0, 0.5, 0.1, 0.2, 0.05), SweepRow(0.5, 0.6, 0.1, 0.3, 0.05)]
        path = write_sweep(rows, "lambda", self.dir / "sweep.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        self.assertEqual(lines[0], "lambda,mean_g,std_g,mean_mcc,std_mcc")
        self.assertEqual(len(lines), 3)


class ReportTest(unittest.TestCase):
    def test_results_table(self):
        text = results_table(results())
        self.assertIn("tomcat=>jedit-4.0", text)
        self.assertIn("0.600±0.000", text)
        self.assertIn("Average", text)

    def test_stats_table(self):
        text = stats_table([DatasetStats("tomcat", 20, 858, 77, 77 / 858)])
        self.assertIn("0.0897", text)
        self.assertIn("Defective Rate", text)

    def test_comparison_table(self):
        text = comparison_table(compare(results(), results()))
        self.assertIn("Win/Tie/Lose", text)
        self.assertIn("0/2/0", text)

    def test_sweep_table(self):
        text = sweep_table([SweepRow(0.4, 0.5, 0.1, 0.2, 0.05)], "lambda")
        self.assertIn("0.4", text)
        self.assertIn("mean MCC", text)


if __name__ == "__main__":
    unittest.main()
