import tempfile
import unittest
from pathlib import Path

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from core.dataset import (
    DefectDataset,
    clean,
    load_dataset_dir,
    load_promise_csv,
    log_transform,
    prepare,
    summarize,
)
from core.exceptions import (
    DatasetFormatError,
    DatasetParseError,
    DataError,
    DimensionMismatchError,
    DomainError,
    EmptyDatasetError,
)
from core.tests.helpers import write_promise_csv


class LoadPromiseCsvTest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name, text):
        path = self.dir / name
        path.write_text(text, encoding="utf-8")
        return path

    def test_identifier_columns_are_skipped_and_bug_count_binarized(self):
        path = write_promise_csv(self.dir / "ant-1.7.csv",
                                 np.array([[1, 2, 0, 3], [4, 5, 1, 6], [7, 8, 0, 9]]), [0, 3, 1])
        ds = load_promise_csv(path)
        self.assertEqual(ds.name, "ant-1.7")
        self.assertEqual(ds.feature_names, ("wmc", "dit", "noc", "cbo"))
        assert_array_equal(ds.labels, [0, 1, 1])
        assert_array_equal(ds.rows[1], [4, 5, 1, 6])
        self.assertEqual(ds.provenance["skipped_columns"], ["name", "version", "name.1"])

    def test_missing_bug_column(self):
        path = self.write("x.csv", "wmc,dit\n1,2\n")
        with self.assertRaises(DatasetFormatError):
            load_promise_csv(path)

    def test_custom_bug_column(self):
        path = self.write("x.csv", "wmc,defects\n1,0\n2,2\n")
        ds = load_promise_csv(path, bug_column="defects")
        assert_array_equal(ds.labels, [0, 1])

    def test_header_only_is_empty(self):
        path = self.write("x.csv", "wmc,dit,bug\n")
        with self.assertRaises(EmptyDatasetError):
            load_promise_csv(path)

    def test_non_numeric_metric_reports_row_and_column(self):
        path = self.write("x.csv", "name,wmc,dit,bug\nA,1,2,0\nB,oops,3,1\nC,4,5,0\nD,6,7,0\n")
        with self.assertRaises(DatasetParseError) as ctx:
            load_promise_csv(path)
        self.assertEqual(ctx.exception.row, 2)
        self.assertEqual(ctx.exception.column, "wmc")
        self.assertIsInstance(ctx.exception, DataError)

    def test_text_metric_column_after_metrics_is_a_parse_error(self):
        path = self.write("x.csv", "name,wmc,dit,cbo,bug\nA,1,x,2,0\nB,3,x,4,1\nC,5,6,7,0\n")
        with self.assertRaises(DatasetParseError) as ctx:
            load_promise_csv(path)
        self.assertEqual((ctx.exception.row, ctx.exception.column), (1, "dit"))

    def test_only_leading_columns_are_identifiers(self):
        path = self.write("x.csv", "name,version,wmc,dit,bug\nA,1.7,1,2,0\nB,1.7,3,4,1\n")
        ds = load_promise_csv(path)
        self.assertEqual(ds.feature_names, ("wmc", "dit"))
        self.assertEqual(ds.provenance["skipped_columns"], ["name", "version"])

    def test_missing_cells_load_as_nan(self):
        path = self.write("x.csv", "wmc,dit,bug\n1,?,0\n2,,1\n3,4,0\n")
        ds = load_promise_csv(path)
        self.assertTrue(np.isnan(ds.rows[0, 1]))
        self.assertTrue(np.isnan(ds.rows[1, 1]))
        self.assertEqual(clean(ds).n_instances, 1)

    def test_load_dataset_dir_is_sorted_by_name(self):
        write_promise_csv(self.dir / "b.csv", np.ones((2, 4)), [0, 1])
        write_promise_csv(self.dir / "a.csv", np.ones((2, 4)), [1, 0])
        self.assertEqual([ds.name for ds in load_dataset_dir(self.dir)], ["a", "b"])

    def test_load_dataset_dir_without_csv(self):
        with self.assertRaises(EmptyDatasetError):
            load_dataset_dir(self.dir)


class TransformTest(unittest.TestCase):
    def make(self, rows, labels):
        return DefectDataset("d", ("a", "b"), np.array(rows, dtype=float), np.array(labels))

    def test_clean_removes_duplicates_keeping_first_occurrence(self):
        ds = self.make([[3, 1], [1, 1], [3, 1], [3, 1], [np.nan, 2]], [0, 1, 0, 1, 0])
        cleaned = clean(ds)
        assert_array_equal(cleaned.rows, [[3, 1], [1, 1], [3, 1]])
        assert_array_equal(cleaned.labels, [0, 1, 1])

    def test_clean_is_idempotent(self):
        ds = self.make([[3, 1], [1, 1], [3, 1], [np.nan, 2], [1, 1]], [0, 1, 0, 0, 0])
        once = clean(ds)
        twice = clean(once)
        assert_array_equal(twice.rows, once.rows)
        assert_array_equal(twice.labels, once.labels)

    def test_clean_without_duplicates_or_missing_is_identity(self):
        ds = self.make([[3, 1], [1, 1], [2, 5]], [0, 1, 0])
        cleaned = clean(ds)
        assert_array_equal(cleaned.rows, ds.rows)
        assert_array_equal(cleaned.labels, ds.labels)

    def test_clean_to_empty(self):
        with self.assertRaises(EmptyDatasetError):
            clean(self.make([[np.nan, 1]], [0]))

    def test_log_transform(self):
        ds = log_transform(self.make([[0, np.e - 1]], [1]))
        assert_allclose(ds.rows, [[0.0, 1.0]])

    def test_log_transform_example_row(self):
        ds = DefectDataset("d", ("a", "b", "c"), np.array([[0.0, np.e - 1, np.e ** 2 - 1]]), np.array([0]))
        assert_allclose(log_transform(ds).rows, [[0.0, 1.0, 2.0]], atol=1e-12)

    def test_log_transform_is_strictly_monotone(self):
        values = np.sort(np.random.default_rng(0).uniform(0, 1000, size=(200, 2)), axis=0)
        ds = DefectDataset("d", ("a", "b"), values, np.zeros(200, dtype=int))
        transformed = log_transform(ds)
        self.assertTrue(np.all(np.diff(transformed.rows, axis=0) > 0))
        assert_array_equal(transformed.labels, ds.labels)

    def test_log_transform_rejects_negative(self):
        with self.assertRaises(DomainError):
            log_transform(self.make([[-1, 0]], [0]))

    def test_prepare_is_clean_then_log(self):
        ds = self.make([[1, 2], [1, 2]], [0, 0])
        assert_allclose(prepare(ds).rows, np.log1p([[1, 2]]))

    def test_summarize_rate(self):
        labels = np.r_[np.ones(78), np.zeros(151)].astype(int)
        stats = summarize(DefectDataset("velocity-1.6", ("a",), np.zeros((229, 1)), labels))
        self.assertEqual((stats.n_instances, stats.n_defective), (229, 78))
        self.assertEqual(round(stats.defective_rate, 4), 0.3406)

    def test_invalid_construction(self):
        with self.assertRaises(DimensionMismatchError):
            self.make([[1, 2]], [0, 1])
        with self.assertRaises(DatasetFormatError):
            self.make([[1, 2]], [2])
        with self.assertRaises(EmptyDatasetError):
            DefectDataset("d", ("a",), np.empty((0, 1)), np.empty(0))


if __name__ == "__main__":
    unittest.main()
