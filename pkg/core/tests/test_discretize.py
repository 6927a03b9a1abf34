import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from core.dataset import DefectDataset
from core.discretize import DiscretizationModel, apply, fit_all, fit_mdlp
from core.exceptions import DatasetFormatError, DimensionMismatchError


class FitMdlpTest(unittest.TestCase):
    def test_single_clean_split(self):
        cuts = fit_mdlp([1, 2, 3, 10, 11, 12], [0, 0, 0, 1, 1, 1])
        assert_allclose(cuts, [6.5])

    def test_order_of_input_does_not_matter(self):
        cuts = fit_mdlp([12, 1, 11, 2, 10, 3], [1, 0, 1, 0, 1, 0])
        assert_allclose(cuts, [6.5])

    def test_pure_class_has_no_cut(self):
        self.assertEqual(fit_mdlp([1, 5, 9, 13], [1, 1, 1, 1]).size, 0)

    def test_recursive_split_on_three_segments(self):
        values = np.arange(60, dtype=float)
        labels = np.r_[np.zeros(20), np.ones(20), np.zeros(20)]
        assert_allclose(fit_mdlp(values, labels), [19.5, 39.5])

    def test_tied_values_are_never_separated(self):
        cuts = fit_mdlp([1, 1, 1, 2, 2, 2, 3, 3], [0, 0, 1, 1, 1, 1, 1, 1])
        self.assertTrue(np.all(np.isin(cuts, [1.5, 2.5])))

    def test_length_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            fit_mdlp([1, 2, 3], [0, 1])


class DiscretizationModelTest(unittest.TestCase):
    def setUp(self):
        self.model = DiscretizationModel((np.array([6.5]), np.array([]), np.array([1.0, 2.0])))

    def test_bin_counts(self):
        assert_array_equal(self.model.bin_counts, [2, 1, 3])

    def test_apply_counts_cuts_strictly_below(self):
        rows = np.array([[6.5, 0.0, 1.0],
                         [6.6, 9.0, 1.5],
                         [-100, -9.0, 2.1]])
        assert_array_equal(apply(self.model, rows), [[0, 0, 0], [1, 0, 1], [0, 0, 2]])

    def test_apply_to_dataset_and_out_of_range(self):
        ds = DefectDataset("d", ("a", "b", "c"), np.array([[1e9, 0.0, -1e9]]), np.array([1]))
        assert_array_equal(apply(self.model, ds), [[1, 0, 0]])

    def test_feature_count_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            apply(self.model, np.zeros((2, 2)))

    def test_dict_form(self):
        restored = DiscretizationModel.from_dict(self.model.to_dict())
        self.assertEqual(restored.to_dict(), {"cuts": [[6.5], [], [1.0, 2.0]]})

    def test_cuts_must_ascend(self):
        with self.assertRaises(DatasetFormatError):
            DiscretizationModel((np.array([2.0, 1.0]),))

    def test_fit_all(self):
        rows = np.column_stack([[1, 2, 3, 10, 11, 12], [5, 5, 5, 5, 5, 5]])
        model = fit_all(DefectDataset("d", ("a", "b"), rows, np.array([0, 0, 0, 1, 1, 1])))
        assert_allclose(model.cuts[0], [6.5])
        self.assertEqual(model.cuts[1].size, 0)


if __name__ == "__main__":
    unittest.main()
