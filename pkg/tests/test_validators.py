import math
import unittest

import numpy as np

from src.validators import ParamValidators, ValidationError


class TestParamValidators(unittest.TestCase):

    def test_finite(self):
        self.assertTrue(ParamValidators.validate_finite([1.0, 2.0]))
        with self.assertRaises(ValidationError):
            ParamValidators.validate_finite(np.array([1.0, math.nan]))

    def test_positive(self):
        self.assertTrue(ParamValidators.validate_positive(0.5))
        for bad in (0, -1.0, math.inf, True, "1"):
            with self.subTest(value=bad):
                with self.assertRaises(ValidationError):
                    ParamValidators.validate_positive(bad)

    def test_integer(self):
        self.assertTrue(ParamValidators.validate_integer(np.int64(3), min_value=0, max_value=3))
        for bad in (1.0, True, -1, 4):
            with self.subTest(value=bad):
                with self.assertRaises(ValidationError):
                    ParamValidators.validate_integer(bad, min_value=0, max_value=3)

    def test_in_range_with_tolerance(self):
        self.assertTrue(ParamValidators.validate_in_range([0.0, 1.0 + 1e-13], 0.0, 1.0, tolerance=1e-12))
        with self.assertRaises(ValidationError):
            ParamValidators.validate_in_range(1.0 + 1e-13, 0.0, 1.0)
        self.assertTrue(ParamValidators.validate_in_range(np.array([]), 0.0, 1.0))

    def test_window(self):
        self.assertTrue(ParamValidators.validate_window(-3, 2))
        with self.assertRaises(ValidationError):
            ParamValidators.validate_window(2, 2)
        with self.assertRaises(ValidationError):
            ParamValidators.validate_window(0.0, 2)


if __name__ == '__main__':
    unittest.main()
