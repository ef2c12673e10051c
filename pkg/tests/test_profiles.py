import math
import unittest

import numpy as np

from src.analysis.profiles import (HALF_SQRT2, SQRT2, DualProfile, Norm2D, ProfileError, ProfileKind,
                                   averaged_profile, circle_cap_profile, h0, h0_profile, is_concave,
                                   legendre_profile, norm0, norm_from_profile, profile_sup_distance,
                                   rhombus_norm, rhombus_profile, section_of)
from src.validators import ValidationError


class TestRhombus(unittest.TestCase):

    def test_rhombus_norm_examples(self):
        norm = rhombus_norm(2.0, 1.0)
        self.assertAlmostEqual(norm(1.0, 1.0), 2.0)
        self.assertAlmostEqual(norm(2.0, 0.0), 3.0)
        self.assertAlmostEqual(norm(0.0, 2.0), 3.0)
        self.assertAlmostEqual(norm.D, 1.5)
        with self.assertRaises(ValidationError):
            rhombus_norm(0.0, 1.0)

    def test_rhombus_profile_examples(self):
        flat = rhombus_profile(SQRT2, SQRT2)
        self.assertAlmostEqual(flat(0.0), SQRT2)
        self.assertAlmostEqual(flat(SQRT2), 0.0)
        self.assertAlmostEqual(flat(-SQRT2), 0.0)
        self.assertAlmostEqual(rhombus_profile(2.0, 1.0)(0.5), 1.5)
        with self.assertRaises(ValidationError):
            rhombus_profile(1.0, -1.0)

    def test_round_trip(self):
        rng = np.random.Generator(np.random.PCG64(7))
        for _ in range(20):
            u, v = rng.uniform(0.25, 3.0, size=2)
            x, y = rng.uniform(-10.0, 10.0, size=(2, 200))
            recovered = norm_from_profile(rhombus_profile(u, v))(x, y)
            np.testing.assert_allclose(recovered, rhombus_norm(u, v)(x, y), atol=1e-9)


class TestAveraging(unittest.TestCase):

    def test_constant_sequence(self):
        profile = averaged_profile(np.zeros(5), 0, 5, SQRT2)
        xs = np.linspace(-SQRT2, SQRT2, 33)
        np.testing.assert_allclose(profile(xs), SQRT2 - np.abs(xs), atol=1e-12)

    def test_single_term(self):
        profile = averaged_profile([0.4], 0, 1, SQRT2)
        self.assertAlmostEqual(profile(0.1), SQRT2 - 0.3)

    def test_two_terms(self):
        profile = averaged_profile([-0.3, 0.3], 0, 2, SQRT2)
        self.assertAlmostEqual(profile(0.0), SQRT2 - 0.3)

    def test_average_of_rhombus_profiles(self):
        betas = np.array([-0.5, -0.1, 0.2, 0.6, 0.65])
        profile = averaged_profile(betas, 1, 4, SQRT2)
        xs = np.linspace(-SQRT2, SQRT2, 101)
        mean = np.mean([rhombus_profile(SQRT2 + b, SQRT2 - b)(xs) for b in betas[1:4]], axis=0)
        np.testing.assert_allclose(profile(xs), mean, atol=1e-12)

    def test_empty_window_and_range(self):
        with self.assertRaises(ValidationError):
            averaged_profile([0.1], 0, 0, SQRT2)
        with self.assertRaises(ValidationError):
            averaged_profile([0.9], 0, 1, SQRT2)

    def test_callable_sequence(self):
        profile = averaged_profile(lambda j: 0.1 * np.ones(len(j)), -3, 3, SQRT2)
        self.assertAlmostEqual(profile(0.1), SQRT2)


class TestTargetProfile(unittest.TestCase):

    def test_h0_values(self):
        self.assertAlmostEqual(h0(0.0), 1.0)
        self.assertAlmostEqual(h0(SQRT2), 0.0)
        self.assertAlmostEqual(h0(-SQRT2), 0.0)
        self.assertAlmostEqual(h0(HALF_SQRT2), HALF_SQRT2)
        self.assertAlmostEqual(math.sqrt(1.0 - 0.5), SQRT2 - HALF_SQRT2)
        with self.assertRaises(ValidationError):
            h0(2.0)

    def test_h0_smooth_at_junction(self):
        eps = 1e-6
        left = (h0(HALF_SQRT2) - h0(HALF_SQRT2 - eps)) / eps
        right = (h0(HALF_SQRT2 + eps) - h0(HALF_SQRT2)) / eps
        self.assertAlmostEqual(left, right, places=5)

    def test_norm0_examples(self):
        self.assertAlmostEqual(norm0(0.0, 1.0), 1.0)
        self.assertAlmostEqual(norm0(1.0, 0.0), SQRT2)
        self.assertAlmostEqual(norm0(1.0, 1.0), SQRT2)

    def test_norm0_dominates_euclid(self):
        rng = np.random.Generator(np.random.PCG64(3))
        x, y = rng.uniform(-5.0, 5.0, size=(2, 10_000))
        values = norm0(x, y)
        euclid = np.hypot(x, y)
        self.assertTrue(np.all(values >= euclid - 1e-12))
        close = np.abs(x) <= np.abs(y)
        np.testing.assert_allclose(values[close], euclid[close], atol=1e-12)
        self.assertTrue(np.all(values[~close] > euclid[~close]))

    def test_h0_is_dual_of_norm0(self):
        rng = np.random.Generator(np.random.PCG64(11))
        x, y = rng.uniform(-10.0, 10.0, size=(2, 300))
        np.testing.assert_allclose(norm_from_profile(h0_profile())(x, y), norm0(x, y), atol=1e-8)

    def test_circle_cap(self):
        norm = norm_from_profile(circle_cap_profile(1.0))
        self.assertAlmostEqual(norm(3.0, 4.0), 5.0, places=9)
        self.assertAlmostEqual(norm(-3.0, -4.0), 5.0, places=9)
        self.assertAlmostEqual(norm(2.5, 0.0), 2.5)


class TestConcavity(unittest.TestCase):

    def test_known_profiles_are_concave(self):
        self.assertTrue(is_concave(h0_profile()))
        self.assertTrue(is_concave(rhombus_profile(2.0, 1.0)))
        self.assertTrue(is_concave(averaged_profile([-0.5, 0.0, 0.5], 0, 3, SQRT2)))

    def test_non_concave_rejected(self):
        xs = np.linspace(-1.0, 1.0, 5)
        bumpy = DualProfile(1.0, ProfileKind.SAMPLED, xi=xs, values=np.array([0.0, 1.0, 0.0, 1.0, 0.0]))
        self.assertFalse(is_concave(bumpy))
        with self.assertRaises(ProfileError):
            norm_from_profile(bumpy)

    def test_profile_requires_data(self):
        with self.assertRaises(ProfileError):
            DualProfile(1.0, ProfileKind.AVERAGED, betas=np.array([]))
        with self.assertRaises(ProfileError):
            DualProfile(1.0, ProfileKind.CIRCLE_CAP)


class TestLegendre(unittest.TestCase):

    def test_euclidean_section(self):
        profile = legendre_profile(section_of(Norm2D(1.0, np.hypot)), grid=101)
        xs = np.linspace(-1.0, 1.0, 101)
        np.testing.assert_allclose(profile(xs), np.sqrt(1.0 - xs * xs), atol=1e-6)

    def test_rhombus_section(self):
        u, v = 1.8, 2.0 * SQRT2 - 1.8
        profile = legendre_profile(section_of(rhombus_norm(u, v)), grid=65)
        exact = rhombus_profile(u, v)(profile.xi)
        np.testing.assert_allclose(profile.values, exact, atol=1e-6)

    def test_flat_section(self):
        D = 1.5
        profile = legendre_profile(section_of(Norm2D(D, lambda x, y: D * np.abs(x) + np.abs(y))), grid=33)
        np.testing.assert_allclose(profile.values, np.ones(33), atol=1e-6)

    def test_section_properties(self):
        section = section_of(rhombus_norm(SQRT2, SQRT2))
        self.assertTrue(section.is_convex())
        self.assertLess(section.asymptotic_slope_gap(), 1e-3)


class TestSupDistance(unittest.TestCase):

    def test_identical(self):
        h = rhombus_profile(2.0, 1.0)
        self.assertEqual(profile_sup_distance(h, h), 0.0)

    def test_shifted_rhombus(self):
        b = 0.3
        distance = profile_sup_distance(rhombus_profile(SQRT2, SQRT2), rhombus_profile(SQRT2 + b, SQRT2 - b))
        self.assertAlmostEqual(distance, b, places=12)

    def test_mismatched_domains(self):
        with self.assertRaises(ProfileError):
            profile_sup_distance(rhombus_profile(1.0, 1.0), rhombus_profile(2.0, 2.0))

    def test_norm_difference_bound(self):
        rng = np.random.Generator(np.random.PCG64(5))
        for _ in range(200):
            u1, v1 = rng.uniform(0.25, 3.0, size=2)
            u2 = rng.uniform(0.05, u1 + v1 - 0.05)
            h1, h2 = rhombus_profile(u1, v1), rhombus_profile(u2, u1 + v1 - u2)
            x, y = rng.uniform(-10.0, 10.0, size=2)
            gap = abs(norm_from_profile(h1)(x, y) - norm_from_profile(h2)(x, y))
            self.assertLessEqual(gap, abs(y) * profile_sup_distance(h1, h2) + 1e-9)


if __name__ == '__main__':
    unittest.main()
