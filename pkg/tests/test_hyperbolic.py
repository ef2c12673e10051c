import math
import unittest

import numpy as np

from src.graph.hyperbolic import (ROOT, ConstructionError, HNet, HPoint, HyperbolicBuild, add_shortcuts,
                                  audit_net, audit_parents, audit_projection_readings, build_hyperbolic,
                                  build_net, build_tree, candidate_grid, choose_parent, degree_uniformity,
                                  dist_to_segment, estimate_morse_D, geodesic_point, h_dist, integerize,
                                  minkowski_pairing, net_rows, packing_bound, radial_segment_dist, reach_radius,
                                  root_exactness, sample_net_pairs, thinness_witness, tree_depths,
                                  verify_hyperbolic)
from src.validators import ValidationError

# ε 较小时父节点窗口才非平凡
RADIUS = 3.0
EPSILON = 0.25
DELTA = 1.0


class TestPoints(unittest.TestCase):

    def test_hyperboloid_validation(self):
        self.assertEqual(HPoint.origin().r, 0.0)
        p = HPoint.from_xy(3.0, 4.0)
        self.assertAlmostEqual(p.z, math.sqrt(26.0))
        with self.assertRaises(ValidationError):
            HPoint(1.0, 0.0, 1.0)
        with self.assertRaises(ValidationError):
            HPoint(0.0, 0.0, -1.0)

    def test_polar_round_trip(self):
        p = HPoint.from_polar(2.5, 1.2)
        self.assertAlmostEqual(p.r, 2.5, places=12)
        self.assertAlmostEqual(p.theta, 1.2, places=12)

    def test_distance(self):
        origin = HPoint.origin()
        self.assertAlmostEqual(h_dist(origin, HPoint.from_polar(2.0, 0.3)), 2.0, places=12)
        a, b = HPoint.from_polar(1.0, 0.2), HPoint.from_polar(1.5, 2.0)
        self.assertAlmostEqual(h_dist(a, b), h_dist(b, a), places=14)
        self.assertAlmostEqual(h_dist(a, b), math.acosh(minkowski_pairing(a, b)), places=9)
        self.assertEqual(h_dist(a, a), 0.0)
        self.assertAlmostEqual(h_dist(HPoint.from_polar(1.0, 0.0), HPoint.from_polar(1.0, math.pi)), 2.0, places=12)

    def test_geodesic_point(self):
        a, b = HPoint.from_polar(1.0, 0.2), HPoint.from_polar(2.0, 2.5)
        d = h_dist(a, b)
        mid = geodesic_point(a, b, 0.25)
        self.assertAlmostEqual(h_dist(a, mid), 0.25 * d, places=9)
        self.assertAlmostEqual(h_dist(mid, b), 0.75 * d, places=9)
        self.assertAlmostEqual(h_dist(geodesic_point(a, b, 0.0), a), 0.0, places=7)
        with self.assertRaises(ValidationError):
            geodesic_point(a, b, 1.5)

    def test_segment_distance(self):
        origin = HPoint.origin()
        q = HPoint.from_polar(3.0, 0.0)
        self.assertAlmostEqual(dist_to_segment(HPoint.from_polar(1.0, math.pi / 2), origin, q), 1.0, places=9)
        self.assertAlmostEqual(dist_to_segment(HPoint.from_polar(1.0, math.pi), origin, q), 1.0, places=9)
        self.assertAlmostEqual(dist_to_segment(HPoint.from_polar(4.0, 0.0), origin, q), 1.0, places=9)
        a, b = HPoint.from_polar(1.0, 0.4), HPoint.from_polar(2.0, -1.0)
        on_segment = np.array([geodesic_point(a, b, t).as_array() for t in np.linspace(0.0, 1.0, 9)])
        np.testing.assert_allclose(dist_to_segment(on_segment, a, b), 0.0, atol=1e-7)
        far = HPoint.from_polar(3.0, 2.5)
        self.assertLessEqual(dist_to_segment(far, a, b), min(h_dist(far, a), h_dist(far, b)) + 1e-9)

    def test_radial_segment_distance_is_vectorized(self):
        out = radial_segment_dist(np.array([0.0, 1.0, 2.0]), np.array([0.0, 0.0, 0.0]), 1.5, 0.0)
        np.testing.assert_allclose(out, [0.0, 0.0, 0.5], atol=1e-12)

    def test_packing_bound(self):
        self.assertGreaterEqual(packing_bound(3.0, 1.0), 1.0)
        self.assertEqual(packing_bound(1000.0, 1.0), math.inf)
        with self.assertRaises(ValidationError):
            packing_bound(3.0, 0.0)


class TestNet(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.net = build_net(RADIUS, EPSILON)
        cls.tree = build_tree(cls.net)

    def test_candidate_grid_order(self):
        r, theta = candidate_grid(RADIUS, EPSILON, 2.0)
        self.assertEqual((r[0], theta[0]), (0.0, 0.0))
        self.assertTrue(np.all(np.diff(r) >= 0))

    def test_net_is_separated_and_covering(self):
        audit = audit_net(self.net)
        self.assertEqual(self.net.r[0], 0.0)
        self.assertGreaterEqual(audit.min_separation, EPSILON - 1e-9)
        self.assertLess(audit.covering_radius, EPSILON)
        self.assertTrue(audit.holds)

    def test_nets_are_nested(self):
        smaller = build_net(RADIUS - 0.5, EPSILON)
        np.testing.assert_array_equal(smaller.r, self.net.r[:smaller.size])
        np.testing.assert_array_equal(smaller.theta, self.net.theta[:smaller.size])

    def test_radius_must_exceed_epsilon(self):
        with self.assertRaises(ValidationError):
            build_net(0.2, EPSILON)

    def test_parent_rules(self):
        net = self.net
        self.assertEqual(net.parent[ROOT], -1)
        self.assertEqual(net.tree_len[ROOT], 0.0)
        deep = 0
        for q in range(1, net.size):
            parent = int(net.parent[q])
            self.assertEqual(choose_parent(q, net), parent)
            if net.r[q] <= 5.0 * EPSILON:
                self.assertEqual(parent, ROOT)
            else:
                deep += 1
                self.assertGreater(net.r[parent], net.r[q] - 15.0 * EPSILON)
                self.assertLess(net.r[parent], net.r[q] - 5.0 * EPSILON)
        self.assertGreater(deep, 0)
        self.assertTrue(audit_parents(net).holds)

    def test_tree_shape(self):
        self.assertEqual(self.tree.edge_count, self.net.size - 1)
        depths = tree_depths(self.net)
        self.assertEqual(depths[ROOT], 0)
        self.assertGreaterEqual(int(depths.max()), 1)
        for v in range(1, self.net.size):
            self.assertEqual(depths[v], depths[int(self.net.parent[v])] + 1)
        q = int(np.argmax(depths))
        path = self.net.ancestors(q)
        self.assertEqual(path[-1], ROOT)
        self.assertEqual(len(path), depths[q] + 1)

    def test_morse_estimate(self):
        estimate = estimate_morse_D(self.net, self.tree)
        self.assertGreaterEqual(estimate, 0.0)
        sampled = estimate_morse_D(self.net, self.tree, sample=50, seed=3)
        self.assertLessEqual(sampled, estimate + 1e-12)

    def test_invalid_index(self):
        with self.assertRaises(ConstructionError):
            choose_parent(self.net.size, self.net)

    def test_degree_uniformity_restricts_the_tree(self):
        radii = (2.0, 2.5, RADIUS)
        result = degree_uniformity(self.net, radii)
        for radius, key in zip(radii, ('2', '2.5', '3')):
            with self.subTest(radius=radius):
                direct = build_tree(build_net(radius, EPSILON)).degrees().max()
                self.assertEqual(result.tree_max_degree[key], int(direct))
        degrees = list(result.tree_max_degree.values())
        self.assertEqual(degrees, sorted(degrees))
        # 3 < 15ε，根的子节点尚未全部落在球内
        self.assertFalse(result.informative)
        self.assertTrue(degree_uniformity(self.net, (RADIUS,)).holds)

    def test_degree_uniformity_rejects_bad_input(self):
        with self.assertRaises(ConstructionError):
            degree_uniformity(self.net, (RADIUS + 1.0,))
        with self.assertRaises(ConstructionError):
            degree_uniformity(build_net(2.0, EPSILON), (1.0,))


class TestConstruction(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.build = build_hyperbolic(RADIUS, EPSILON, DELTA)

    def test_constants(self):
        build = self.build
        self.assertAlmostEqual(build.D1, reach_radius(build.morse_D, EPSILON, DELTA))
        self.assertAlmostEqual(build.shortcut_length, 2.0 * build.D1 + 4.0 * build.morse_D)
        self.assertAlmostEqual(build.upper_slack, 2.0 * build.D1 + 12.0 * build.morse_D + 2.0 * DELTA)
        self.assertAlmostEqual(build.lower_slack, 4.0 * build.morse_D)
        self.assertFalse(build.integer)

    def test_shortcuts_cover_close_pairs(self):
        build = self.build
        n = build.net.size
        # 2D₁ 超过球直径时捷径层是完全图
        self.assertEqual(build.graph.edge_count, n * (n - 1) // 2)
        audit = build.degree_audit()
        self.assertEqual(audit['graph_max_degree'], n - 1)
        self.assertLessEqual(audit['graph_max_degree'], audit['graph_degree_bound'])
        # 2D₁ 远大于球直径时装箱上界不约束任何图
        self.assertFalse(audit['graph_bound_informative'])

    def test_root_distances_are_exact(self):
        self.assertLessEqual(root_exactness(self.build, workers=2), 1e-9)

    def test_verify_pairs(self):
        pairs = sample_net_pairs(self.build.net, 200, seed=5)
        self.assertEqual(pairs, sorted(pairs))
        self.assertEqual(pairs, sample_net_pairs(self.build.net, 200, seed=5))
        report = verify_hyperbolic(self.build, pairs, workers=2)
        self.assertEqual(len(report.rows), 200)
        self.assertTrue(report.upper_holds)
        self.assertTrue(report.lower_holds)
        for row in report.rows:
            self.assertAlmostEqual(row[8], row[7] - row[6])
        self.assertIn('deciles', report.summary())

    def test_verify_rejects_bad_pairs(self):
        with self.assertRaises(ConstructionError):
            verify_hyperbolic(self.build, [])
        with self.assertRaises(ConstructionError):
            verify_hyperbolic(self.build, [(0, self.build.net.size)])

    def test_net_rows(self):
        rows = net_rows(self.build)
        self.assertEqual(len(rows), self.build.net.size)
        self.assertEqual(rows[0], (0, 0.0, 0.0, 1.0, -1, 0.0))

    def test_projection_audit(self):
        pairs = sample_net_pairs(self.build.net, 30, seed=8)
        audit = audit_projection_readings(self.build, pairs)
        self.assertLessEqual(audit.base_reading_holds, audit.pairs)
        self.assertEqual(audit.projection_reading_holds, audit.pairs)
        self.assertEqual(audit.shortcut_reachable, audit.pairs)

    def test_integer_mode_needs_large_scale(self):
        with self.assertRaises(ValidationError):
            build_hyperbolic(RADIUS, EPSILON, DELTA, integer=True)


class TestIntegerMode(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        # 手工放置的 10-分离网
        r = np.array([0.0, 12.3, 12.7, 13.1, 14.6])
        theta = np.array([0.0, 0.0, math.pi / 2, math.pi, 3 * math.pi / 2])
        net = HNet(r, theta, epsilon=10.0, radius=15.0, density=1.0)
        tree = build_tree(net)
        morse_D = estimate_morse_D(net, tree)
        graph = add_shortcuts(net, tree, morse_D, 10.0)
        d1 = reach_radius(morse_D, 10.0, 10.0)
        build = HyperbolicBuild(net, tree, graph, morse_D, 10.0, d1, 2.0 * d1 + 4.0 * morse_D)
        cls.real = build
        cls.build = integerize(build)

    def test_lengths_are_positive_integers(self):
        _, _, lengths = self.build.graph.edge_arrays()
        np.testing.assert_array_equal(lengths, np.round(lengths))
        self.assertTrue(np.all(lengths > 0))
        np.testing.assert_array_equal(self.build.net.tree_len, [0.0, 12.0, 12.0, 13.0, 14.0])
        self.assertEqual(self.build.shortcut_length, math.floor(self.real.shortcut_length) + 1)

    def test_bounds_with_enlarged_constants(self):
        build = self.build
        self.assertTrue(build.integer)
        self.assertAlmostEqual(build.upper_slack, self.real.upper_slack + 3.0)
        self.assertAlmostEqual(build.lower_slack, self.real.lower_slack + 2.0)
        self.assertLess(root_exactness(build), 1.0)
        pairs = [(s, t) for s in range(5) for t in range(5)]
        report = verify_hyperbolic(build, pairs)
        self.assertTrue(report.upper_holds)
        self.assertTrue(report.lower_holds)

    def test_original_build_untouched(self):
        self.assertFalse(self.real.integer)
        self.assertAlmostEqual(self.real.net.tree_len[1], 12.3)

    def test_unknown_mode(self):
        with self.assertRaises(ValidationError):
            integerize(self.real, mode='round')


class TestThinness(unittest.TestCase):

    def test_triangles_are_thin(self):
        report = thinness_witness(seed=1, count=20, radius=5.0)
        self.assertEqual(report.triangles, 20)
        self.assertTrue(report.holds)
        self.assertEqual(report.max_excess, thinness_witness(seed=1, count=20, radius=5.0).max_excess)


if __name__ == '__main__':
    unittest.main()
