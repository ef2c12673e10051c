"""
完整规模的验收运行，耗时数分钟；设置 RUN_ACCEPTANCE=1 后启用
"""

import filecmp
import json
import os
import tempfile
import unittest

import numpy as np

from src.analysis.betaseq import BetaSequence, calibrate_profile_constant, window_maxima, window_profile_constant
from src.analysis.lowdisc import QuadraticIrrational, fourier_tail_sum, quadrature_error_profile
from src.cli import main
from src.commands.command_base import EXIT_OK
from src.graph.hyperbolic import build_hyperbolic, build_net, build_tree, degree_uniformity, thinness_witness
from src.graph.planar import LatticeSpec, build_L, oracle_equivalence

RUN_ACCEPTANCE = os.getenv('RUN_ACCEPTANCE') == '1'
SEARCH_RANGE = (-10_000, 10_000)


@unittest.skipUnless(RUN_ACCEPTANCE, "设置 RUN_ACCEPTANCE=1 运行验收测试")
class TestSequenceAcceptance(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.alpha = QuadraticIrrational.from_label('sqrt2_minus_1')
        cls.seq = BetaSequence(cls.alpha)

    def test_profile_constant_holds_for_long_windows(self):
        constant = calibrate_profile_constant(self.seq, 100, SEARCH_RANGE)
        for size in (1_000, 10_000):
            with self.subTest(size=size):
                self.assertLessEqual(window_profile_constant(self.seq, size, SEARCH_RANGE), 1.05 * constant)

    def test_window_error_does_not_grow(self):
        maxima = window_maxima(self.seq, [100, 1_000, 10_000], SEARCH_RANGE)
        self.assertLessEqual(maxima[10_000], 2.0 * maxima[100])

    def test_quadrature_error_does_not_grow(self):
        scales = [10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6]
        profile = quadrature_error_profile(lambda x: x * x, self.alpha, scales, integral=1.0 / 3.0)
        self.assertLessEqual(profile[10 ** 6], 2.0 * profile[10 ** 3])

    def test_fourier_tail_increments_halve(self):
        tails = [fourier_tail_sum(self.alpha, K) for K in (100, 1_000, 10_000, 100_000)]
        increments = np.diff(tails)
        self.assertTrue(np.all(increments[1:] <= increments[:-1] / 2.0))


@unittest.skipUnless(RUN_ACCEPTANCE, "设置 RUN_ACCEPTANCE=1 运行验收测试")
class TestPlanarAcceptance(unittest.TestCase):

    def test_closed_form_matches_dijkstra(self):
        pg = build_L(LatticeSpec(129, BetaSequence.default()))
        result = oracle_equivalence(pg, half_width=16)
        self.assertGreater(result.pairs, 100_000)
        self.assertLessEqual(result.max_difference, 1e-9)

    def test_full_graph_at_desk_scale(self):
        with tempfile.TemporaryDirectory() as tmp:
            status = main(['verify-planar', '--n', '256', '--samples', '10000', '--seed', '1', '--out', tmp])
            self.assertEqual(status, EXIT_OK)
            with open(os.path.join(tmp, 'planar_summary.json'), encoding='utf-8') as handle:
                results = json.load(handle)['results']
        self.assertEqual(results['pairs'], 10_000)
        self.assertTrue(results['lower_bound_holds'])
        self.assertTrue(results['no_growth_holds'])


@unittest.skipUnless(RUN_ACCEPTANCE, "设置 RUN_ACCEPTANCE=1 运行验收测试")
class TestHyperbolicAcceptance(unittest.TestCase):

    def test_verify_at_two_radii(self):
        for radius in ('5', '6'):
            with self.subTest(radius=radius), tempfile.TemporaryDirectory() as tmp:
                status = main(['verify-hyperbolic', '--radius', radius, '--seed', '3', '--samples', '2000',
                               '--out', tmp])
                self.assertEqual(status, EXIT_OK)

    def test_degree_stays_within_packing_bound(self):
        for radius in (5.0, 6.0):
            audit = build_hyperbolic(radius, 1.0, 1.0).degree_audit()
            self.assertLessEqual(audit['graph_max_degree'], audit['graph_degree_bound'])
            self.assertLessEqual(audit['tree_max_degree'], audit['tree_degree_bound'])
            # ε=δ=1 时两个上界都超过网点数
            self.assertFalse(audit['tree_bound_informative'])
            self.assertFalse(audit['graph_bound_informative'])

    def test_tree_degree_identical_across_radii(self):
        net = build_net(5.0, 0.25)
        build_tree(net)
        result = degree_uniformity(net, (3.75, 4.0, 5.0))
        self.assertTrue(result.informative)
        self.assertTrue(result.holds, result.tree_max_degree)
        direct = build_tree(build_net(4.0, 0.25)).degrees().max()
        self.assertEqual(result.tree_max_degree['4'], int(direct))

    def test_triangles_are_thin(self):
        report = thinness_witness(seed=1, count=1_000, radius=6.0)
        self.assertEqual(report.triangles, 1_000)
        self.assertTrue(report.holds, report.max_excess)

    def test_integer_mode(self):
        with tempfile.TemporaryDirectory() as tmp:
            args = ['--radius', '12', '--epsilon', '10', '--delta', '10', '--integer', '--out', tmp]
            self.assertEqual(main(['build-hyperbolic'] + args), EXIT_OK)
            self.assertEqual(main(['verify-hyperbolic', '--seed', '5', '--samples', '1000'] + args), EXIT_OK)


@unittest.skipUnless(RUN_ACCEPTANCE, "设置 RUN_ACCEPTANCE=1 运行验收测试")
class TestReportAcceptance(unittest.TestCase):

    def test_profile_duality(self):
        with tempfile.TemporaryDirectory() as tmp:
            self.assertEqual(main(['verify-profile', '--seed', '1', '--out', tmp]), EXIT_OK)

    def test_repeated_runs_are_byte_identical(self):
        commands = [
            ['verify-planar', '--n', '32', '--samples', '500', '--seed', '9'],
            ['calibrate-planar', '--n', '32', '--samples', '500', '--seed', '9'],
            ['verify-hyperbolic', '--radius', '4', '--samples', '300', '--seed', '9'],
        ]
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            for args in commands:
                main(args + ['--out', first])
                main(args + ['--out', second, '--workers', '1'])
            names = sorted(os.listdir(first))
            self.assertEqual(names, sorted(os.listdir(second)))
            _, mismatch, errors = filecmp.cmpfiles(first, second, names, shallow=False)
            self.assertEqual((mismatch, errors), ([], []))


if __name__ == '__main__':
    unittest.main()
