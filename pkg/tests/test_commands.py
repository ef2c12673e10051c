import json
import os
import tempfile
import unittest

from src.commands.command_base import (EXIT_CHECK_FAILED, EXIT_CONFIG_ERROR, EXIT_IO_ERROR, EXIT_OK,
                                       CheckFailure, CommandBase, CommandRegistry, ConfigError, ReportIOError)
from src.commands.run_config import AUTO, RunConfig, build_run_config, load_config_file
from src.config import CommandType
from src.graph.planar import PlanarError
from src.validators import ValidationError


class TestRunConfig(unittest.TestCase):

    def test_defaults(self):
        config = build_run_config('build-planar', {'M': 3})
        self.assertEqual(config.command, CommandType.BUILD_PLANAR)
        self.assertEqual(config.M, 3.0)
        self.assertFalse(config.auto_glue)
        self.assertFalse(config.needs_seed)
        self.assertEqual(config.half_width(), 64)
        self.assertEqual(config.half_width(10), 10)

    def test_string_values_are_parsed(self):
        config = build_run_config('verify-planar', {'N': '12', 'M': 'AUTO', 'seed': '7', 'integer': 'false'})
        self.assertEqual(config.N, 12)
        self.assertEqual(config.M, AUTO)
        self.assertEqual(config.seed, 7)
        self.assertFalse(config.integer)

    def test_sampling_commands_need_seed(self):
        for command in ('verify-planar', 'calibrate-planar', 'verify-hyperbolic', 'verify-profile'):
            with self.assertRaises(ConfigError):
                build_run_config(command, {})
        # M=auto 时 build-planar 也要估计 Ĉ
        with self.assertRaises(ConfigError):
            build_run_config('build-planar', {})
        build_run_config('build-hyperbolic', {})
        build_run_config('verify-sequence', {})

    def test_rejections(self):
        cases = [
            ('build-planar', {'M': 3, 'colour': 'blue'}),
            ('frobnicate', {}),
            ('build-planar', {'M': 3, 'N': 1.5}),
            ('build-planar', {'M': 3, 'N': 1}),
            ('build-planar', {'M': -1}),
            ('build-planar', {'M': 3, 'seed': -1}),
            ('build-planar', {'M': 3, 'seed': 2 ** 64}),
            ('build-hyperbolic', {'integer': True}),
            ('build-hyperbolic', {'epsilon': 0}),
            ('build-hyperbolic', {'R': 'nan'}),
            ('build-planar', {'M': 3, 'alpha': 'custom'}),
            ('build-planar', {'M': 3, 'alpha': 'banana'}),
            ('build-planar', {'M': 3, 'alpha': 0.5}),
            ('build-planar', {'M': 3, 'workers': 0}),
            ('build-planar', {'M': 3, 'integer': 'maybe'}),
        ]
        for command, values in cases:
            with self.subTest(command=command, values=values):
                with self.assertRaises(ConfigError):
                    build_run_config(command, values)

    def test_integer_mode_at_scale(self):
        config = build_run_config('build-hyperbolic', {'integer': True, 'epsilon': 10, 'delta': 10, 'R': 12})
        self.assertTrue(config.integer)

    def test_alpha_labels(self):
        golden = build_run_config('verify-sequence', {'alpha': 'golden_conjugate'})
        self.assertAlmostEqual(golden.rotation().value, (5 ** 0.5 - 1) / 2)
        custom = build_run_config('verify-sequence', {'alpha': '0.7071067811865476'})
        self.assertAlmostEqual(custom.rotation().value, 0.7071067811865476)

    def test_as_dict_excludes_output(self):
        config = build_run_config('build-planar', {'M': 3, 'out': '/tmp/a', 'workers': 2})
        data = config.as_dict()
        self.assertNotIn('out', data)
        self.assertNotIn('workers', data)
        self.assertEqual(data['command'], 'build-planar')
        other = build_run_config('build-planar', {'M': 3, 'out': '/tmp/b'})
        self.assertEqual(data, other.as_dict())

    def test_load_config_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            good = os.path.join(tmp, 'good.json')
            with open(good, 'w', encoding='utf-8') as handle:
                json.dump({'N': 16, 'seed': 3}, handle)
            self.assertEqual(load_config_file(good), {'N': 16, 'seed': 3})
            bad = os.path.join(tmp, 'bad.json')
            with open(bad, 'w', encoding='utf-8') as handle:
                handle.write('{N: 16')
            with self.assertRaises(ConfigError):
                load_config_file(bad)
            array = os.path.join(tmp, 'array.json')
            with open(array, 'w', encoding='utf-8') as handle:
                handle.write('[1, 2]')
            with self.assertRaises(ConfigError):
                load_config_file(array)
            with self.assertRaises(ReportIOError):
                load_config_file(os.path.join(tmp, 'missing.json'))


class TestCommandBase(unittest.TestCase):

    def test_error_mapping(self):
        def raising(error):
            @CommandBase.handle_command_error
            def handler(config):
                raise error
            return handler(None)

        self.assertEqual(raising(ValidationError("x")), EXIT_CONFIG_ERROR)
        self.assertEqual(raising(ConfigError("x")), EXIT_CONFIG_ERROR)
        self.assertEqual(raising(CheckFailure("x")), EXIT_CHECK_FAILED)
        self.assertEqual(raising(PlanarError("x")), EXIT_CHECK_FAILED)
        self.assertEqual(raising(ReportIOError("x")), EXIT_IO_ERROR)
        self.assertEqual(raising(PermissionError("x")), EXIT_IO_ERROR)

    def test_checks_are_collected(self):
        command = CommandBase(RunConfig(CommandType.BUILD_PLANAR, out='reports'))
        self.assertTrue(command.check(True, "ok"))
        self.assertFalse(command.check(False, "first"))
        self.assertFalse(command.check(False, "second"))
        with self.assertRaises(CheckFailure) as ctx:
            command.finish()
        self.assertIn("first; second", str(ctx.exception))
        self.assertEqual(CommandBase(RunConfig(CommandType.BUILD_PLANAR)).finish(), EXIT_OK)
        self.assertEqual(command.path('a.json'), os.path.join('reports', 'a.json'))

    def test_format_results(self):
        formatted = CommandBase.format_results({'a': 1, 'b': 2}, "测试")
        self.assertEqual(formatted['metadata_info'], {'operation_type': "测试", 'result_count': 2})
        self.assertEqual(CommandBase.format_results(3.5, "测试")['metadata_info']['result_count'], 1)
        self.assertEqual(CommandBase.format_results([], "测试", 7)['metadata_info']['result_count'], 7)

    def test_registry(self):
        registry = CommandRegistry()
        handler = lambda config: EXIT_OK
        registry.register(CommandType.EXPORT, handler)
        self.assertIn(CommandType.EXPORT, registry)
        self.assertIs(registry.get(CommandType.EXPORT), handler)
        self.assertEqual(registry.names(), ['export'])
        with self.assertRaises(ConfigError):
            registry.register(CommandType.EXPORT, handler)
        with self.assertRaises(ConfigError):
            registry.get(CommandType.VERIFY_PLANAR)


if __name__ == '__main__':
    unittest.main()
