import importlib
import io
import json
import os
import shutil
import tempfile
import unittest
from unittest import mock

import numpy as np

from qnumrange.cli import build_parser, run
from qnumrange.linalg.sampling import complex_gaussian
from qnumrange.orbit import build_cq
from qnumrange.storage import FileStorage
from qnumrange.utils.exceptions import ValidationError


class TestCommandLine(unittest.TestCase):
    """Test cases for the qnr command line"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.storage = FileStorage(self.temp_dir)
        self.identity = self.storage.save_matrix('identity.json', np.eye(3))
        self.cq = self.storage.save_matrix('cq.json', build_cq(0.6, 2))
        self.dense = self.storage.save_matrix('dense.json', complex_gaussian(np.random.default_rng(8), (3, 3)))

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def _run(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        code = run(list(argv), stdout=out, stderr=err)
        return code, out.getvalue(), err.getvalue()

    def _json(self, *argv):
        code, out, err = self._run(*argv)
        self.assertEqual(code, 0, err)
        return json.loads(out)

    def test_radius_of_identity(self):
        payload = self._json('radius', '--input', self.identity, '--q', '0.6', '--restarts', '4')
        self.assertEqual(payload['command'], 'radius')
        self.assertEqual(payload['status'], 'ok')
        self.assertEqual(payload['output']['kind'], 'q_radius_reduced')
        self.assertAlmostEqual(payload['output']['estimate']['value'], 0.6, delta=1e-8)
        self.assertEqual(payload['inputs']['q'], 0.6)

    def test_radius_converges_on_small_matrices(self):
        diagonal = self.storage.save_matrix('diag.json', np.diag([2.0, -1.0]))
        e12 = self.storage.save_matrix('e12.json', np.array([[0, 1], [0, 0]], dtype=complex))
        for path, expected in ((diagonal, 2.0), (e12, 0.5)):
            code, out, err = self._run('radius', '--input', path)
            self.assertEqual(code, 0, err)
            payload = json.loads(out)
            self.assertEqual(payload['status'], 'ok')
            self.assertAlmostEqual(payload['output']['estimate']['value'], expected, delta=1e-8)
        code, out, err = self._run('radius', '--input', e12, '--q', '0.6')
        self.assertEqual(code, 0, err)
        self.assertAlmostEqual(json.loads(out)['output']['estimate']['value'], 0.9, delta=1e-6)

    def test_radius_csv(self):
        code, out, _ = self._run('radius', '--input', self.identity, '--restarts', '2', '--format', 'csv')
        self.assertEqual(code, 0)
        header, row = out.splitlines()
        self.assertIn('value', header.split(','))
        self.assertIn('numerical_radius', row)

    def test_c_radius(self):
        payload = self._json('radius', '--input', self.identity, '--c', self.dense, '--restarts', '2')
        self.assertEqual(payload['output']['kind'], 'c_radius')
        self.assertTrue(payload['output']['norm_certificate']['is_norm'])

    def test_output_is_reproducible(self):
        argv = ('radius', '--input', self.dense, '--q', '0.5', '--restarts', '4', '--seed', '3')
        self.assertEqual(self._run(*argv)[1], self._run(*argv)[1])

    def test_range_csv(self):
        code, out, _ = self._run('range', '--input', self.dense, '--q', '0.5', '--count', '10')
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], 're,im')
        self.assertEqual(len(lines), 11)

    def test_orbit_check_and_make(self):
        payload = self._json('orbit', 'check', '--input', self.cq, '--q', '0.6')
        self.assertTrue(payload['output']['in_orbit'])
        payload = self._json('orbit', 'check', '--input', self.identity, '--q', '0.6')
        self.assertFalse(payload['output']['in_orbit'])
        payload = self._json('orbit', 'make', '--q', '0.4', '--n', '3', '--seed', '5')
        self.assertTrue(payload['output']['membership']['in_orbit'])
        self.assertEqual(payload['inputs']['theta'], [1.0, 0.0])

    def test_orbit_canon(self):
        payload = self._json('orbit', 'canon', '--input', self.cq, '--q', '0.6')
        self.assertLessEqual(payload['output']['residual'], 1e-10)

    def test_isometry_make_then_recover(self):
        spec = os.path.join(self.temp_dir, 'phi.json')
        made = self._json('isometry', 'make', '--n', '3', '--mode', 'adjoint', '--seed', '2', '--output', spec)
        self.assertEqual(made['output']['descriptor']['mode'], 'adjoint')
        payload = self._json('isometry', 'recover', '--map-spec', spec, '--q', '0.5')
        self.assertLessEqual(payload['output']['validation_residual'], 1e-8)
        self.assertEqual(payload['output']['descriptor']['mode'], 'adjoint')

    def test_isometry_verify_scaled_map_is_a_result(self):
        spec = os.path.join(self.temp_dir, 'phi.json')
        self._run('isometry', 'make', '--n', '2', '--seed', '2', '--output', spec)
        payload = self._json('isometry', 'verify', '--map-spec', spec, '--q', '0.5', '--trials', '2',
                             '--restarts', '4', '--scale', '2')
        self.assertFalse(payload['output']['passed'])

    def test_bad_input_exits_one(self):
        code, out, err = self._run('radius', '--input', self.identity, '--q', '1.5')
        self.assertEqual(code, 1)
        self.assertEqual(out, '')
        self.assertIn('q must', err)
        code, _, err = self._run('radius', '--input', os.path.join(self.temp_dir, 'missing.json'))
        self.assertEqual(code, 1)
        self.assertIn('error:', err)
        code, _, _ = self._run('frobnicate')
        self.assertEqual(code, 1)

    def test_precondition_exits_one(self):
        code, _, err = self._run('orbit', 'canon', '--input', self.identity, '--q', '0.5')
        self.assertEqual(code, 1)
        self.assertIn('error:', err)

    def test_not_converged_exits_two(self):
        config_path = os.path.join(self.temp_dir, 'cfg.json')
        with open(config_path, 'w', encoding='utf-8') as f:
            json.dump({'optimizer': {'max_iters': 1}}, f)
        code, out, _ = self._run('radius', '--input', self.dense, '--q', '0.5', '--restarts', '2',
                                 '--config', config_path)
        self.assertEqual(code, 2)
        self.assertEqual(json.loads(out)['status'], 'not_converged')

    def test_timing_is_opt_in(self):
        argv = ['radius', '--input', self.identity, '--restarts', '2']
        self.assertNotIn('elapsed_seconds', self._json(*argv)['diagnostics'])
        self.assertIn('elapsed_seconds', self._json(*argv, '--timing')['diagnostics'])

    def test_seed_from_environment(self):
        with mock.patch.dict(os.environ, {'QNR_SEED': '13'}):
            payload = self._json('radius', '--input', self.identity, '--restarts', '2')
        self.assertEqual(payload['inputs']['seed'], 13)

    def test_bounds_skips_sandwich_above_cap(self):
        big = self.storage.save_matrix('big.json', complex_gaussian(np.random.default_rng(9), (5, 5)))
        payload = self._json('bounds', '--input', big, '--q', '0.5', '--restarts', '4')
        self.assertIsNone(payload['output']['dual_trace_sandwich'])
        self.assertTrue(payload['output']['equivalence']['all_hold'])

    def test_selftest_table(self):
        report = {'seed': 4, 'full': False, 'passed': True,
                  'checks': [{'group': 'acceptance', 'criterion': 1, 'name': 'identity_radius',
                              'passed': True, 'trials': 3, 'worst': 0.0, 'detail': ''}]}
        with mock.patch.object(importlib.import_module('qnumrange.cli.main'), 'SelfTestSuite') as suite:
            suite.return_value.run.return_value = report
            code, out, _ = self._run('selftest', '--seed', '4', '--format', 'table')
        self.assertEqual(code, 0)
        suite.assert_called_once_with(seed=4, full=False, threads=1)
        self.assertIn('identity_radius', out)
        self.assertTrue(out.rstrip().endswith('passed: True'))


class TestParser(unittest.TestCase):
    """Test cases for argument parsing"""

    def test_parse_errors_are_validation_errors(self):
        parser = build_parser()
        with self.assertRaises(ValidationError):
            parser.parse_args(['orbit', 'check', '--q', '0.5'])
        with self.assertRaises(ValidationError):
            parser.parse_args(['orbit', 'make', '--q', '0.5', '--theta', '1,2,3'])

    def test_theta_parses_complex(self):
        args = build_parser().parse_args(['orbit', 'make', '--q', '0.5', '--theta', '0,1'])
        self.assertEqual(args.theta, 1j)


if __name__ == '__main__':
    unittest.main()
