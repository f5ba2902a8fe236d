import json
import logging
import os
import shutil
import tempfile
import unittest
from unittest import mock

from qnumrange import config
from qnumrange.radius import OptimizerConfig
from qnumrange.utils import setup_logger
from qnumrange.utils.exceptions import ValidationError


class TestLoadConfig(unittest.TestCase):
    """Test cases for the JSON configuration layer"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def _write(self, name, content):
        path = os.path.join(self.temp_dir, name)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(content)
        return path

    def test_defaults(self):
        cfg = config.load_config()
        self.assertEqual(cfg, config.DEFAULT_CONFIG)
        cfg['optimizer']['restarts'] = 1
        self.assertEqual(config.DEFAULT_CONFIG['optimizer']['restarts'], config.DEFAULT_RESTARTS)

    def test_merge_keeps_untouched_keys(self):
        path = self._write('cfg.json', json.dumps({'optimizer': {'restarts': 5}, 'dual': {'gap_tol': 0.01}}))
        cfg = config.load_config(path)
        self.assertEqual(cfg['optimizer']['restarts'], 5)
        self.assertEqual(cfg['optimizer']['max_iters'], config.DEFAULT_MAX_ITERS)
        self.assertEqual(cfg['dual']['gap_tol'], 0.01)
        self.assertEqual(cfg['c_radius']['restarts'], config.C_RADIUS_RESTARTS)

    def test_bad_files(self):
        with self.assertRaises(ValidationError):
            config.load_config(os.path.join(self.temp_dir, 'missing.json'))
        with self.assertRaises(ValidationError):
            config.load_config(self._write('broken.json', '{"optimizer":'))
        with self.assertRaises(ValidationError):
            config.load_config(self._write('list.json', '[1, 2]'))

    def test_example_file_matches_defaults(self):
        example = os.path.join(os.path.dirname(__file__), '..', 'config.example.json')
        self.assertEqual(config.load_config(example), config.DEFAULT_CONFIG)


class TestSeed(unittest.TestCase):
    """Test cases for the seed environment variable"""

    def test_env_seed(self):
        with mock.patch.dict(os.environ, {config.SEED_ENV_VAR: '42'}):
            self.assertEqual(config.default_seed(), 42)

    def test_missing_or_blank(self):
        with mock.patch.dict(os.environ, {config.SEED_ENV_VAR: '  '}):
            self.assertEqual(config.default_seed(), config.DEFAULT_SEED)
        with mock.patch.dict(os.environ, {}, clear=True):
            self.assertEqual(config.default_seed(), config.DEFAULT_SEED)

    def test_bad_seed(self):
        with mock.patch.dict(os.environ, {config.SEED_ENV_VAR: 'abc'}):
            with self.assertRaises(ValidationError):
                config.default_seed()


class TestOptimizerConfigFrom(unittest.TestCase):
    """Test cases for building OptimizerConfig from a loaded config"""

    def test_sections_and_overrides(self):
        cfg = config.load_config()
        optimizer = config.optimizer_config_from(cfg, seed=7)
        self.assertIsInstance(optimizer, OptimizerConfig)
        self.assertEqual(optimizer.restarts, config.DEFAULT_RESTARTS)
        self.assertEqual(optimizer.seed, 7)
        c_cfg = config.optimizer_config_from(cfg, 'c_radius', seed=7, restarts=None, threads=3)
        self.assertEqual(c_cfg.restarts, config.C_RADIUS_RESTARTS)
        self.assertEqual(c_cfg.threads, 3)

    def test_seed_falls_back_to_environment(self):
        with mock.patch.dict(os.environ, {config.SEED_ENV_VAR: '11'}):
            self.assertEqual(config.optimizer_config_from(config.load_config()).seed, 11)

    def test_invalid_values(self):
        with self.assertRaises(ValidationError):
            config.optimizer_config_from(config.load_config(), restarts=0)


class TestLogger(unittest.TestCase):
    """Test cases for setup_logger"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        logger = logging.getLogger('qnumrange.test')
        for handler in list(logger.handlers):
            logger.removeHandler(handler)
            handler.close()
        shutil.rmtree(self.temp_dir)

    def test_handlers_do_not_stack(self):
        log_file = os.path.join(self.temp_dir, 'logs', 'qnr.log')
        setup_logger('qnumrange.test', log_file, 'WARNING')
        logger = setup_logger('qnumrange.test', log_file, 'WARNING')
        self.assertEqual(len(logger.handlers), 2)
        self.assertEqual(logger.handlers[0].level, logging.WARNING)
        logger.debug('to file only')
        for handler in logger.handlers:
            handler.flush()
        with open(log_file, encoding='utf-8') as f:
            self.assertIn('to file only', f.read())

    def test_console_only(self):
        logger = setup_logger('qnumrange.test', level='debug')
        self.assertEqual(len(logger.handlers), 1)
        self.assertEqual(logger.handlers[0].level, logging.DEBUG)


if __name__ == '__main__':
    unittest.main()
