import os
import sys
import unittest
from pathlib import Path
from unittest.mock import patch

ENGINE_SRC = Path(__file__).resolve().parents[1] / "src"
sys.path.insert(0, str(ENGINE_SRC))

from crpq_engine import config as engine_config


class ConfigTests(unittest.TestCase):
    def setUp(self):
        self._original_env = os.environ.copy()
        for name in list(os.environ):
            if name.startswith("CRPQ_"):
                del os.environ[name]

        # Patch load_dotenv to prevent tests from reading real .env files
        self.mock_load_dotenv = patch('crpq_engine.config.load_dotenv').start()

    def tearDown(self):
        os.environ.clear()
        os.environ.update(self._original_env)
        engine_config._config = None
        patch.stopall()

    def test_defaults(self):
        cfg = engine_config.Config()
        cfg.validate()

        self.assertFalse(cfg.debug_assert)
        self.assertFalse(cfg.dump_tables)
        self.assertFalse(cfg.parallel)
        self.assertEqual(cfg.oracle_row_limit, 10_000_000)
        self.assertEqual(cfg.edge_cover_max_edges, 20)
        self.assertEqual(cfg.log_level, "WARNING")

    def test_flags_read_from_environment(self):
        os.environ["CRPQ_DEBUG_ASSERT"] = "1"
        os.environ["CRPQ_DUMP_TABLES"] = "true"
        os.environ["CRPQ_PARALLEL"] = "yes"

        cfg = engine_config.Config()

        self.assertTrue(cfg.debug_assert)
        self.assertTrue(cfg.dump_tables)
        self.assertTrue(cfg.parallel)

    def test_flag_off_values(self):
        os.environ["CRPQ_DEBUG_ASSERT"] = "0"
        os.environ["CRPQ_PARALLEL"] = "off"

        cfg = engine_config.Config()

        self.assertFalse(cfg.debug_assert)
        self.assertFalse(cfg.parallel)

    def test_numeric_limits(self):
        os.environ["CRPQ_ORACLE_ROW_LIMIT"] = "5000"
        os.environ["CRPQ_EDGE_COVER_MAX_EDGES"] = "12"

        cfg = engine_config.Config()
        cfg.validate()

        self.assertEqual(cfg.oracle_row_limit, 5000)
        self.assertEqual(cfg.edge_cover_max_edges, 12)

    def test_invalid_number_falls_back_to_default(self):
        os.environ["CRPQ_ORACLE_ROW_LIMIT"] = "lots"

        with self.assertLogs('crpq_engine.config', level='WARNING'):
            cfg = engine_config.Config()

        self.assertEqual(cfg.oracle_row_limit, engine_config.DEFAULT_ORACLE_ROW_LIMIT)

    def test_validate_rejects_non_positive_limit(self):
        os.environ["CRPQ_ORACLE_ROW_LIMIT"] = "0"

        with self.assertRaises(engine_config.ConfigurationError):
            engine_config.Config().validate()

    def test_validate_rejects_unknown_log_level(self):
        os.environ["CRPQ_LOG_LEVEL"] = "chatty"

        with self.assertRaises(engine_config.ConfigurationError):
            engine_config.Config().validate()

    def test_log_level_normalized(self):
        os.environ["CRPQ_LOG_LEVEL"] = " debug "

        cfg = engine_config.Config()
        cfg.validate()

        self.assertEqual(cfg.log_level, "DEBUG")

    def test_get_config_singleton(self):
        first = engine_config.get_config()
        second = engine_config.get_config()

        self.assertIs(first, second)


if __name__ == '__main__':
    unittest.main()
