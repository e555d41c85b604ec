"""Tests for configuration loading and validation."""

from __future__ import annotations

import os
from pathlib import Path
import stat
import tempfile
import tomllib
import unittest
from unittest.mock import patch

from weil_lift.config import DEFAULT_CONFIG, PREC_ENV_VAR, load_config, write_default_config
from weil_lift.exceptions import ConfigValidationError


class ConfigTests(unittest.TestCase):
    """Validate config merge and fallback behavior."""

    def setUp(self) -> None:
        self._env = patch.dict(os.environ, {}, clear=False)
        self._env.start()
        os.environ.pop(PREC_ENV_VAR, None)

    def tearDown(self) -> None:
        self._env.stop()

    def test_missing_config_uses_defaults(self) -> None:
        with tempfile.TemporaryDirectory() as temp_dir:
            config = load_config(config_path=Path(temp_dir) / "config.toml")
            self.assertEqual(config, DEFAULT_CONFIG)
            self.assertEqual(config["precision"]["bits"], 256)
            self.assertEqual(config["series"]["truncation"], 200)
            self.assertEqual(config["workers"]["threads"], 1)
            self.assertEqual(config["output"]["path"], "")

    def test_partial_config_overrides_selected_values(self) -> None:
        with tempfile.TemporaryDirectory() as temp_dir:
            config_path = Path(temp_dir) / "config.toml"
            config_path.write_text(
                """
[precision]
bits = 512

[workers]
threads = 4

[logging]
level = "debug"
                """.strip(),
                encoding="utf-8",
            )
            config = load_config(config_path=config_path)
            self.assertEqual(config["precision"]["bits"], 512)
            self.assertEqual(config["precision"]["cm_headroom_bits"], DEFAULT_CONFIG["precision"]["cm_headroom_bits"])
            self.assertEqual(config["workers"]["threads"], 4)
            self.assertEqual(config["logging"]["level"], "DEBUG")
            self.assertEqual(config["quadrature"], DEFAULT_CONFIG["quadrature"])

    def test_invalid_values_fallback_to_defaults(self) -> None:
        with tempfile.TemporaryDirectory() as temp_dir:
            config_path = Path(temp_dir) / "config.toml"
            config_path.write_text(
                """
[precision]
bits = 32

[series]
truncation = 3

[logging]
level = "chatty"
                """.strip(),
                encoding="utf-8",
            )
            with self.assertLogs("weil_lift.config", level="WARNING"):
                config = load_config(config_path=config_path)
            self.assertEqual(config["precision"]["bits"], DEFAULT_CONFIG["precision"]["bits"])
            self.assertEqual(config["series"]["truncation"], DEFAULT_CONFIG["series"]["truncation"])
            self.assertEqual(config["logging"]["level"], DEFAULT_CONFIG["logging"]["level"])

    def test_unparseable_file_uses_defaults(self) -> None:
        with tempfile.TemporaryDirectory() as temp_dir:
            config_path = Path(temp_dir) / "config.toml"
            config_path.write_text("[precision\nbits = ", encoding="utf-8")
            with self.assertLogs("weil_lift.config", level="WARNING"):
                config = load_config(config_path=config_path)
            self.assertEqual(config, DEFAULT_CONFIG)

    def test_environment_overrides_file_precision(self) -> None:
        with tempfile.TemporaryDirectory() as temp_dir:
            config_path = Path(temp_dir) / "config.toml"
            config_path.write_text("[precision]\nbits = 512\n", encoding="utf-8")
            os.environ[PREC_ENV_VAR] = "384"
            self.assertEqual(load_config(config_path=config_path)["precision"]["bits"], 384)

    def test_bad_environment_value_is_ignored(self) -> None:
        with tempfile.TemporaryDirectory() as temp_dir:
            for raw in ("many", "16"):
                os.environ[PREC_ENV_VAR] = raw
                with self.assertLogs("weil_lift.config", level="WARNING") as logs:
                    config = load_config(config_path=Path(temp_dir) / "config.toml")
                self.assertEqual(config["precision"]["bits"], 256)
                self.assertTrue(any("config.env_ignored" in line for line in logs.output))

    def test_default_config_round_trips_through_toml(self) -> None:
        with tempfile.TemporaryDirectory() as temp_dir:
            config_path = Path(temp_dir) / "nested" / "config.toml"
            written = write_default_config(config_path)
            self.assertEqual(written, config_path)
            self.assertEqual(tomllib.loads(config_path.read_text(encoding="utf-8")), DEFAULT_CONFIG)
            self.assertEqual(load_config(config_path=config_path), DEFAULT_CONFIG)
            if os.name == "posix":
                self.assertEqual(stat.S_IMODE(config_path.stat().st_mode), 0o600)

    def test_existing_config_is_not_overwritten(self) -> None:
        with tempfile.TemporaryDirectory() as temp_dir:
            config_path = Path(temp_dir) / "config.toml"
            config_path.write_text("[workers]\nthreads = 3\n", encoding="utf-8")
            with self.assertRaises(ConfigValidationError):
                write_default_config(config_path)
            write_default_config(config_path, overwrite=True)
            self.assertEqual(load_config(config_path=config_path)["workers"]["threads"], 1)


if __name__ == "__main__":
    unittest.main()
