"""Settings, seed derivation, year ranges and run metrics."""

import time
from pathlib import Path

import pytest
import yaml

from errors import ConfigError, MissingFile
from monitoring import Metrics
from utils import DEFAULT_SETTINGS, derive_seed, load_settings, parse_year_range, pick


class TestLoadSettings:
    def test_defaults_when_default_file_absent(self, tmp_path, monkeypatch) -> None:
        monkeypatch.chdir(tmp_path)
        settings = load_settings()
        assert settings == DEFAULT_SETTINGS
        assert settings is not DEFAULT_SETTINGS

    def test_file_overrides_one_key(self, tmp_path) -> None:
        path = tmp_path / "cfg.yaml"
        path.write_text(yaml.safe_dump({"forecast": {"horizon": 2025}}), encoding="utf-8")
        settings = load_settings(str(path))
        assert settings["forecast"]["horizon"] == 2025
        assert settings["forecast"]["start_year"] == 2017
        assert settings["ingest"]["offset_year"] == 1989

    def test_unknown_section(self, tmp_path) -> None:
        path = tmp_path / "cfg.yaml"
        path.write_text(yaml.safe_dump({"camera": {"index": 0}}), encoding="utf-8")
        with pytest.raises(ConfigError):
            load_settings(str(path))

    def test_explicit_missing_file(self, tmp_path) -> None:
        with pytest.raises(MissingFile):
            load_settings(str(tmp_path / "absent.yaml"))

    def test_repo_config_loads(self) -> None:
        settings = load_settings(str(Path(__file__).resolve().parent.parent / "config.yaml"))
        assert settings["pca"]["retention"] == "kaiser"
        assert settings["forecast"]["horizon"] == 2020


class TestHelpers:
    def test_derive_seed_is_stable_and_label_specific(self) -> None:
        assert derive_seed(42, "CPC1") == derive_seed(42, "CPC1")
        assert derive_seed(42, "CPC1") != derive_seed(42, "CPC2")
        assert derive_seed(42, "CPC1") != derive_seed(43, "CPC1")
        assert 0 <= derive_seed(0, "NPC") < 2 ** 64

    def test_year_range(self) -> None:
        assert parse_year_range("2017-2020") == (2017, 2020)
        assert parse_year_range("2018") == (2018, 2018)
        with pytest.raises(ConfigError):
            parse_year_range("2020-2017")
        with pytest.raises(ConfigError):
            parse_year_range("soon")

    def test_pick(self) -> None:
        assert pick(None, {"horizon": 2020}, "horizon") == 2020
        assert pick(2030, {"horizon": 2020}, "horizon") == 2030


class TestMetrics:
    def test_counters_and_timers(self) -> None:
        m = Metrics()
        m.inc("sr.evaluations", 10)
        m.inc("sr.evaluations")
        with m.timer("pipeline.pca"):
            time.sleep(0.001)
        exported = m.export()
        assert exported["counters"]["sr.evaluations"] == 11
        assert exported["timers"]["pipeline.pca"]["count"] == 1
        assert exported["timers"]["pipeline.pca"]["total"] > 0
        m.reset()
        assert m.export() == {"counters": {}, "timers": {}}

    def test_timer_records_on_error(self) -> None:
        m = Metrics()
        with pytest.raises(RuntimeError):
            with m.timer("boom"):
                raise RuntimeError("x")
        assert m.export()["timers"]["boom"]["count"] == 1
