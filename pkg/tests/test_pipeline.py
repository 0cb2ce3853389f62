"""End-to-end pipeline runs on synthetic DALY tables."""

import numpy as np
import pytest
import yaml

from data_ingest import TimeIndexMap
from errors import ConstantColumn, MissingFile, NonPositiveIndex
from expr_parser import parse
from expr_tree import evaluate
from fit_metrics import compute_metrics
from forecaster import ACTUAL, FORECAST, trend
from pipeline import run_groups, run_pipeline
from reports import build_report
from sr_engine import SrConfig

QUICK = SrConfig(seed=5, population_size=40, generations=3, constant_tune_every=0, elite_count=3)


class TestRunGroups:
    def test_kaiser_layout_on_synthetic_table(self, small_report) -> None:
        retained = {g.group_id: g.model.retained for g in small_report.groups}
        assert retained == {"communicable": 2, "noncommunicable": 1, "injury": 2}

    def test_fixed_retention(self, small_report) -> None:
        groups = run_groups(small_report.table, "fixed=1")
        assert [s.index_id for g in groups for s in g.scores] == ["CPC1", "NPC", "IPC1"]


class TestRunPipeline:
    def test_one_forecast_per_retained_component(self, small_report) -> None:
        assert [ix.index_id for ix in small_report.indices] == ["CPC1", "CPC2", "NPC", "IPC1", "IPC2"]
        for ix in small_report.indices:
            years = [r.year for r in ix.table.rows]
            assert years == list(range(1990, 2021))
            kinds = [r.kind for r in ix.table.rows]
            assert kinds == [ACTUAL] * 27 + [FORECAST] * 4
            assert ix.verdict == trend(ix.table)
            assert ix.verdict.window == (2017, 2020)

    def test_single_forecast_year_has_no_trend(self, synthetic_inputs) -> None:
        csv_path, groups_path = synthetic_inputs
        report = run_pipeline(csv_path, groups_path, QUICK, TimeIndexMap(1989), 2017)
        for ix in report.indices:
            assert [r.year for r in ix.table.forecast_rows()] == [2017]
            assert ix.verdict is None
        record = build_report(report)
        assert record["trends"] == []
        assert record["summary"] == "no trends"
        assert len(record["indices"]) == 5

    def test_rows_re_derive_from_report_text(self, small_report) -> None:
        report = build_report(small_report)
        for record in report["indices"]:
            e = parse(record["expression"])
            for row in record["rows"]:
                assert evaluate(e, row["t"]) == pytest.approx(row["value"], abs=1e-9)

    def test_fit_metrics_use_the_index_series(self, small_report) -> None:
        for ix in small_report.indices:
            predicted = [r.value for r in ix.table.rows if r.kind == ACTUAL]
            expected = compute_metrics(ix.series.scores, predicted)
            assert ix.fit.metrics.mse == pytest.approx(expected.mse, rel=1e-9, abs=1e-12)

    def test_per_index_seeds_differ(self, small_report) -> None:
        seeds = [ix.seed for ix in small_report.indices]
        assert len(set(seeds)) == len(seeds)

    def test_same_seed_same_report(self, synthetic_inputs, small_report) -> None:
        csv_path, groups_path = synthetic_inputs
        again = run_pipeline(csv_path, groups_path, QUICK, TimeIndexMap(1989), 2020)
        assert build_report(again) == build_report(small_report)

    def test_mapping_group_config(self, synthetic_inputs, small_report) -> None:
        csv_path, groups_path = synthetic_inputs
        with open(groups_path, "r", encoding="utf-8") as f:
            mapping = yaml.safe_load(f)["causes"]
        again = run_pipeline(csv_path, mapping, QUICK, TimeIndexMap(1989), 2020)
        assert build_report(again) == build_report(small_report)

    def test_constant_column_is_reported_with_stage(self, write_csv) -> None:
        rows = [[1990 + i, 100 + i, 50, 10 + i * i, 30 - i] for i in range(6)]
        path = write_csv(["year", "hiv", "malaria", "cancers", "diabetes"], rows)
        groups = {"hiv": "communicable", "malaria": "communicable",
                  "cancers": "noncommunicable", "diabetes": "noncommunicable"}
        with pytest.raises(ConstantColumn) as info:
            run_pipeline(path, groups, QUICK)
        assert info.value.cause == "malaria"
        assert info.value.stage == "pca"
        assert str(info.value).startswith("[pca]")

    def test_missing_input_is_an_ingest_error(self, tmp_path, small_groups) -> None:
        with pytest.raises(MissingFile) as info:
            run_pipeline(tmp_path / "absent.csv", small_groups, QUICK)
        assert info.value.stage == "ingest"
        assert info.value.exit_code == 3

    def test_fitting_years_must_follow_the_offset(self, synthetic_inputs) -> None:
        csv_path, groups_path = synthetic_inputs
        with pytest.raises(NonPositiveIndex) as info:
            run_pipeline(csv_path, groups_path, QUICK, TimeIndexMap(1995), 2020)
        assert info.value.stage == "ingest"

    @pytest.mark.slow
    def test_worker_pool_gives_the_same_report(self, synthetic_inputs, small_report) -> None:
        csv_path, groups_path = synthetic_inputs
        cfg = SrConfig(seed=5, population_size=40, generations=3, constant_tune_every=0,
                       elite_count=3, workers=2)
        pooled = run_pipeline(csv_path, groups_path, cfg, TimeIndexMap(1989), 2020)
        assert build_report(pooled)["indices"] == build_report(small_report)["indices"]

    @pytest.mark.slow
    def test_default_search_reaches_selection_threshold(self, synthetic_inputs) -> None:
        csv_path, groups_path = synthetic_inputs
        report = run_pipeline(csv_path, groups_path, SrConfig(seed=42, workers=4), TimeIndexMap(1989), 2020)
        for ix in report.indices:
            assert ix.fit.metrics.r2 >= 0.99, ix.index_id
            values = np.asarray(ix.table.values())
            assert np.all(np.isfinite(values))
