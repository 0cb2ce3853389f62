"""
End-to-end run: DALY CSV -> per-group PCA indices -> symbolic regression
per index -> forecast to the horizon year -> trend verdicts.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator, List, Mapping, Optional, Tuple, Union

from data_ingest import (
    DalyTable,
    StandardizedMatrix,
    TimeIndexMap,
    load_daly_csv,
    load_group_config,
    standardize,
)
from errors import BurdenError
from forecaster import ForecastTable, TrendVerdict, forecast, trend
from monitoring import metrics
from pca_core import (
    KAISER,
    PcaModel,
    RetentionRule,
    ScoreSeries,
    component_scores,
    fit_pca,
    index_labels,
    parse_retention,
)
from sr_engine import (
    FitReport,
    ParetoFront,
    SelectionCriterion,
    SrConfig,
    TrainingSet,
    run_search,
    select_model,
)
from utils import derive_seed

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 2020


@dataclass(frozen=True)
class GroupResult:
    group_id: str
    z: StandardizedMatrix
    model: PcaModel
    scores: Tuple[ScoreSeries, ...]


@dataclass(frozen=True)
class IndexResult:
    index_id: str
    group_id: str
    series: ScoreSeries
    seed: int
    front: ParetoFront
    fit: FitReport
    table: ForecastTable
    verdict: Optional[TrendVerdict]


@dataclass(frozen=True)
class PipelineReport:
    table: DalyTable
    groups: Tuple[GroupResult, ...]
    indices: Tuple[IndexResult, ...]
    search: SrConfig
    time_map: TimeIndexMap
    horizon: int
    retention: RetentionRule

    def verdicts(self) -> List[TrendVerdict]:
        """Trend verdicts of the indices that have one."""
        return [ix.verdict for ix in self.indices if ix.verdict is not None]


@contextmanager
def _stage(name: str) -> Iterator[None]:
    with metrics.timer(f"pipeline.{name}"):
        try:
            yield
        except BurdenError as e:
            e.with_stage(name)
            raise


def _search_index(args: Tuple[str, TrainingSet, SrConfig, SelectionCriterion]) -> Tuple[str, ParetoFront, FitReport]:
    label, data, cfg, criterion = args
    front = run_search(data, cfg)
    return label, front, select_model(front, data, criterion)


def run_groups(
    table: DalyTable,
    retention: Union[RetentionRule, str, None] = KAISER,
) -> List[GroupResult]:
    """Standardize and decompose every group present in the table."""
    rule = parse_retention(retention)
    results = []
    for group_id in table.present_groups():
        z = standardize(table, group_id)
        model = fit_pca(z, group_id, rule)
        scores = component_scores(z, model, index_labels(group_id, model.retained))
        results.append(GroupResult(group_id=group_id, z=z, model=model, scores=tuple(scores)))
    return results


def run_pipeline(
    csv_path: Union[str, Path],
    group_config: Union[str, Path, Mapping[str, str]],
    cfg: SrConfig = SrConfig(),
    tmap: TimeIndexMap = TimeIndexMap(),
    horizon_year: int = DEFAULT_HORIZON,
    retention: Union[RetentionRule, str, None] = KAISER,
    criterion: SelectionCriterion = SelectionCriterion(),
) -> PipelineReport:
    """
    Run every stage and collect the results.

    Each index gets its own search seed, derived from cfg.seed and the index
    label. With cfg.workers > 1 the per-index searches run in a process pool;
    the result does not depend on the worker count.

    Args:
        csv_path: DALY CSV file
        group_config: path to the group YAML, or a cause -> group mapping
        cfg: search configuration (seed is the master seed)
        tmap: year -> t mapping
        horizon_year: last forecast year
        retention: component retention rule
        criterion: model selection threshold

    Returns:
        PipelineReport
    """
    rule = parse_retention(retention)

    with _stage("ingest"):
        groups_map = (
            load_group_config(group_config)
            if isinstance(group_config, (str, Path)) else dict(group_config)
        )
        table = load_daly_csv(csv_path, groups_map)
        for year in table.years:
            tmap.t(year)

    with _stage("pca"):
        groups = run_groups(table, rule)

    with _stage("search"):
        jobs = []
        owners = {}
        for group in groups:
            for series in group.scores:
                seed = derive_seed(cfg.seed, series.index_id)
                data = TrainingSet.from_series(series, tmap)
                job_cfg = replace(cfg, seed=seed, workers=1)
                jobs.append((series.index_id, data, job_cfg, criterion))
                owners[series.index_id] = (group.group_id, series, seed)
        logger.info("Searching models for %d indices: %s", len(jobs), ", ".join(j[0] for j in jobs))
        if cfg.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=min(cfg.workers, len(jobs))) as pool:
                found = list(pool.map(_search_index, jobs))
        else:
            found = [_search_index(job) for job in jobs]

    indices = []
    with _stage("forecast"):
        first_year, last_year = table.years[0], table.years[-1]
        for label, front, fit in found:
            group_id, series, seed = owners[label]
            ftable = forecast(
                fit.expr,
                range(first_year, horizon_year + 1),
                tmap,
                last_fit_year=last_year,
                index_id=label,
            )
            # a trend needs two forecast years
            verdict = trend(ftable) if len(ftable.forecast_rows()) >= 2 else None
            logger.info("%s: %s (R^2=%.4f, complexity %d) -> %s",
                        label, fit.expression, fit.metrics.r2, fit.complexity,
                        verdict.direction if verdict else "no trend")
            indices.append(IndexResult(
                index_id=label, group_id=group_id, series=series, seed=seed,
                front=front, fit=fit, table=ftable, verdict=verdict,
            ))

    return PipelineReport(
        table=table,
        groups=tuple(groups),
        indices=tuple(indices),
        search=cfg,
        time_map=tmap,
        horizon=horizon_year,
        retention=rule,
    )

