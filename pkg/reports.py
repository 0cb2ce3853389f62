"""
Report artifacts: JSON reports, CSV tables and plot data, optional XLSX.

Files contain no timestamps or run metrics, so identical inputs and seed
produce byte-identical artifacts.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import pandas as pd

try:
    import openpyxl  # type: ignore
except Exception:
    openpyxl = None

from data_ingest import TimeIndexMap
from errors import InputOutputError, MissingFile, ValidationError
from expr_parser import parse, to_text
from fit_metrics import FitMetrics
from forecaster import FORECAST, ForecastTable, TrendVerdict, forecast, summarize_trends, trend
from pca_core import PcaModel, ScoreSeries, scree_data
from pipeline import IndexResult, PipelineReport
from sr_engine import FitReport, ParetoFront, SrConfig

logger = logging.getLogger(__name__)


# ---- records ---- #

def index_record(index_id: str, expression: str, fit: FitMetrics, complexity: int,
                 table: ForecastTable) -> Dict[str, Any]:
    return {
        "index": index_id,
        "expression": expression,
        "r2": fit.r2,
        "r": fit.r,
        "mse": fit.mse,
        "mae": fit.mae,
        "complexity": complexity,
        "rows": [row.to_dict() for row in table.rows],
    }


def trend_record(verdict: TrendVerdict) -> Dict[str, Any]:
    return {"index": verdict.index_id, "direction": verdict.direction,
            "window": list(verdict.window)}


def build_report(report: PipelineReport) -> Dict[str, Any]:
    return {
        "seed": report.search.seed,
        "offset_year": report.time_map.offset_year,
        "horizon": report.horizon,
        "retention": str(report.retention),
        "indices": [
            index_record(ix.index_id, ix.fit.expression, ix.fit.metrics, ix.fit.complexity, ix.table)
            for ix in report.indices
        ],
        "trends": [trend_record(v) for v in report.verdicts()],
        "summary": summarize_trends(report.verdicts()),
    }


def fronts_record(report: PipelineReport) -> Dict[str, Any]:
    config = report.search.to_dict()
    config.pop("seed")
    return {
        "master_seed": report.search.seed,
        "config": config,
        "indices": [
            {"index": ix.index_id, "seed": ix.seed, "front": ix.front.to_records()}
            for ix in report.indices
        ],
    }


def fit_record(index_id: str, series: ScoreSeries, tmap: TimeIndexMap, fit: FitReport,
               front: ParetoFront, cfg: SrConfig) -> Dict[str, Any]:
    """Single-index search result, as written by the `fit` subcommand."""
    return {
        "index": index_id,
        "expression": fit.expression,
        "r2": fit.metrics.r2,
        "r": fit.metrics.r,
        "mse": fit.metrics.mse,
        "mae": fit.metrics.mae,
        "complexity": fit.complexity,
        "seed": cfg.seed,
        "offset_year": tmap.offset_year,
        "years": list(series.years),
        "scores": list(series.scores),
        "config": cfg.to_dict(),
        "front": front.to_records(),
    }


# ---- frames ---- #

def pca_frame(model: PcaModel) -> pd.DataFrame:
    """Loadings of the retained components plus the eigenvalue/percentage rows."""
    k = model.retained
    columns = [f"PC{i}" for i in range(1, k + 1)]
    frame = pd.DataFrame(model.loadings[:, :k], columns=columns)
    frame.insert(0, "row", list(model.variables))
    extra = pd.DataFrame(
        [
            ["Eigenvalue"] + list(model.eigenvalues[:k]),
            ["Percentage of total variation explained"] + list(100.0 * model.explained_fraction[:k]),
            ["Cumulative percentage of total variation"] + list(100.0 * model.cumulative_fraction[:k]),
        ],
        columns=["row"] + columns,
    )
    return pd.concat([frame, extra], ignore_index=True)


def scree_frame(model: PcaModel) -> pd.DataFrame:
    return pd.DataFrame(scree_data(model), columns=["component", "eigenvalue"])


def scores_frame(series: Sequence[ScoreSeries]) -> pd.DataFrame:
    frame = pd.DataFrame({"year": list(series[0].years)}) if series else pd.DataFrame({"year": []})
    for s in series:
        frame[s.index_id] = list(s.scores)
    return frame


def fit_frame(indices: Sequence[IndexResult]) -> pd.DataFrame:
    rows = [
        {
            "model": i + 1,
            "index": ix.index_id,
            "expression": ix.fit.expression,
            "r2": ix.fit.metrics.r2,
            "r": ix.fit.metrics.r,
            "mse": ix.fit.metrics.mse,
            "mae": ix.fit.metrics.mae,
            "complexity": ix.fit.complexity,
        }
        for i, ix in enumerate(indices)
    ]
    return pd.DataFrame(rows, columns=["model", "index", "expression", "r2", "r", "mse", "mae", "complexity"])


def forecast_frame(tables: Sequence[ForecastTable]) -> pd.DataFrame:
    """Wide table: year, kind, one column per index."""
    if not tables:
        return pd.DataFrame(columns=["year", "kind"])
    base = tables[0]
    frame = pd.DataFrame({
        "year": [r.year for r in base.rows],
        "kind": [r.kind for r in base.rows],
    })
    for table in tables:
        if [r.year for r in table.rows] != frame["year"].tolist():
            raise ValidationError(f"{table.index_id}: forecast years differ from {base.index_id}")
        frame[table.index_id] = table.values()
    return frame


def overlay_frame(ix: IndexResult) -> pd.DataFrame:
    """Observed index against the fitted model over the fitting years."""
    model_at = {r.year: r.value for r in ix.table.rows}
    return pd.DataFrame({
        "year": list(ix.series.years),
        "t": [ix.table.time_map.t(y) for y in ix.series.years],
        "actual": list(ix.series.scores),
        "model": [model_at[y] for y in ix.series.years],
    })


# ---- writers ---- #

def write_json(path: Path, data: Mapping[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(data, indent=2, ensure_ascii=False))
        f.write("\n")
    return path


def write_csv(path: Path, frame: pd.DataFrame) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def write_xlsx(path: Path, sheets: Mapping[str, pd.DataFrame]) -> Optional[Path]:
    """One worksheet per frame; skipped with a warning when openpyxl is missing."""
    if openpyxl is None:
        logger.warning("openpyxl is not installed; skipping %s", path)
        return None
    wb = openpyxl.Workbook()
    wb.remove(wb.active)
    for title, frame in sheets.items():
        ws = wb.create_sheet(title=title[:31])
        ws.append(list(frame.columns))
        for record in frame.itertuples(index=False, name=None):
            ws.append([None if (isinstance(v, float) and v != v) else v for v in record])
    path.parent.mkdir(parents=True, exist_ok=True)
    wb.save(path)
    return path


def write_pca_artifacts(models: Iterable[PcaModel], series: Sequence[ScoreSeries], out_dir: Path) -> List[Path]:
    written = []
    for model in models:
        written.append(write_csv(out_dir / f"pca_{model.group_id}.csv", pca_frame(model)))
        written.append(write_csv(out_dir / f"scree_{model.group_id}.csv", scree_frame(model)))
    if series:
        written.append(write_csv(out_dir / "scores.csv", scores_frame(series)))
    return written


def write_pipeline_artifacts(report: PipelineReport, out_dir: Path, xlsx: bool = False) -> List[Path]:
    """
    Write every pipeline artifact under out_dir.

    Returns:
        list: paths written, in a fixed order
    """
    out_dir = Path(out_dir)
    series = [s for g in report.groups for s in g.scores]
    written = [
        write_json(out_dir / "report.json", build_report(report)),
        write_json(out_dir / "fronts.json", fronts_record(report)),
        write_csv(out_dir / "fit_table.csv", fit_frame(report.indices)),
        write_csv(out_dir / "forecast_table.csv", forecast_frame([ix.table for ix in report.indices])),
    ]
    written += write_pca_artifacts([g.model for g in report.groups], series, out_dir)
    for ix in report.indices:
        written.append(write_csv(out_dir / f"overlay_{ix.index_id}.csv", overlay_frame(ix)))

    if xlsx:
        sheets = {"forecast": forecast_frame([ix.table for ix in report.indices]),
                  "fit": fit_frame(report.indices)}
        for g in report.groups:
            sheets[f"pca_{g.group_id}"] = pca_frame(g.model)
        path = write_xlsx(out_dir / "report.xlsx", sheets)
        if path is not None:
            written.append(path)
    return written


# ---- combining fit results ---- #

def load_fit_records(from_dir: Path) -> List[Dict[str, Any]]:
    from_dir = Path(from_dir)
    if not from_dir.is_dir():
        raise MissingFile(str(from_dir))
    records = []
    for path in sorted(from_dir.glob("fit_*.json")):
        try:
            with open(path, "r", encoding="utf-8") as f:
                records.append(json.load(f))
        except json.JSONDecodeError as e:
            raise ValidationError(f"{path}: invalid JSON ({e})") from None
        except OSError as e:
            raise InputOutputError(f"{path}: {e}") from None
    if not records:
        raise MissingFile(str(from_dir / "fit_*.json"))
    return records


def combine_fit_records(records: Sequence[Mapping[str, Any]], horizon: int,
                        offset_year: Optional[int] = None) -> Tuple[Dict[str, Any], List[ForecastTable]]:
    """
    Rebuild a combined report from per-index fit files.

    The expression text is re-parsed and extrapolated to the horizon.
    """
    indices = []
    verdicts = []
    tables = []
    for rec in records:
        tmap = TimeIndexMap(int(offset_year if offset_year is not None else rec["offset_year"]))
        years = [int(y) for y in rec["years"]]
        expr = parse(rec["expression"])
        table = forecast(expr, range(years[0], horizon + 1), tmap,
                         last_fit_year=years[-1], index_id=rec["index"])
        fit = FitMetrics(r2=rec["r2"], r=rec["r"], mse=rec["mse"], mae=rec["mae"], n=len(years))
        indices.append(index_record(rec["index"], to_text(expr), fit, int(rec["complexity"]), table))
        tables.append(table)
        if len(table.forecast_rows()) >= 2:
            verdicts.append(trend(table))
    report = {
        "horizon": horizon,
        "indices": indices,
        "trends": [trend_record(v) for v in verdicts],
        "summary": summarize_trends(verdicts),
    }
    return report, tables


# ---- console tables ---- #

def format_pca_table(model: PcaModel) -> str:
    k = model.retained
    width = max(len(v) for v in model.variables) + 2
    lines = [f"Principal components: {model.group_id} (p={model.p}, retained={k})"]
    lines.append(" " * width + "".join(f"{'PC' + str(i + 1):>10}" for i in range(k)))
    for j, name in enumerate(model.variables):
        lines.append(f"{name:<{width}}" + "".join(f"{model.loadings[j, i]:>10.3f}" for i in range(k)))
    lines.append(f"{'Eigenvalue':<{width}}" + "".join(f"{model.eigenvalues[i]:>10.3f}" for i in range(k)))
    lines.append(f"{'% explained':<{width}}"
                 + "".join(f"{100 * model.explained_fraction[i]:>10.1f}" for i in range(k)))
    lines.append(f"{'cumulative %':<{width}}"
                 + "".join(f"{100 * model.cumulative_fraction[i]:>10.1f}" for i in range(k)))
    return "\n".join(lines)


def format_forecast_table(tables: Sequence[ForecastTable], display_scale: float = 1.0,
                          forecast_only: bool = False) -> str:
    """
    Console rendition; values are divided by display_scale.

    Rows are the union of all years, aligned by year; an index without a
    value for a year gets a blank cell. The kind shown is that of the first
    table covering the year.
    """
    if not tables:
        return ""
    scale = float(display_scale) or 1.0
    values = pd.concat(
        [pd.Series(t.values(), index=[r.year for r in t.rows], dtype=float) for t in tables],
        axis=1, sort=True,
    )
    kinds: Dict[int, str] = {}
    for t in tables:
        for r in t.rows:
            kinds.setdefault(r.year, r.kind)

    header = f"{'kind':<10}{'year':>6}" + "".join(f"{t.index_id:>14}" for t in tables)
    lines = [header, "-" * len(header)]
    for year, row in zip(values.index, values.to_numpy()):
        kind = kinds[int(year)]
        if forecast_only and kind != FORECAST:
            continue
        cells = "".join(f"{'':>14}" if pd.isna(v) else f"{v / scale:>14.6g}" for v in row)
        lines.append(f"{kind:<10}{int(year):>6}{cells}")
    return "\n".join(lines)
