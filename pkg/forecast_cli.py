#!/usr/bin/env python3
"""
Disease-burden forecasting command line.

Subcommands:
    ingest        validate a DALY CSV and echo the normalized table
    pca           per-group principal components, scree data and index scores
    fit           symbolic regression on one index series
    forecast      extrapolate an expression or a built-in model
    paper-models  list / evaluate the five published index models
    pipeline      ingest -> PCA -> search -> forecast, all artifacts
    report        combine fit_*.json files into one report

Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 I/O error.

Usage:
    python forecast_cli.py pipeline --input data/daly.csv --groups groups.yaml --out outputs
    python forecast_cli.py forecast --model CPC1 --horizon 2020
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from data_ingest import TimeIndexMap, load_daly_csv, load_group_config
from errors import BurdenError, MalformedRow, MissingFile
from expr_parser import parse, to_text
from expr_tree import evaluate
from forecaster import forecast, summarize_trends, trend
from monitoring import metrics
from paper_models import (
    INDEX_IDS,
    INDEX_MEANING,
    MODEL_TEXT,
    PUBLISHED_COMPONENTS,
    PUBLISHED_FIT,
    PUBLISHED_FORECAST,
    normalize_index_id,
    paper_model,
)
from pca_core import ScoreSeries, component_profile
from pipeline import run_groups, run_pipeline
from reports import (
    combine_fit_records,
    fit_record,
    forecast_frame,
    format_forecast_table,
    format_pca_table,
    load_fit_records,
    write_csv,
    write_json,
    write_pca_artifacts,
    write_pipeline_artifacts,
    write_xlsx,
)
from sr_engine import SelectionCriterion, SrConfig, TrainingSet, run_search, select_model
from utils import load_settings, parse_year_range, pick, setup_logging

__version__ = "1.0.0"

logger = logging.getLogger(__name__)

RULE = "=" * 60


def _time_map(args: argparse.Namespace, settings: Dict[str, Any]) -> TimeIndexMap:
    return TimeIndexMap(int(pick(getattr(args, "offset_year", None), settings["ingest"], "offset_year")))


def _groups_path(args: argparse.Namespace, settings: Dict[str, Any]) -> str:
    return str(pick(args.groups, settings["ingest"], "groups"))


def _search_config(args: argparse.Namespace, settings: Dict[str, Any]) -> SrConfig:
    return SrConfig.from_mapping(
        settings["search"],
        seed=getattr(args, "seed", None),
        generations=getattr(args, "generations", None),
        population_size=getattr(args, "population", None),
        workers=getattr(args, "workers", None),
    )


def _criterion(args: argparse.Namespace) -> SelectionCriterion:
    return SelectionCriterion() if args.min_r2 is None else SelectionCriterion(min_r2=args.min_r2)


# ---- subcommands ---- #

def cmd_ingest(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    table = load_daly_csv(args.input, load_group_config(_groups_path(args, settings)))
    print(f"✓ {len(table.years)} years ({table.years[0]}-{table.years[-1]}), {len(table.causes)} causes")
    for group in table.present_groups():
        causes = table.causes_in(group)
        print(f"  {group:<16} {len(causes):>2} causes: {', '.join(causes)}")
    if args.out:
        path = write_csv(Path(args.out) / "normalized.csv", table.to_frame())
        print(f"✓ Normalized table written to {path}")
    return 0


def cmd_pca(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    table = load_daly_csv(args.input, load_group_config(_groups_path(args, settings)))
    retention = pick(args.retention, settings["pca"], "retention")
    threshold = float(pick(args.threshold, settings["pca"], "profile_threshold"))
    groups = run_groups(table, retention)

    for g in groups:
        print(f"\n{RULE}\n{format_pca_table(g.model)}")
        for k, series in enumerate(g.scores, start=1):
            profile = component_profile(g.model, k, threshold)
            names = ", ".join(f"{cause} ({loading:+.3f})" for cause, loading in profile)
            print(f"  {series.index_id}: {names or 'no cause above threshold'}")

    if args.out:
        series = [s for g in groups for s in g.scores]
        paths = write_pca_artifacts([g.model for g in groups], series, Path(args.out))
        print(f"\n✓ Wrote {len(paths)} files to {args.out}")
    return 0


def _read_series(path: str, column: str) -> ScoreSeries:
    if not Path(path).exists():
        raise MissingFile(path)
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        raise MalformedRow("series file is empty") from None
    except (pd.errors.ParserError, ValueError, UnicodeDecodeError) as e:
        raise MalformedRow(f"series file could not be parsed ({e})") from None
    if "year" not in frame.columns:
        raise MalformedRow("series file needs a 'year' column", row=1)
    if column not in frame.columns:
        raise MalformedRow(f"series file has no column '{column}'", row=1)
    for name in ("year", column):
        numeric = pd.to_numeric(frame[name], errors="coerce")
        values = numeric.to_numpy(dtype=float)
        bad = ~np.isfinite(values)
        if name == "year":
            bad |= np.where(bad, 0.0, values) % 1 != 0
        if bad.any():
            # header is line 1
            line = int(np.flatnonzero(bad)[0]) + 2
            raise MalformedRow(f"non-numeric value {frame[name].iloc[line - 2]!r}", row=line, column=name)
        frame[name] = numeric
    frame = frame.sort_values("year", kind="stable")
    return ScoreSeries(
        index_id=column,
        years=tuple(int(y) for y in frame["year"]),
        scores=tuple(float(v) for v in frame[column]),
    )


def cmd_fit(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    series = _read_series(args.series, args.index)
    tmap = _time_map(args, settings)
    cfg = _search_config(args, settings)
    data = TrainingSet.from_series(series, tmap)

    print(f"Searching {series.index_id}: {data.n} points, population {cfg.population_size}, "
          f"{cfg.generations} generations, seed {cfg.seed}")
    front = run_search(data, cfg)
    fit = select_model(front, data, _criterion(args))

    print(f"\n{RULE}\nPareto front ({len(front)} entries)\n{RULE}")
    for entry in front:
        print(f"  cx {entry.complexity:>3}  mse {entry.mse:<12.6g} {to_text(entry.expr)}")
    r_text = "undefined" if fit.metrics.r is None else f"{fit.metrics.r:.4f}"
    print(f"\n✓ Selected: {fit.expression}")
    print(f"  R^2 {fit.metrics.r2:.4f}  R {r_text}  MSE {fit.metrics.mse:.4g}  "
          f"MAE {fit.metrics.mae:.4g}  complexity {fit.complexity}")

    if args.out:
        path = write_json(Path(args.out) / f"fit_{series.index_id}.json",
                          fit_record(series.index_id, series, tmap, fit, front, cfg))
        print(f"✓ Fit written to {path}")
    return 0


def cmd_forecast(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    if args.model:
        label = normalize_index_id(args.model)
        expr = paper_model(label)
    else:
        label = args.label or "model"
        expr = parse(args.expression)
    tmap = _time_map(args, settings)
    horizon = int(pick(args.horizon, settings["forecast"], "horizon"))
    start = int(pick(args.start_year, settings["forecast"], "start_year"))
    display_scale = float(pick(args.display_scale, settings["report"], "display_scale"))

    table = forecast(expr, range(start, horizon + 1), tmap,
                     last_fit_year=args.last_fit_year, index_id=label)
    print(f"{label} = {to_text(expr)}  (t = year - {tmap.offset_year})\n")
    print(format_forecast_table([table], display_scale))
    if len(table.forecast_rows()) >= 2:
        verdict = trend(table)
        print(f"\n✓ Trend {verdict.window[0]}-{verdict.window[1]}: {verdict.direction}")

    if args.out:
        path = write_csv(Path(args.out) / f"forecast_{label}.csv", forecast_frame([table]))
        print(f"✓ Forecast written to {path}")
    return 0


def _print_published() -> None:
    for comp in PUBLISHED_COMPONENTS.values():
        k = len(comp.eigenvalues)
        print(f"\n{RULE}\nPublished components: {comp.group_id} (p={comp.p})\n{RULE}")
        for cause, row in zip(comp.causes, comp.loadings):
            print(f"  {cause:<20}" + "".join(f"{v:>9.3f}" for v in row))
        print(f"  {'Eigenvalue':<20}" + "".join(f"{v:>9.3f}" for v in comp.eigenvalues))
        print(f"  {'% explained':<20}" + "".join(f"{v:>9.1f}" for v in comp.percent_explained))
        print(f"  {'cumulative %':<20}" + "".join(f"{v:>9.1f}" for v in comp.cumulative_percent))
        norms = [sum(x * x for x in comp.column(i)) for i in range(1, k + 1)]
        print(f"  {'sum of squares':<20}" + "".join(f"{v:>9.3f}" for v in norms))

    print(f"\n{RULE}\nPublished forecast table\n{RULE}")
    print(f"{'kind':<10}{'year':>6}" + "".join(f"{i:>12}" for i in INDEX_IDS))
    for year, (kind, values) in PUBLISHED_FORECAST.items():
        print(f"{kind:<10}{year:>6}" + "".join(f"{values[i]:>12.6g}" for i in INDEX_IDS))


def cmd_paper_models(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    print(f"{RULE}\nBuilt-in burden index models\n{RULE}")
    for index_id in INDEX_IDS:
        r2, r, mse, mae, cx = PUBLISHED_FIT[index_id]
        print(f"{index_id:<5} ({INDEX_MEANING[index_id]})")
        print(f"      {MODEL_TEXT[index_id]}")
        print(f"      published R^2 {r2}  R {r}  MSE {mse:g}  MAE {mae}  complexity {cx}")

    if args.t:
        print(f"\n{'t':>8}" + "".join(f"{i:>14}" for i in INDEX_IDS))
        for t in args.t:
            cells = []
            for index_id in INDEX_IDS:
                try:
                    cells.append(f"{evaluate(paper_model(index_id), t):>14.6g}")
                except BurdenError as e:
                    reason = getattr(e, "reason", None)
                    cells.append(f"{reason.value if reason else 'error':>14}")
            print(f"{t:>8g}" + "".join(cells))

    if args.years:
        first, last = parse_year_range(args.years)
        tmap = _time_map(args, settings)
        tables = [forecast(paper_model(i), range(first, last + 1), tmap, index_id=i) for i in INDEX_IDS]
        display_scale = float(pick(args.display_scale, settings["report"], "display_scale"))
        print()
        print(format_forecast_table(tables, display_scale))
        if last > first:
            print(f"\n✓ {summarize_trends(trend(t) for t in tables)}")

    if args.published:
        _print_published()
    return 0


def cmd_pipeline(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    cfg = _search_config(args, settings)
    tmap = _time_map(args, settings)
    horizon = int(pick(args.horizon, settings["forecast"], "horizon"))
    retention = pick(args.retention, settings["pca"], "retention")
    out_dir = Path(pick(args.out, settings["report"], "out_dir"))
    xlsx = bool(args.xlsx or settings["report"].get("xlsx"))
    display_scale = float(pick(args.display_scale, settings["report"], "display_scale"))

    report = run_pipeline(
        args.input,
        _groups_path(args, settings),
        cfg,
        tmap,
        horizon,
        retention,
        _criterion(args),
    )

    print(f"\n{RULE}\nFitted models\n{RULE}")
    for i, ix in enumerate(report.indices, start=1):
        m = ix.fit.metrics
        r_text = "undefined" if m.r is None else f"{m.r:.4f}"
        print(f"{i}. {ix.index_id} = {ix.fit.expression}")
        print(f"   R^2 {m.r2:.4f}  R {r_text}  MSE {m.mse:.4g}  MAE {m.mae:.4g}  complexity {ix.fit.complexity}")

    print(f"\n{RULE}\nForecast to {horizon}\n{RULE}")
    print(format_forecast_table([ix.table for ix in report.indices], display_scale))
    print(f"\n✓ {summarize_trends(report.verdicts())}")

    paths = write_pipeline_artifacts(report, out_dir, xlsx=xlsx)
    print(f"✓ Wrote {len(paths)} files to {out_dir}")
    return 0


def cmd_report(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    records = load_fit_records(Path(args.from_dir))
    horizon = int(pick(args.horizon, settings["forecast"], "horizon"))
    out_dir = Path(pick(args.out, settings["report"], "out_dir"))
    display_scale = float(pick(args.display_scale, settings["report"], "display_scale"))

    combined, tables = combine_fit_records(records, horizon, args.offset_year)
    print(format_forecast_table(tables, display_scale))
    print(f"\n✓ {combined['summary']}")

    paths = [write_json(out_dir / "report.json", combined)]
    frames = [forecast_frame([t]) for t in tables]
    try:
        paths.append(write_csv(out_dir / "forecast_table.csv", forecast_frame(tables)))
    except BurdenError:
        # indices fitted over different years cannot share one wide table
        for t, frame in zip(tables, frames):
            paths.append(write_csv(out_dir / f"forecast_{t.index_id}.csv", frame))
    if args.xlsx or settings["report"].get("xlsx"):
        xlsx = write_xlsx(out_dir / "report.xlsx", {t.index_id: f for t, f in zip(tables, frames)})
        if xlsx is not None:
            paths.append(xlsx)
    print(f"✓ Combined {len(records)} fits; wrote {len(paths)} files to {out_dir}")
    return 0


# ---- argument parsing ---- #

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="YAML config file (default: ./config.yaml if present)")
    p.add_argument("-v", "--verbose", action="store_true", help="Debug logging")


def _add_search(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="Master seed (unsigned 64-bit)")
    p.add_argument("--generations", type=int, default=None)
    p.add_argument("--population", type=int, default=None)
    p.add_argument("--workers", type=int, default=None, help="Worker processes for the search")
    p.add_argument("--min-r2", type=float, default=None, help="Selection threshold (default 0.99)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forecast_cli",
        description="PCA burden indices, symbolic regression and forecasting of DALY series",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="Validate a DALY CSV")
    p.add_argument("--input", required=True, help="DALY CSV (year,<cause>,...)")
    p.add_argument("--groups", default=None, help="Group config YAML")
    p.add_argument("--out", default=None, help="Directory for normalized.csv")
    _add_common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("pca", help="Principal components per disease group")
    p.add_argument("--input", required=True)
    p.add_argument("--groups", default=None)
    p.add_argument("--retention", default=None, help="kaiser | cumvar=<f> | fixed=<k>")
    p.add_argument("--threshold", type=float, default=None, help="Loading threshold for profiles")
    p.add_argument("--out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_pca)

    p = sub.add_parser("fit", help="Symbolic regression on one index series")
    p.add_argument("--series", required=True, help="CSV with a year column and index columns")
    p.add_argument("--index", required=True, help="Column to fit, e.g. CPC1")
    p.add_argument("--offset-year", type=int, default=None)
    p.add_argument("--out", default=None, help="Directory for fit_<index>.json")
    _add_search(p)
    _add_common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("forecast", help="Extrapolate a model over calendar years")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--expression", help="Model text, e.g. '9.32 + 0.16*t'")
    src.add_argument("--model", help="Built-in index model: " + ", ".join(INDEX_IDS))
    p.add_argument("--label", default=None, help="Index label for --expression")
    p.add_argument("--offset-year", type=int, default=None)
    p.add_argument("--start-year", type=int, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--last-fit-year", type=int, default=None, help="Rows up to this year are actual-era")
    p.add_argument("--display-scale", type=float, default=None)
    p.add_argument("--out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("paper-models", help="List and evaluate the built-in index models")
    p.add_argument("--t", type=float, nargs="*", default=None, help="Evaluate at these t values")
    p.add_argument("--years", default=None, help="Forecast over a year range, e.g. 2017-2020")
    p.add_argument("--offset-year", type=int, default=None)
    p.add_argument("--display-scale", type=float, default=None)
    p.add_argument("--published", action="store_true", help="Show the published reference tables")
    _add_common(p)
    p.set_defaults(func=cmd_paper_models)

    p = sub.add_parser("pipeline", help="End-to-end run")
    p.add_argument("--input", required=True)
    p.add_argument("--groups", default=None)
    p.add_argument("--offset-year", type=int, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--retention", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--xlsx", action="store_true", help="Also write report.xlsx (needs openpyxl)")
    p.add_argument("--display-scale", type=float, default=None)
    _add_search(p)
    _add_common(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("report", help="Combine fit_*.json files")
    p.add_argument("--from", dest="from_dir", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--offset-year", type=int, default=None)
    p.add_argument("--xlsx", action="store_true")
    p.add_argument("--display-scale", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    metrics.reset()
    try:
        settings = load_settings(args.config)
        return args.func(args, settings)
    except BurdenError as e:
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"❌ {e}", file=sys.stderr)
        return 3
    finally:
        exported = metrics.export()
        if exported["counters"] or exported["timers"]:
            logger.info("Run metrics: %s", exported)


if __name__ == "__main__":
    raise SystemExit(main())
