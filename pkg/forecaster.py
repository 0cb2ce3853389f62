"""Extrapolating a fitted model over calendar years and classifying the trend."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from data_ingest import TimeIndexMap, to_time_index
from errors import DomainError, TooFewForecastRows, ValidationError
from expr_tree import Expr, evaluate

logger = logging.getLogger(__name__)

ACTUAL = "actual"
FORECAST = "forecast"

INCREASING = "increasing"
DECREASING = "decreasing"
MIXED = "mixed"


@dataclass(frozen=True)
class ForecastRow:
    year: int
    t: int
    value: float
    kind: str

    def to_dict(self) -> Dict[str, object]:
        return {"year": self.year, "t": self.t, "value": self.value, "kind": self.kind}


@dataclass(frozen=True)
class ForecastTable:
    index_id: str
    rows: Tuple[ForecastRow, ...]
    time_map: TimeIndexMap

    def __post_init__(self) -> None:
        years = [r.year for r in self.rows]
        if any(b <= a for a, b in zip(years, years[1:])):
            raise ValidationError(f"{self.index_id}: forecast years must be strictly increasing")
        kinds = [r.kind for r in self.rows]
        if FORECAST in kinds and ACTUAL in kinds[kinds.index(FORECAST):]:
            raise ValidationError(f"{self.index_id}: actual rows must precede forecast rows")

    def forecast_rows(self) -> List[ForecastRow]:
        return [r for r in self.rows if r.kind == FORECAST]

    def values(self) -> List[float]:
        return [r.value for r in self.rows]


@dataclass(frozen=True)
class TrendVerdict:
    index_id: str
    direction: str
    window: Tuple[int, int]


def forecast(
    e: Expr,
    years: Iterable[int],
    tmap: TimeIndexMap = TimeIndexMap(),
    last_fit_year: Optional[int] = None,
    index_id: str = "model",
) -> ForecastTable:
    """
    Evaluate e at every year.

    Rows for years up to last_fit_year are marked actual (the fitting era);
    later rows are forecast. Without last_fit_year every row is a forecast.
    DomainError is re-raised carrying the offending year.
    """
    rows = []
    for year in sorted(int(y) for y in years):
        t = to_time_index(year, tmap)
        try:
            value = evaluate(e, t)
        except DomainError as err:
            raise err.at_year(year) from None
        kind = ACTUAL if last_fit_year is not None and year <= last_fit_year else FORECAST
        rows.append(ForecastRow(year=year, t=t, value=value, kind=kind))
    return ForecastTable(index_id=index_id, rows=tuple(rows), time_map=tmap)


def _direction(values: Sequence[float]) -> str:
    deltas = [b - a for a, b in zip(values, values[1:])]
    if all(d > 0 for d in deltas):
        return INCREASING
    if all(d < 0 for d in deltas):
        return DECREASING
    return MIXED


def trend(table: ForecastTable) -> TrendVerdict:
    rows = table.forecast_rows()
    if len(rows) < 2:
        raise TooFewForecastRows(
            f"{table.index_id}: trend needs at least 2 forecast rows, got {len(rows)}"
        )
    verdict = TrendVerdict(
        index_id=table.index_id,
        direction=_direction([r.value for r in rows]),
        window=(rows[0].year, rows[-1].year),
    )
    logger.debug("%s trend %s over %d-%d", verdict.index_id, verdict.direction, *verdict.window)
    return verdict


def summarize_trends(verdicts: Iterable[TrendVerdict]) -> str:
    """e.g. 'decreasing: CPC1, IPC1; increasing: NPC'."""
    grouped: Dict[str, List[str]] = {DECREASING: [], INCREASING: [], MIXED: []}
    for v in verdicts:
        grouped[v.direction].append(v.index_id)
    parts = [f"{direction}: {', '.join(ids)}" for direction, ids in grouped.items() if ids]
    return "; ".join(parts) if parts else "no trends"
