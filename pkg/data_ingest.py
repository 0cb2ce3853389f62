"""
Loading, validation, grouping and standardization of annual DALY tables.

A DALY table has one row per calendar year and one column per cause of
disease burden. Causes are assigned to exactly one of three groups
(communicable, noncommunicable, injury) by a separate YAML group config.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import yaml

from errors import (
    ConstantColumn,
    GapInYears,
    InvalidGroupConfig,
    MalformedRow,
    MissingFile,
    NegativeValue,
    NonPositiveIndex,
    TooFewColumns,
    TooFewRows,
    UnmappedCause,
)

logger = logging.getLogger(__name__)

GROUPS: Tuple[str, ...] = ("communicable", "noncommunicable", "injury")

DEFAULT_OFFSET_YEAR = 1989


@dataclass(frozen=True)
class DalyTable:
    """Validated DALY counts, |years| rows by |causes| columns."""

    years: Tuple[int, ...]
    causes: Tuple[str, ...]
    groups: Mapping[str, str]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.years), len(self.causes)):
            raise MalformedRow(
                f"value matrix has shape {values.shape}, expected "
                f"({len(self.years)}, {len(self.causes)})"
            )
        if len(set(self.causes)) != len(self.causes):
            raise MalformedRow("duplicate cause names in header")
        for before, after in zip(self.years, self.years[1:]):
            if after == before:
                raise MalformedRow(f"duplicate year {after}")
            if after != before + 1:
                raise GapInYears(before, after)
        for cause in self.causes:
            group = self.groups.get(cause)
            if group is None:
                raise UnmappedCause(cause)
            if group not in GROUPS:
                raise InvalidGroupConfig(f"cause '{cause}' has unknown group '{group}'")
        if not np.all(np.isfinite(values)):
            raise MalformedRow("non-finite DALY value")
        negative = np.argwhere(values < 0)
        if negative.size:
            r, c = negative[0]
            raise NegativeValue(self.causes[c], self.years[r], float(values[r, c]))
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "groups", {c: self.groups[c] for c in self.causes})

    def causes_in(self, group: str) -> Tuple[str, ...]:
        return tuple(c for c in self.causes if self.groups[c] == group)

    def present_groups(self) -> Tuple[str, ...]:
        return tuple(g for g in GROUPS if self.causes_in(g))

    def submatrix(self, group: str) -> Tuple[Tuple[str, ...], np.ndarray]:
        names = self.causes_in(group)
        cols = [self.causes.index(c) for c in names]
        return names, self.values[:, cols]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.values, columns=list(self.causes))
        frame.insert(0, "year", list(self.years))
        return frame


@dataclass(frozen=True)
class StandardizedMatrix:
    """Column z-scores using the sample standard deviation (divisor n - 1)."""

    column_names: Tuple[str, ...]
    z: np.ndarray
    means: np.ndarray
    std_devs: np.ndarray
    years: Optional[Tuple[int, ...]] = field(default=None)

    @property
    def n_rows(self) -> int:
        return int(self.z.shape[0])

    @property
    def n_cols(self) -> int:
        return int(self.z.shape[1])


@dataclass(frozen=True)
class TimeIndexMap:
    """Maps a calendar year to the model time index t = year - offset_year."""

    offset_year: int = DEFAULT_OFFSET_YEAR

    def t(self, year: int) -> int:
        return to_time_index(year, self)


def to_time_index(year: int, tmap: TimeIndexMap) -> int:
    if year <= tmap.offset_year:
        raise NonPositiveIndex(int(year), tmap.offset_year)
    return int(year) - tmap.offset_year


def load_group_config(path: Union[str, Path]) -> Dict[str, str]:
    """
    Read the YAML group config mapping cause name -> group id.

    Accepts a flat mapping or the same mapping nested under `causes:`.

    Args:
        path: Path to the YAML file

    Returns:
        dict: cause name -> one of communicable | noncommunicable | injury
    """
    path = Path(path)
    if not path.exists():
        raise MissingFile(str(path))

    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}

    if isinstance(data, dict) and isinstance(data.get("causes"), dict):
        data = data["causes"]
    if not isinstance(data, dict):
        raise InvalidGroupConfig(f"{path}: expected a mapping of cause name to group")

    mapping: Dict[str, str] = {}
    for cause, group in data.items():
        group = str(group).strip().lower()
        if group not in GROUPS:
            raise InvalidGroupConfig(
                f"{path}: cause '{cause}' has group '{group}', expected one of {', '.join(GROUPS)}"
            )
        mapping[str(cause).strip()] = group
    return mapping


def _parse_cell(text: object, row: int, column: str) -> float:
    if text is None or (isinstance(text, float) and math.isnan(text)):
        raise MalformedRow("missing value", row=row, column=column)
    cell = str(text).strip()
    if not cell:
        raise MalformedRow("missing value", row=row, column=column)
    try:
        value = float(cell)
    except ValueError:
        raise MalformedRow(f"non-numeric value '{cell}'", row=row, column=column) from None
    if not math.isfinite(value):
        raise MalformedRow(f"non-finite value '{cell}'", row=row, column=column)
    return value


def _parse_year(text: object, row: int) -> int:
    value = _parse_cell(text, row, "year")
    if value != int(value):
        raise MalformedRow(f"year '{text}' is not an integer", row=row, column="year")
    return int(value)


def load_daly_csv(path: Union[str, Path], group_config: Mapping[str, str]) -> DalyTable:
    """
    Load and validate a DALY CSV file.

    The header is `year,<cause1>,<cause2>,...`; every other row holds one
    year of DALY counts. Rows are returned sorted by year.

    Args:
        path: CSV file path
        group_config: cause name -> group id

    Returns:
        DalyTable: validated table
    """
    path = Path(path)
    if not path.exists():
        raise MissingFile(str(path))

    try:
        raw = pd.read_csv(
            path,
            header=None,
            dtype=str,
            na_filter=False,
            skip_blank_lines=True,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        raise MalformedRow("file is empty") from None
    except pd.errors.ParserError as e:
        raise MalformedRow(f"row length mismatch ({e})") from None

    header = [str(h).strip() for h in raw.iloc[0].tolist()]
    if not header or header[0].lower() != "year":
        raise MalformedRow("first column header must be 'year'", row=1)
    causes = header[1:]
    if not causes:
        raise TooFewColumns("no cause columns after 'year'")
    for cause in causes:
        if not cause:
            raise MalformedRow("empty cause name in header", row=1)
        if cause not in group_config:
            raise UnmappedCause(cause)

    years = []
    rows = []
    for offset, record in enumerate(raw.iloc[1:].itertuples(index=False, name=None)):
        line = offset + 2
        years.append(_parse_year(record[0], line))
        rows.append([_parse_cell(cell, line, cause) for cell, cause in zip(record[1:], causes)])

    if not rows:
        raise TooFewRows("no data rows")

    order = np.argsort(np.asarray(years), kind="stable")
    sorted_years = tuple(int(years[i]) for i in order)
    values = np.asarray(rows, dtype=float)[order]

    table = DalyTable(
        years=sorted_years,
        causes=tuple(causes),
        groups={c: group_config[c] for c in causes},
        values=values,
    )
    logger.info(
        "Loaded %d years (%d-%d) x %d causes from %s",
        len(table.years), table.years[0], table.years[-1], len(table.causes), path,
    )
    return table


def zscore_columns(
    values: np.ndarray,
    column_names: Sequence[str],
    years: Optional[Sequence[int]] = None,
) -> StandardizedMatrix:
    """Standardize each column of a matrix to mean 0 and sample sd 1."""
    matrix = np.asarray(values, dtype=float)
    if matrix.ndim != 2:
        raise TooFewColumns("expected a 2-D matrix")
    n = matrix.shape[0]
    if n < 3:
        raise TooFewRows(f"standardization needs at least 3 rows, got {n}")

    means = matrix.mean(axis=0)
    std_devs = matrix.std(axis=0, ddof=1)
    for j, name in enumerate(column_names):
        if np.ptp(matrix[:, j]) == 0.0 or std_devs[j] == 0.0:
            raise ConstantColumn(name)

    z = (matrix - means) / std_devs
    for arr in (z, means, std_devs):
        arr.setflags(write=False)
    return StandardizedMatrix(
        column_names=tuple(column_names),
        z=z,
        means=means,
        std_devs=std_devs,
        years=tuple(int(y) for y in years) if years is not None else None,
    )


def standardize(table: DalyTable, group: str) -> StandardizedMatrix:
    """
    Z-score the causes of one group.

    Args:
        table: validated DALY table
        group: group id

    Returns:
        StandardizedMatrix: columns in table order for that group
    """
    names, sub = table.submatrix(group)
    if len(names) < 2:
        raise TooFewColumns(f"group '{group}' needs at least 2 causes, has {len(names)}")
    if len(table.years) < 3:
        raise TooFewRows(f"standardization needs at least 3 years, got {len(table.years)}")
    return zscore_columns(sub, names, years=table.years)
