"""
Two-sample ingestion, ECDF evaluation and log-log plot data.

A CSV either carries one column per group (`--x-col/--y-col`) or a long layout
with a group column and a value column (`--group-col/--value-col/--baseline`).
The baseline group is X (distribution F0, size m); the other group is Y
(distribution F, size n).
"""

import io
import logging
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np
import pandas as pd

from prhr.exceptions import (
    DomainError,
    InsufficientDataError,
    ParseError,
    SchemaError,
)

logger = logging.getLogger("prhr")

MIN_GROUP_SIZE = 2


@dataclass(frozen=True, eq=False)
class Sample:
    """One group's observations, finite and sorted nondecreasingly."""

    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        values = np.sort(np.asarray(self.values, dtype=np.float64).ravel())
        if values.size == 0:
            raise InsufficientDataError(f"Sample {self.label!r} is empty")
        if not np.all(np.isfinite(values)):
            raise DomainError(f"Sample {self.label!r} contains NaN or infinite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def m(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.m

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sample):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class LogLogSeries:
    """Points (t, log(-log Fn(t))) at the distinct values with 0 < Fn(t) < 1."""

    t: np.ndarray
    loglog: np.ndarray
    label: str = ""

    def __len__(self) -> int:
        return int(self.t.size)

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.t.tolist(), self.loglog.tolist()))


@dataclass(frozen=True)
class ColumnSpec:
    """
    Either `x_col` and `y_col`, or `group_col`, `value_col` and `baseline`.

    In the long layout the single label other than `baseline` becomes Y;
    `other` pins that label when the file holds more than two groups.
    """

    x_col: str | None = None
    y_col: str | None = None
    group_col: str | None = None
    value_col: str | None = None
    baseline: str | None = None
    other: str | None = None

    WIDE_FIELDS = ("x_col", "y_col")
    LONG_FIELDS = ("group_col", "value_col", "baseline", "other")

    def _given(self, names: tuple[str, ...]) -> list[str]:
        return [name for name in names if getattr(self, name) is not None]

    @property
    def is_wide(self) -> bool:
        return len(self._given(self.WIDE_FIELDS)) == len(self.WIDE_FIELDS)

    def validate(self) -> None:
        wide = self._given(self.WIDE_FIELDS)
        long = self._given(self.LONG_FIELDS)
        if wide and long:
            raise SchemaError(
                f"Wide and long column options cannot be mixed: "
                f"{', '.join(wide + long)}"
            )
        complete_long = all(
            getattr(self, name) is not None for name in ("group_col", "value_col", "baseline")
        )
        if not (self.is_wide or complete_long):
            raise SchemaError(
                "Give either both x/y value columns or group column, value column "
                "and baseline label"
            )


def _to_finite(cells: pd.Series, column: str, row_numbers: pd.Index) -> np.ndarray:
    """Convert raw string cells; row numbers count the header as line 1."""
    stripped = cells.astype(str).str.strip()
    for row, cell in zip(row_numbers, stripped):
        if cell == "":
            raise ParseError("Missing value", row=int(row), column=column)
    numbers = pd.to_numeric(stripped, errors="coerce")
    bad = numbers.isna() | ~np.isfinite(numbers.fillna(0.0))
    if bad.any():
        position = int(np.flatnonzero(bad.to_numpy())[0])
        raise ParseError(
            f"Not a finite number: {stripped.iloc[position]!r}",
            row=int(row_numbers[position]),
            column=column,
        )
    # to_numeric is not correctly rounded; float() is
    return np.array([float(cell) for cell in stripped], dtype=np.float64)


def _check_size(values: np.ndarray, label: str) -> None:
    if values.size < MIN_GROUP_SIZE:
        raise InsufficientDataError(
            f"Group {label!r} has {values.size} observation(s); at least "
            f"{MIN_GROUP_SIZE} are required"
        )


def _warn_negative(values: np.ndarray, label: str) -> None:
    negatives = int(np.count_nonzero(values < 0))
    if negatives:
        logger.warning(
            f"Group {label!r} has {negatives} negative observation(s); the "
            f"statistics are rank-based and remain well defined"
        )


def parse_two_samples(source: IO | str | bytes, spec: ColumnSpec) -> tuple[Sample, Sample]:
    """
    Read a UTF-8 CSV with a header row into the (X, Y) pair of Samples.

    Row order is irrelevant: each Sample is stored sorted.
    """
    spec.validate()
    if isinstance(source, bytes):
        source = io.BytesIO(source)
    elif isinstance(source, str):
        source = io.StringIO(source)

    try:
        frame = pd.read_csv(
            source,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            skip_blank_lines=False,
            encoding="utf-8",
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise ParseError(f"Unreadable CSV: {exc}") from exc

    frame.columns = [str(c).strip() for c in frame.columns]
    frame = frame.fillna("")
    # header is line 1; blank lines are read as rows so the numbering holds
    blank_line = frame.apply(lambda column: column.str.strip().eq("")).all(axis=1)
    frame = frame.loc[~blank_line]
    row_numbers = frame.index + 2
    frame = frame.reset_index(drop=True)

    if spec.is_wide:
        missing = [c for c in (spec.x_col, spec.y_col) if c not in frame.columns]
        if missing:
            raise SchemaError(f"Columns not found in header: {', '.join(missing)}")
        x_cells, y_cells = frame[spec.x_col], frame[spec.y_col]
        # a shorter group leaves trailing blanks in its column
        x_rows = _trim_trailing_blanks(x_cells)
        y_rows = _trim_trailing_blanks(y_cells)
        x_values = _to_finite(x_cells.loc[x_rows], spec.x_col, row_numbers[x_rows])
        y_values = _to_finite(y_cells.loc[y_rows], spec.y_col, row_numbers[y_rows])
        x_label, y_label = spec.x_col, spec.y_col
    else:
        missing = [c for c in (spec.group_col, spec.value_col) if c not in frame.columns]
        if missing:
            raise SchemaError(f"Columns not found in header: {', '.join(missing)}")
        groups = frame[spec.group_col].astype(str).str.strip()
        labels = list(dict.fromkeys(groups))
        if spec.baseline not in labels:
            raise SchemaError(
                f"Unknown group label {spec.baseline!r}; found {', '.join(map(repr, labels))}"
            )
        others = [label for label in labels if label != spec.baseline]
        if spec.other is not None:
            if spec.other not in others:
                raise SchemaError(f"Unknown group label {spec.other!r}")
            y_label = spec.other
        elif len(others) == 1:
            y_label = others[0]
        elif not others:
            raise InsufficientDataError(
                f"Only the baseline group {spec.baseline!r} is present"
            )
        else:
            raise SchemaError(
                f"Expected two groups, found {len(labels)}: {', '.join(map(repr, labels))}"
            )
        x_label = spec.baseline
        x_mask = (groups == x_label).to_numpy()
        y_mask = (groups == y_label).to_numpy()
        values = frame[spec.value_col]
        x_values = _to_finite(values[x_mask], spec.value_col, row_numbers[x_mask])
        y_values = _to_finite(values[y_mask], spec.value_col, row_numbers[y_mask])

    _check_size(x_values, x_label)
    _check_size(y_values, y_label)
    _warn_negative(x_values, x_label)
    _warn_negative(y_values, y_label)

    return Sample(x_values, label=x_label), Sample(y_values, label=y_label)


def _trim_trailing_blanks(cells: pd.Series) -> np.ndarray:
    blank = cells.astype(str).str.strip().eq("").to_numpy()
    filled = np.flatnonzero(~blank)
    keep = np.zeros(blank.size, dtype=bool)
    if filled.size:
        keep[: filled[-1] + 1] = True
    return keep


def samples_to_csv(
    x: Sample,
    y: Sample,
    group_col: str = "group",
    value_col: str = "value",
    float_format: str = "%.17g",
) -> str:
    """Serialize a pair in the long layout readable by `parse_two_samples`."""
    frame = pd.DataFrame(
        {
            group_col: [x.label] * x.m + [y.label] * y.m,
            value_col: np.concatenate([x.values, y.values]),
        }
    )
    return frame.to_csv(index=False, float_format=float_format, lineterminator="\n")


def ecdf(s: Sample, t: float) -> float:
    """Right-continuous empirical CDF: #{values <= t} / m."""
    return int(np.searchsorted(s.values, t, side="right")) / s.m


def loglog_series(s: Sample) -> LogLogSeries:
    """
    log(-log Fn(t)) at each distinct observed t with Fn(t) < 1.

    The sample maximum (Fn = 1) is dropped rather than clamped.
    """
    distinct = np.unique(s.values)
    fn = np.searchsorted(s.values, distinct, side="right") / s.m
    keep = fn < 1.0
    t = distinct[keep]
    loglog = np.log(-np.log(fn[keep]))
    t.setflags(write=False)
    loglog.setflags(write=False)
    return LogLogSeries(t=t, loglog=loglog, label=s.label)


def loglog_frame(series: Iterable[LogLogSeries]) -> pd.DataFrame:
    """Stack series into the `label,t,loglog` plot-data layout."""
    frames = [
        pd.DataFrame({"label": s.label, "t": s.t, "loglog": s.loglog}) for s in series
    ]
    if not frames:
        return pd.DataFrame(columns=["label", "t", "loglog"])
    return pd.concat(frames, ignore_index=True)[["label", "t", "loglog"]]


def loglog_csv(series: Iterable[LogLogSeries], float_format: str = "%.17g") -> str:
    return loglog_frame(series).to_csv(
        index=False, float_format=float_format, lineterminator="\n"
    )
