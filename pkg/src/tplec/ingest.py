"""Parsers for the two input data families plus the truncation transform.

Cumulative-fatality time series arrive in the public JHU CSV layout
(``Province/State,Country/Region,Lat,Long`` then one ``M/D/YY`` column
per day). Abundance tables arrive as TSV with taxa across the top and
one sample per row. Continent assignments come from a two-column CSV.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from datetime import date, datetime
from typing import Iterable, Mapping

import numpy as np

from .diversity import AbundanceTable
from .errors import (
    DateOutOfRange,
    DuplicateSampleId,
    MalformedHeader,
    MisalignedDates,
    RaggedRow,
    UnmappedCountry,
    UnparseableCount,
    UnparseableDate,
)

_JHU_FIXED_COLUMNS = ("Province/State", "Country/Region", "Lat", "Long")


@dataclass(frozen=True)
class RegionSeries:
    """Daily cumulative counts for one region (one source row)."""

    region: str
    dates: tuple[date, ...]
    cumulative: tuple[int, ...]


@dataclass(frozen=True)
class TruncatedSeries:
    """A series re-based at a chosen start date.

    ``baseline`` is the cumulative count on the day before the start
    date (0 when the start is the first date); ``f_rel[i]`` is the
    cumulative count at day index ``t_index[i]`` minus the baseline,
    with day index 1 on the start date itself.
    """

    start_date: date
    baseline: int
    t_index: tuple[int, ...]
    f_rel: tuple[int, ...]


def _reader(text) -> Iterable[list[str]]:
    stream = io.StringIO(text) if isinstance(text, str) else text
    return csv.reader(stream)


def _parse_header_date(cell: str, column: int) -> date:
    try:
        return datetime.strptime(cell.strip(), "%m/%d/%y").date()
    except ValueError:
        raise UnparseableDate(
            f"header column {column}: {cell!r} is not an M/D/YY date"
        ) from None


def _parse_count(cell: str, row: int, column_name: str) -> int:
    try:
        value = int(cell.strip())
    except ValueError:
        raise UnparseableCount(
            f"row {row}, column {column_name}: {cell!r} is not an integer"
        ) from None
    if value < 0:
        raise UnparseableCount(
            f"row {row}, column {column_name}: count {value} is negative"
        )
    return value


def parse_jhu_deaths(text) -> list[RegionSeries]:
    """Parse a JHU-layout deaths CSV into one series per source row.

    Province rows keep their country key so a later aggregation pass can
    sum them. Non-monotone cumulative counts (source data corrections)
    are kept as-is but flagged with a warning.
    """
    rows = list(_reader(text))
    if not rows:
        raise MalformedHeader("empty input")
    header = rows[0]
    if tuple(h.strip() for h in header[:4]) != _JHU_FIXED_COLUMNS:
        raise MalformedHeader(
            f"expected leading columns {','.join(_JHU_FIXED_COLUMNS)}, "
            f"got {','.join(header[:4])}"
        )
    if len(header) < 5:
        raise MalformedHeader("no date columns present")
    dates = tuple(
        _parse_header_date(cell, i) for i, cell in enumerate(header[4:], start=5)
    )
    for a, b in zip(dates, dates[1:]):
        if (b - a).days != 1:
            raise MalformedHeader(f"date axis is not daily between {a} and {b}")

    series = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise RaggedRow(
                f"row {i} has {len(row)} fields, header has {len(header)}"
            )
        country = row[1].strip()
        counts = tuple(
            _parse_count(cell, i, header[4 + j])
            for j, cell in enumerate(row[4:])
        )
        drops = [k for k in range(1, len(counts)) if counts[k] < counts[k - 1]]
        if drops:
            warnings.warn(
                f"cumulative counts for {country!r} decrease at {dates[drops[0]]}"
                " (source correction retained as-is)",
                stacklevel=2,
            )
        series.append(RegionSeries(region=country, dates=dates, cumulative=counts))
    return series


def serialize_jhu_deaths(series: list[RegionSeries]) -> str:
    """Canonical JHU-layout CSV: province/lat/long blank, M/D/YY dates."""
    if not series:
        return ",".join(_JHU_FIXED_COLUMNS) + "\r\n"
    dates = series[0].dates
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(
        list(_JHU_FIXED_COLUMNS) + [f"{d.month}/{d.day}/{d.year % 100:02d}" for d in dates]
    )
    for s in series:
        writer.writerow(["", s.region, "", ""] + [str(v) for v in s.cumulative])
    return out.getvalue()


def parse_continent_map(text) -> dict[str, str]:
    """Parse a ``country,continent`` CSV (header required) into a dict."""
    rows = list(_reader(text))
    if not rows or [h.strip() for h in rows[0]] != ["country", "continent"]:
        raise MalformedHeader("expected header 'country,continent'")
    mapping: dict[str, str] = {}
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise RaggedRow(f"row {i} has {len(row)} fields, expected 2")
        mapping[row[0].strip()] = row[1].strip()
    return mapping


def aggregate_regions(
    series: list[RegionSeries], continent_map: Mapping[str, str]
) -> list[RegionSeries]:
    """Sum country rows into continents plus a synthetic World total.

    Every country key must be mapped and all series must share one date
    axis. Continents come back sorted by name with World appended.
    """
    if not series:
        return []
    dates = series[0].dates
    totals: dict[str, np.ndarray] = {}
    world = np.zeros(len(dates), dtype=np.int64)
    for s in series:
        if s.dates != dates:
            raise MisalignedDates(
                f"series for {s.region!r} does not share the common date axis"
            )
        continent = continent_map.get(s.region)
        if continent is None:
            raise UnmappedCountry(f"no continent assigned for {s.region!r}")
        counts = np.asarray(s.cumulative, dtype=np.int64)
        totals.setdefault(continent, np.zeros(len(dates), dtype=np.int64))
        totals[continent] += counts
        world += counts
    out = [
        RegionSeries(region=name, dates=dates, cumulative=tuple(int(v) for v in totals[name]))
        for name in sorted(totals)
    ]
    out.append(
        RegionSeries(region="World", dates=dates, cumulative=tuple(int(v) for v in world))
    )
    return out


def truncate_series(
    series: RegionSeries, start_date: date, end_date: date | None = None
) -> TruncatedSeries:
    """Re-base a series at ``start_date``, absorbing earlier counts.

    The cumulative count on the day before the start becomes the
    baseline; day indices count from 1 at the start date. ``end_date``
    (inclusive) optionally shortens the window.
    """
    if start_date not in series.dates:
        raise DateOutOfRange(
            f"start date {start_date} is outside {series.dates[0]}..{series.dates[-1]}"
        )
    stop = end_date if end_date is not None else series.dates[-1]
    if stop not in series.dates or stop < start_date:
        raise DateOutOfRange(
            f"end date {stop} is outside {start_date}..{series.dates[-1]}"
        )
    i0 = series.dates.index(start_date)
    i1 = series.dates.index(stop)
    baseline = series.cumulative[i0 - 1] if i0 > 0 else 0
    window = series.cumulative[i0 : i1 + 1]
    return TruncatedSeries(
        start_date=start_date,
        baseline=baseline,
        t_index=tuple(range(1, len(window) + 1)),
        f_rel=tuple(v - baseline for v in window),
    )


def _split_tsv(text) -> list[list[str]]:
    raw = text if isinstance(text, str) else text.read()
    lines = raw.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line.rstrip("\r").split("\t") for line in lines]


def parse_abundance_table(text) -> AbundanceTable:
    """Parse a TSV abundance table: taxa across the top, samples as rows.

    The header may either list only the taxon identifiers or carry a
    leading corner label above the sample-id column; both layouts are
    accepted. Counts must be nonnegative integers.
    """
    rows = _split_tsv(text)
    if not rows or rows == [[""]]:
        raise MalformedHeader("empty input")
    header = rows[0]
    body = rows[1:]
    if not body:
        raise MalformedHeader("no sample rows present")

    if all(len(r) == len(header) + 1 for r in body):
        taxa = header  # header lists taxa only
    else:
        taxa = header[1:]  # leading corner label above the sample ids
    if not taxa or any(t.strip() == "" for t in taxa):
        raise MalformedHeader("empty taxon column header")
    if len(set(taxa)) != len(taxa):
        raise MalformedHeader("duplicate taxon identifiers in header")

    sample_ids: list[str] = []
    counts = np.zeros((len(body), len(taxa)), dtype=np.int64)
    for i, row in enumerate(body):
        if len(row) != len(taxa) + 1:
            raise RaggedRow(
                f"row {i + 2} has {len(row)} fields, expected {len(taxa) + 1}"
            )
        sid = row[0].strip()
        if sid in sample_ids:
            raise DuplicateSampleId(f"sample id {sid!r} appears more than once")
        sample_ids.append(sid)
        for j, cell in enumerate(row[1:]):
            counts[i, j] = _parse_count(cell, i + 2, taxa[j])
    return AbundanceTable(
        sample_ids=tuple(sample_ids), taxon_ids=tuple(taxa), counts=counts
    )


def serialize_abundance_table(table: AbundanceTable) -> str:
    """Canonical TSV form: corner label, then taxa; one sample per row."""
    lines = ["\t".join(("sample_id",) + table.taxon_ids)]
    for i, sid in enumerate(table.sample_ids):
        lines.append("\t".join([sid] + [str(int(v)) for v in table.counts[i]]))
    return "\n".join(lines) + "\n"
