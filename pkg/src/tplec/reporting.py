"""Report-row assembly and serialization for the CLI commands.

One fixed column set per table so downstream comparisons are mechanical:

* main report: ``unit,c,w,d,r_squared,t_max,date_max,f_max,observed,
  completion_pct,lower_95,upper_95,fallback_used``
* power-law fallback rows (one per unit and horizon): ``unit,z,ln_c,r,
  p_value,start_date,horizon_date,predicted,lower_95,upper_95``
* curve files: ``t,date,predicted,lower,upper,observed``

The ``obj`` format is a single JSON document embedding, per unit, both
fits and everything needed to redraw curves (baseline, n, start date,
observed values).
"""

from __future__ import annotations

import json
import math
from datetime import date
from typing import Mapping, Sequence

from .coupling import (
    ConfidenceBand,
    CoupledPrediction,
    confidence_band,
    day_index_to_date,
)
from .plec import PlecModel, plec_eval
from .regression import PlFit, TplFit

REPORT_COLUMNS = [
    "unit",
    "c",
    "w",
    "d",
    "r_squared",
    "t_max",
    "date_max",
    "f_max",
    "observed",
    "completion_pct",
    "lower_95",
    "upper_95",
    "fallback_used",
]

FALLBACK_COLUMNS = [
    "unit",
    "z",
    "ln_c",
    "r",
    "p_value",
    "start_date",
    "horizon_date",
    "predicted",
    "lower_95",
    "upper_95",
]

CURVE_COLUMNS = ["t", "date", "predicted", "lower", "upper", "observed"]


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, date):
        return value.isoformat()
    return str(value)


def rows_to_dsv(columns: Sequence[str], rows: Sequence[Mapping]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(format_cell(row.get(col)) for col in columns))
    return "\n".join(lines) + "\n"


def report_row(unit: str, result: CoupledPrediction, observed: float) -> dict:
    """Flatten one coupled prediction into the main report schema."""
    row = {col: None for col in REPORT_COLUMNS}
    row["unit"] = unit
    row["observed"] = observed
    row["fallback_used"] = result.fallback_used
    if result.fallback_used:
        if isinstance(result.model, PlFit):
            row["w"] = result.model.exponent
            row["c"] = math.exp(result.model.ln_c)
            row["r_squared"] = result.model.r ** 2
        return row
    model = result.model
    row["c"] = model.c
    row["w"] = model.w
    row["d"] = model.d
    row["r_squared"] = result.diagnostics.r_squared
    row["t_max"] = result.asymptote.x_max
    row["date_max"] = result.calendar_date_of_max
    row["f_max"] = result.band.point
    row["lower_95"] = result.band.lower
    row["upper_95"] = result.band.upper
    if result.completion_pct is not None:
        row["completion_pct"] = f"{result.completion_pct:.1f}"
    return row


def fallback_rows(unit: str, result: CoupledPrediction) -> list[dict]:
    """Per-horizon power-law predictions for one fallback unit."""
    pl = result.model
    rows = []
    for t, band in result.horizon_bands:
        when = (
            day_index_to_date(pl.start_date, t) if pl.start_date is not None else None
        )
        rows.append(
            {
                "unit": unit,
                "z": pl.exponent,
                "ln_c": pl.ln_c,
                "r": pl.r,
                "p_value": pl.p_value,
                "start_date": pl.start_date,
                "horizon_date": when,
                "predicted": band.point,
                "lower_95": band.lower,
                "upper_95": band.upper,
            }
        )
    return rows


def curve_rows(
    model: PlecModel | PlFit,
    tpl: TplFit | None,
    baseline: float,
    n: int,
    horizon: int,
    start_date: date | None = None,
    observed: Mapping[int, float] | None = None,
) -> list[dict]:
    """Plot-ready rows t = 1..horizon with the 95% band at each point.

    ``observed`` maps day indices to measured values; rows beyond the
    data are left blank. Bands are evaluated at the baseline-inclusive
    prediction; without a scaling-law fit they stay blank.
    """
    observed = observed or {}
    rows = []
    for t in range(1, horizon + 1):
        if isinstance(model, PlFit):
            predicted = baseline + model.predict(t)
        else:
            predicted = baseline + plec_eval(model, float(t))
        band: ConfidenceBand | None = None
        if tpl is not None:
            band = confidence_band(predicted, tpl, n)
        rows.append(
            {
                "t": t,
                "date": day_index_to_date(start_date, t) if start_date else None,
                "predicted": predicted,
                "lower": band.lower if band else None,
                "upper": band.upper if band else None,
                "observed": observed.get(t),
            }
        )
    return rows


def _jsonable(value):
    if isinstance(value, date):
        return value.isoformat()
    return value


def _model_payload(result: CoupledPrediction) -> dict:
    if result.fallback_used:
        pl = result.model
        return {
            "kind": "pl",
            "ln_c": pl.ln_c,
            "z": pl.exponent,
            "r": pl.r,
            "p_value": pl.p_value,
            "start_date": _jsonable(pl.start_date),
        }
    model = result.model
    return {"kind": "plec", "c": model.c, "w": model.w, "d": model.d}


def unit_payload(
    unit: str,
    result: CoupledPrediction,
    observed: float,
    start_date: date | None = None,
    observed_series: Sequence[float] | None = None,
) -> dict:
    """Full machine-readable record for one unit (obj format)."""
    payload = {
        "unit": unit,
        "fallback_used": result.fallback_used,
        "model": _model_payload(result),
        "tpl": {
            "ln_a": result.tpl.ln_a,
            "b": result.tpl.b,
            "r_squared": result.tpl.r_squared,
            "n_pairs": result.tpl.n_pairs,
        },
        "baseline": result.baseline,
        "n": result.n,
        "start_date": _jsonable(start_date),
        "observed_latest": observed,
        "observed_series": list(observed_series) if observed_series else None,
    }
    if result.diagnostics is not None:
        payload["diagnostics"] = {
            "converged": result.diagnostics.converged,
            "iterations": result.diagnostics.iterations,
            "sum_squared_residuals": result.diagnostics.sum_squared_residuals,
            "r_squared": result.diagnostics.r_squared,
            "constraint_active": result.diagnostics.constraint_active,
        }
    if result.asymptote is not None:
        payload["asymptote"] = {
            "x_max": result.asymptote.x_max,
            "y_max": result.asymptote.y_max,
            "date_of_max": _jsonable(result.calendar_date_of_max),
        }
        payload["band"] = {
            "point": result.band.point,
            "lower": result.band.lower,
            "upper": result.band.upper,
            "n": result.band.n,
            "variance": result.band.variance,
        }
        payload["completion_pct"] = result.completion_pct
    if result.horizon_bands:
        payload["horizon_bands"] = [
            {
                "t": t,
                "point": band.point,
                "lower": band.lower,
                "upper": band.upper,
                "n": band.n,
                "variance": band.variance,
            }
            for t, band in result.horizon_bands
        ]
    return payload


def to_json(document: dict) -> str:
    return json.dumps(document, indent=2, sort_keys=False) + "\n"
