"""CSV and JSON serialization of curves, tables and simulation sweeps."""

from __future__ import annotations

import csv
import io
import json
import math

CURVE_COLUMNS = ("case", "m", "n", "k", "r", "d")
TABLE_COLUMNS = ("case", "duplex", "characteristic", "m", "n", "k", "r", "d")
SIMULATE_COLUMNS = (
    "protocol", "m", "n", "k", "r", "snr_db", "trials", "outages",
    "p_out", "ci_low", "ci_high", "mean_power_ratio",
)

# Marker values in the snr_db column of the summary rows appended to a sweep.
FIT_ROW = "fit"
REFERENCE_ROW = "reference"

FIGURE1_MANIFEST_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "m", "n", "k", "csv", "columns", "curves", "unbounded"],
    "properties": {
        "schema": {"const": "dmtlab.figure1/1"},
        "m": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "k": {"type": "integer", "minimum": 2},
        "csv": {"type": "string"},
        "columns": {"type": "array", "items": {"type": "string"}},
        "curves": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["case", "k", "characteristic", "rows"],
                "properties": {
                    "case": {"type": "string"},
                    "k": {"type": ["integer", "null"]},
                    "characteristic": {"type": "string"},
                    "rows": {"type": "integer", "minimum": 2},
                },
            },
        },
        "unbounded": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["case", "characteristic", "d"],
                "properties": {
                    "case": {"type": "string"},
                    "characteristic": {"type": "string"},
                    "d": {"const": "inf"},
                },
            },
        },
    },
}


def format_number(value) -> str:
    """Shortest round-tripping text; integers lose their '.0'; infinity is 'inf'."""
    if value is None:
        return ""
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    value = float(value)
    if math.isinf(value) and value > 0:
        return "inf"
    text = repr(value)
    return text[:-2] if text.endswith(".0") else text


def parse_number(text: str) -> float:
    return math.inf if text.strip() == "inf" else float(text)


def render_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(row[c]) if not isinstance(row[c], str) else row[c] for c in columns])
    return buf.getvalue()


def json_value(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def render_json(document) -> str:
    def convert(obj):
        if isinstance(obj, dict):
            return {k: convert(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [convert(v) for v in obj]
        return json_value(obj)

    return json.dumps(convert(document), indent=2) + "\n"


def read_csv_rows(text: str, required) -> list[dict]:
    """Parse CSV text, insisting on the ``required`` header columns."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or any(c not in reader.fieldnames for c in required):
        raise ValueError(f"CSV header must contain columns {list(required)}, got {reader.fieldnames}")
    rows = list(reader)
    for i, row in enumerate(rows, start=2):
        if None in row or any(v is None for v in row.values()):
            raise ValueError(f"line {i}: wrong number of fields")
    return rows
