#!/usr/bin/env python3
"""Regenerate the shared percent-toggle conformance fixtures.

The file pins how plotted shares react to legend toggles, so the server
library and the browser client can be checked against the same expected
numbers.  Run from the repository root:

    python3 scripts/gen_conformance.py
"""

from __future__ import annotations

import json
from pathlib import Path

from barometer.catalog import VariableEntry
from barometer.charts import ChartKind, build_chart, toggle_series
from barometer.cube import Category, DataCube, Dimension

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "conformance" / "percent_toggle.json"


def cube_of(x_ids, series_ids, rows):
    # rows[series][x]; cube stores series as the second dimension
    dims = (
        Dimension("x", "X", tuple(Category(i, i) for i in x_ids)),
        Dimension("s", "S", tuple(Category(i, i) for i in series_ids)),
    )
    values = []
    for xi in range(len(x_ids)):
        for si in range(len(series_ids)):
            values.append(rows[si][xi])
    return DataCube(dims, tuple(values))


def entry():
    return VariableEntry(
        number=990,
        title="Conformance case",
        description="",
        group="goals",
        category="population",
        default_chart=ChartKind.STACKED_PERCENT_COLUMN,
    )


CASES = [
    {
        "name": "regional-age-mix",
        "x": ["ringerike", "hole", "jevnaker"],
        "series": ["0-17", "18-34", "35-66", "67+"],
        "rows": [
            [8600, 1540, 1500],
            [9900, 1510, 1480],
            [19400, 2930, 2900],
            [5100, 820, 940],
        ],
        "toggles": ["35-66", "0-17", "35-66"],
    },
    {
        "name": "two-equal-series",
        "x": ["a", "b"],
        "series": ["s1", "s2"],
        "rows": [[10, 30], [10, 30]],
        "toggles": ["s2", "s2"],
    },
    {
        "name": "twenty-thirty-fifty",
        "x": ["only"],
        "series": ["a", "b", "c"],
        "rows": [[20], [30], [50]],
        "toggles": ["c"],
    },
    {
        "name": "missing-cells",
        "x": ["a", "b", "c"],
        "series": ["s1", "s2"],
        "rows": [[10, None, 5], [30, 20, None]],
        "toggles": ["s1", "s1"],
    },
    {
        "name": "zero-column",
        "x": ["a", "b"],
        "series": ["s1", "s2"],
        "rows": [[0, 10], [0, 30]],
        "toggles": ["s2"],
    },
]


def snapshot(spec):
    return {
        "visible": [s.visible for s in spec.series],
        "percents": [
            [t.percent for t in s.tooltips] for s in spec.series
        ],
        "degenerate": list(spec.degenerate_columns),
    }


def main() -> None:
    cases = []
    for case in CASES:
        cube = cube_of(case["x"], case["series"], case["rows"])
        spec = build_chart(
            cube, entry(), ChartKind.STACKED_PERCENT_COLUMN, "x", "s"
        )
        steps = [dict(toggle=None, **snapshot(spec))]
        for name in case["toggles"]:
            spec = toggle_series(spec, name)
            steps.append(dict(toggle=name, **snapshot(spec)))
        cases.append(
            {
                "name": case["name"],
                "kind": "stacked_percent_column",
                "x_categories": case["x"],
                "series": [
                    {"name": name, "values": row}
                    for name, row in zip(case["series"], case["rows"])
                ],
                "steps": steps,
            }
        )
    OUT.parent.mkdir(exist_ok=True)
    OUT.write_text(json.dumps({"cases": cases}, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({len(cases)} cases)")


if __name__ == "__main__":
    main()
