from __future__ import annotations

import pytest

import oracles
from conftest import make_cube
from barometer.catalog import VariableEntry
from barometer.charts import (
    ChartError,
    ChartKind,
    alternative_kinds,
    build_chart,
    drilldown_target,
    spec_from_dict,
    spec_to_dict,
    toggle_series,
)


def entry_25(**overrides):
    fields = dict(
        number=25,
        title="Age-wise population",
        description="Population split into age groups per region.",
        group="goals",
        category="population",
        default_chart=ChartKind.STACKED_PERCENT_COLUMN,
        alternative_charts=(ChartKind.COLUMN, ChartKind.COLUMN_DRILLDOWN, ChartKind.LINE),
        x_dim="region",
        series_dim="age",
        unit="persons",
    )
    fields.update(overrides)
    return VariableEntry(**fields)


@pytest.fixture
def fig4_spec(region_age_cube):
    return build_chart(
        region_age_cube,
        entry_25(),
        ChartKind.STACKED_PERCENT_COLUMN,
        "region",
        "age",
        provenance=(("population_by_age", 1),),
    )


class TestBuildChart:
    def test_stacked_percent_shape(self, fig4_spec, region_age_cube):
        assert fig4_spec.kind is ChartKind.STACKED_PERCENT_COLUMN
        assert fig4_spec.x_categories == ("ringerike", "hole", "jevnaker")
        assert len(fig4_spec.series) == 4
        assert all(s.visible for s in fig4_spec.series)
        assert fig4_spec.variable == 25
        assert fig4_spec.provenance == (("population_by_age", 1),)

    def test_tooltip_percent_and_absolute(self, fig4_spec):
        # ringerike total is 43000; the 67+ group holds 5100 of it
        series = fig4_spec.series_named("67+")
        tooltip = series.tooltips[0]
        assert tooltip.absolute == 5100.0
        assert tooltip.percent == pytest.approx(5100 / 43000 * 100, abs=1e-9)

    def test_all_tooltip_absolutes_match_cube_cells(self, fig4_spec, region_age_cube):
        for series in fig4_spec.series:
            for x_index, region in enumerate(region_age_cube.dimension("region").category_ids):
                absolute = series.tooltips[x_index].absolute
                assert absolute == region_age_cube.value_at((region, series.name))

    def test_percent_shares_sum_to_100(self, fig4_spec):
        for x_index in range(len(fig4_spec.x_categories)):
            total = sum(s.tooltips[x_index].percent for s in fig4_spec.series)
            assert total == pytest.approx(100.0, abs=1e-9)

    def test_pie_needs_single_series(self, region_age_cube):
        entry = entry_25(default_chart=ChartKind.PIE, alternative_charts=())
        with pytest.raises(ChartError, match="single series"):
            build_chart(region_age_cube, entry, ChartKind.PIE, "region", "age")

    def test_unsupported_kind_for_variable(self, region_age_cube):
        with pytest.raises(ChartError, match="does not offer"):
            build_chart(region_age_cube, entry_25(), ChartKind.PIE, "region", "age")

    def test_deterministic(self, region_age_cube):
        a = build_chart(region_age_cube, entry_25(), ChartKind.COLUMN, "region", "age")
        b = build_chart(region_age_cube, entry_25(), ChartKind.COLUMN, "region", "age")
        assert a == b

    def test_non_percent_kind_has_no_percent(self, region_age_cube):
        spec = build_chart(region_age_cube, entry_25(), ChartKind.COLUMN, "region", "age")
        assert all(t.percent is None for s in spec.series for t in s.tooltips)

    def test_pie_percentages(self):
        cube = make_cube([("age", ["a", "b", "c"])], [20, 30, 50])
        entry = entry_25(default_chart=ChartKind.PIE, alternative_charts=(), series_dim=None)
        spec = build_chart(cube, entry, ChartKind.PIE, "age")
        percents = [t.percent for t in spec.series[0].tooltips]
        assert percents == [pytest.approx(20.0), pytest.approx(30.0), pytest.approx(50.0)]

    def test_anonymous_series_named_after_variable(self):
        cube = make_cube([("year", ["2017", "2018"])], [1, 2])
        entry = entry_25(default_chart=ChartKind.LINE, alternative_charts=())
        spec = build_chart(cube, entry, ChartKind.LINE, "year")
        assert spec.series[0].name == "Age-wise population"

    def test_degenerate_all_zero_column_flagged(self):
        cube = make_cube(
            [("region", ["a", "b"]), ("age", ["x", "y"])], [0, 0, 10, 30]
        )
        entry = entry_25()
        spec = build_chart(cube, entry, ChartKind.STACKED_PERCENT_COLUMN, "region", "age")
        assert spec.degenerate_columns == ("a",)
        for series in spec.series:
            assert series.tooltips[0].percent == 0.0


class TestToggle:
    def test_hide_one_of_two_equal_series_gives_flat_100(self):
        cube = make_cube(
            [("region", ["a", "b"]), ("age", ["x", "y"])], [10, 10, 30, 30]
        )
        spec = build_chart(cube, entry_25(), ChartKind.STACKED_PERCENT_COLUMN, "region", "age")
        toggled = toggle_series(spec, "y")
        remaining = toggled.series_named("x")
        assert all(t.percent == pytest.approx(100.0) for t in remaining.tooltips)
        assert not toggled.series_named("y").visible

    def test_toggle_twice_restores_original(self, fig4_spec):
        assert toggle_series(toggle_series(fig4_spec, "0-17"), "0-17") == fig4_spec

    def test_hide_50_of_20_30_50(self):
        cube = make_cube(
            [("region", ["only"]), ("age", ["a", "b", "c"])], [20, 30, 50]
        )
        spec = build_chart(cube, entry_25(), ChartKind.STACKED_PERCENT_COLUMN, "region", "age")
        toggled = toggle_series(spec, "c")
        expected = oracles.visible_shares([[20, 30]])[0]
        assert toggled.series_named("a").tooltips[0].percent == pytest.approx(expected[0])
        assert toggled.series_named("b").tooltips[0].percent == pytest.approx(expected[1])
        assert expected == [pytest.approx(40.0), pytest.approx(60.0)]

    def test_absolutes_and_structure_unchanged(self, fig4_spec):
        toggled = toggle_series(fig4_spec, "18-34")
        assert toggled.x_categories == fig4_spec.x_categories
        assert [s.name for s in toggled.series] == [s.name for s in fig4_spec.series]
        for before, after in zip(fig4_spec.series, toggled.series):
            assert before.values == after.values
            assert [t.absolute for t in before.tooltips] == [
                t.absolute for t in after.tooltips
            ]

    def test_unknown_series_rejected(self, fig4_spec):
        with pytest.raises(ChartError):
            toggle_series(fig4_spec, "no-such-series")

    def test_visible_shares_still_sum_to_100(self, fig4_spec):
        toggled = toggle_series(fig4_spec, "35-66")
        for x_index in range(len(toggled.x_categories)):
            total = sum(
                s.tooltips[x_index].percent for s in toggled.series if s.visible
            )
            assert total == pytest.approx(100.0, abs=1e-9)


class TestDrilldown:
    def test_routes_built_for_drilldown_kind(self, region_age_cube):
        spec = build_chart(
            region_age_cube, entry_25(), ChartKind.COLUMN_DRILLDOWN, "region", "age"
        )
        route = drilldown_target(spec, "ringerike")
        assert route.variable == 25
        assert route.filter == {"region": "ringerike"}

    def test_no_drilldown_for_other_kinds(self, fig4_spec):
        assert fig4_spec.drilldown is None
        with pytest.raises(ChartError):
            drilldown_target(fig4_spec, "ringerike")

    def test_unknown_category(self, region_age_cube):
        spec = build_chart(
            region_age_cube, entry_25(), ChartKind.COLUMN_DRILLDOWN, "region", "age"
        )
        with pytest.raises(ChartError):
            drilldown_target(spec, "oslo")

    def test_custom_target_variable(self, region_age_cube):
        entry = entry_25(drilldown_variable=56)
        spec = build_chart(
            region_age_cube, entry, ChartKind.COLUMN_DRILLDOWN, "region", "age"
        )
        assert drilldown_target(spec, "hole").variable == 56


class TestAlternativeKinds:
    def test_default_first_then_alternatives(self):
        entry = entry_25(
            default_chart=ChartKind.LINE,
            alternative_charts=(ChartKind.COLUMN, ChartKind.PIE),
        )
        assert alternative_kinds(entry) == (ChartKind.LINE, ChartKind.COLUMN, ChartKind.PIE)

    def test_no_alternatives(self):
        entry = entry_25(default_chart=ChartKind.LINE, alternative_charts=())
        assert alternative_kinds(entry) == (ChartKind.LINE,)


class TestSerialization:
    def test_round_trip(self, fig4_spec):
        assert spec_from_dict(spec_to_dict(fig4_spec)) == fig4_spec

    def test_round_trip_with_drilldown(self, region_age_cube):
        spec = build_chart(
            region_age_cube, entry_25(), ChartKind.COLUMN_DRILLDOWN, "region", "age"
        )
        assert spec_from_dict(spec_to_dict(spec)) == spec

    def test_dict_field_order_stable(self, fig4_spec):
        assert list(spec_to_dict(fig4_spec)) == [
            "variable",
            "kind",
            "title",
            "unit",
            "x_label",
            "x_categories",
            "series",
            "drilldown",
            "degenerate_columns",
            "provenance",
        ]
