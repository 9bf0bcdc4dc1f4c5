from __future__ import annotations

import json
from datetime import datetime, timezone

import pytest

import oracles
from conftest import cube_from_spec, make_cube
from barometer.cube import Category, Dimension
from barometer.derive import (
    ArithStep,
    CombineStep,
    DerivationError,
    LoadStep,
    MissingSourceError,
    OutputStep,
    Recipe,
    RecipeError,
    SliceStep,
    AggregateStep,
    evaluate,
    growth_indicators,
    net_change,
    recipe_from_dict,
    recipe_to_dict,
)
from barometer.ingest import SnapshotStore, content_hash

T0 = datetime(2026, 1, 1, tzinfo=timezone.utc)


class FakeStore:
    """Minimal snapshot view: source id -> (cube, version)."""

    def __init__(self, cubes):
        self.cubes = cubes

    def latest(self, source_id):
        if source_id not in self.cubes:
            return None
        cube, version = self.cubes[source_id]
        return type("Snap", (), {"cube": cube, "version": version})()


def year_cube(values, start=2008):
    years = [str(start + i) for i in range(len(values))]
    return make_cube([("year", years)], values)


class TestRecipeValidation:
    def test_must_start_with_load(self):
        with pytest.raises(DerivationError):
            Recipe("r", (OutputStep("x"),))

    def test_exactly_one_output_at_end(self):
        with pytest.raises(DerivationError):
            Recipe("r", (LoadStep("s", "a"),))
        with pytest.raises(DerivationError):
            Recipe("r", (LoadStep("s", "a"), OutputStep("a"), OutputStep("a")))

    def test_undefined_binding_reports_step_index(self):
        with pytest.raises(RecipeError) as err:
            Recipe(
                "r",
                (
                    LoadStep("s", "a"),
                    ArithStep("a", "ghost", "add", "b"),
                    OutputStep("b"),
                ),
            )
        assert err.value.step_index == 1

    def test_rebinding_rejected(self):
        with pytest.raises(RecipeError):
            Recipe(
                "r",
                (LoadStep("s", "a"), LoadStep("t", "a"), OutputStep("a")),
            )


class TestEvaluate:
    def test_load_output_identity(self):
        cube = year_cube([1, 2, 3])
        store = FakeStore({"pop": (cube, 4)})
        result = evaluate(Recipe("id", (LoadStep("pop", "a"), OutputStep("a"))), store)
        assert result.cube == cube
        assert result.provenance == (("pop", 4),)

    def test_missing_source(self):
        store = FakeStore({})
        with pytest.raises(MissingSourceError) as err:
            evaluate(Recipe("id", (LoadStep("pop", "a"), OutputStep("a"))), store)
        assert err.value.source_id == "pop"

    def test_step_error_carries_index(self):
        cube = year_cube([1, 2, 3])
        store = FakeStore({"pop": (cube, 1)})
        recipe = Recipe(
            "r",
            (
                LoadStep("pop", "a"),
                SliceStep("a", {"year": ("1900",)}, "b"),
                OutputStep("b"),
            ),
        )
        with pytest.raises(RecipeError) as err:
            evaluate(recipe, store)
        assert err.value.step_index == 1

    def test_future_growth_composition_matches_step_oracles(self):
        projection = year_cube([43100, 43250, 43400], start=2019)
        political = year_cube([43200, 43500, 43800], start=2019)
        capacity = year_cube([43000, 43300, 43700], start=2019)
        store = FakeStore(
            {"proj": (projection, 2), "pol": (political, 1), "cap": (capacity, 7)}
        )
        assumption = Dimension(
            "assumption",
            "Assumption",
            (
                Category("ssb", "Statistics office projection"),
                Category("political", "Political ambition"),
                Category("capacity", "Housing capacity"),
                Category("balance", "Housing balance"),
            ),
        )
        recipe = Recipe(
            "future-growth",
            (
                LoadStep("proj", "proj"),
                LoadStep("pol", "pol"),
                LoadStep("cap", "cap"),
                ArithStep("cap", "proj", "sub", "balance"),
                CombineStep(("proj", "pol", "cap", "balance"), assumption, "all"),
                OutputStep("all"),
            ),
        )
        result = evaluate(recipe, store)
        assert result.cube.shape == (4, 3)
        assert result.provenance == (("cap", 7), ("pol", 1), ("proj", 2))
        balance_expected = oracles.arith_values(
            list(capacity.values), list(projection.values), "sub"
        )
        expected = oracles.combine_values(
            [
                list(projection.values),
                list(political.values),
                list(capacity.values),
                balance_expected,
            ]
        )
        assert list(result.cube.values) == expected

    def test_referentially_transparent(self):
        store = FakeStore({"pop": (year_cube([1, 2, 3]), 1)})
        recipe = Recipe("id", (LoadStep("pop", "a"), OutputStep("a")))
        assert evaluate(recipe, store) == evaluate(recipe, store)

    def test_aggregate_step_matches_oracle(self):
        lists = [["a", "b", "c", "d"]]
        values = [10.0, 20.0, 30.0, 40.0]
        cube = cube_from_spec(lists, values, ["age"])
        store = FakeStore({"src": (cube, 1)})
        recipe = Recipe(
            "agg",
            (
                LoadStep("src", "x"),
                AggregateStep("x", "age", {"ab": ("a", "b"), "cd": ("c", "d")}, "y"),
                OutputStep("y"),
            ),
        )
        result = evaluate(recipe, store)
        expected = oracles.aggregate_values(
            lists, values, 0, [("ab", ["a", "b"]), ("cd", ["c", "d"])]
        )
        assert list(result.cube.values) == expected


class TestNetChange:
    def test_employment_window(self):
        series = year_cube([13980, 14000, 13950, 14010, 14050, 14020, 14080, 14100, 14090, 14110, 14125])
        assert net_change(series, ("2008", "2018")) == 145.0

    def test_jobs_window(self):
        series = year_cube([13650, 13600, 13580, 13540, 13500, 13480, 13450, 13420, 13390, 13350, 13329])
        assert net_change(series, ("2008", "2018")) == -321.0

    def test_degenerate_window_is_zero(self):
        series = year_cube([5, 6, 7])
        assert net_change(series, ("2009", "2009")) == 0.0

    def test_out_of_range_period(self):
        with pytest.raises(Exception, match="1900"):
            net_change(year_cube([1, 2]), ("1900", "2009"))

    def test_missing_endpoint(self):
        with pytest.raises(DerivationError, match="2008"):
            net_change(year_cube([None, 2, 3]), ("2008", "2010"))

    def test_additive_over_subwindows(self, rng):
        values = [rng.uniform(0, 100) for _ in range(10)]
        series = year_cube(values)
        periods = [str(2008 + i) for i in range(10)]
        for _ in range(25):
            a, b, c = sorted(rng.sample(range(10), 3))
            total = net_change(series, (periods[a], periods[c]))
            parts = net_change(series, (periods[a], periods[b])) + net_change(
                series, (periods[b], periods[c])
            )
            assert abs(total - parts) < 1e-9

    def test_requires_one_dimension(self):
        cube = make_cube([("a", ["1"]), ("b", ["1", "2"])], [1, 2])
        with pytest.raises(DerivationError):
            net_change(cube, ("1", "2"))


class TestGrowthIndicators:
    def _store(self, **overrides):
        series = {
            "population": year_cube([42000 + 100 * i for i in range(11)]),
            "employment": year_cube([13980] + [14000 + i for i in range(9)] + [14125]),
            "jobs": year_cube([13650 - 30 * i for i in range(10)] + [13329]),
            "value_creation": year_cube([18500 + 290 * i for i in range(11)]),
        }
        series.update(overrides)
        return FakeStore({k: (v, 1) for k, v in series.items() if v is not None})

    def _recipes(self):
        return [
            (name, number, Recipe(name, (LoadStep(name, "x"), OutputStep("x"))))
            for name, number in [
                ("population", 1),
                ("value_creation", 7),
                ("employment", 12),
                ("jobs", 18),
            ]
        ]

    def test_full_fixture_values(self):
        results = growth_indicators(self._store(), ("2008", "2018"), self._recipes())
        by_name = {r.indicator: r for r in results}
        assert by_name["employment"].value == 145.0
        assert by_name["jobs"].value == -321.0
        assert by_name["population"].value == 1000.0
        assert all(r.error is None for r in results)
        assert all(r.window == ("2008", "2018") for r in results)

    def test_missing_source_isolated(self):
        results = growth_indicators(
            self._store(employment=None), ("2008", "2018"), self._recipes()
        )
        by_name = {r.indicator: r for r in results}
        assert by_name["employment"].error is not None
        assert by_name["employment"].value is None
        assert by_name["jobs"].value == -321.0
        assert len([r for r in results if r.error is None]) == 3

    def test_empty_window_rejected(self):
        with pytest.raises(ValueError):
            growth_indicators(self._store(), (), self._recipes())


class TestRecipeSerialization:
    def test_round_trip(self):
        recipe = Recipe(
            "future-growth",
            (
                LoadStep("proj", "proj"),
                LoadStep("cap", "cap"),
                SliceStep("proj", {"year": ("2019", "2020")}, "sliced"),
                AggregateStep("sliced", "year", {"all": ("2019", "2020")}, "agg"),
                ArithStep("cap", "proj", "sub", "balance"),
                CombineStep(
                    ("balance", "agg"),
                    Dimension("v", "V", (Category("a", "A"), Category("b", "B"))),
                    "out",
                ),
                OutputStep("out"),
            ),
        )
        clone = recipe_from_dict(recipe_to_dict(recipe))
        assert clone == recipe

    def test_unknown_op_rejected(self):
        with pytest.raises(DerivationError):
            recipe_from_dict({"id": "x", "steps": [{"op": "teleport"}]})


def test_evaluate_with_real_snapshot_store():
    store = SnapshotStore()
    payload = json.dumps(
        {
            "class": "dataset",
            "id": ["year"],
            "size": [2],
            "dimension": {"year": {"category": {"index": ["2017", "2018"]}}},
            "value": [42920, 43000],
        }
    ).encode()
    from barometer.jsonstat import parse_jsonstat

    store.record("pop", payload, parse_jsonstat(payload), content_hash(payload), T0)
    result = evaluate(Recipe("r", (LoadStep("pop", "a"), OutputStep("a"))), store)
    assert result.provenance == (("pop", 1),)
    assert result.cube.value_at(("2018",)) == 43000.0
