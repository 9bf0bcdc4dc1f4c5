"""Recipes: declarative pipelines turning stored snapshots into cubes.

A recipe is data, not code, so it can live in the catalog document and
be reviewed like any other content change.  Evaluation is pure: the same
recipe over the same snapshot versions always produces the same cube,
and every result carries the (source, version) pairs it was built from.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence, Union

from .cube import Category, CubeError, DataCube, Dimension, combine, cube_arith


class DerivationError(Exception):
    pass


class MissingSourceError(DerivationError):
    def __init__(self, source_id: str):
        super().__init__(f"no snapshot exists for source '{source_id}'")
        self.source_id = source_id


class RecipeError(DerivationError):
    def __init__(self, recipe_id: str, step_index: int, message: str):
        super().__init__(f"recipe '{recipe_id}' step {step_index}: {message}")
        self.recipe_id = recipe_id
        self.step_index = step_index


@dataclass(frozen=True)
class LoadStep:
    source_id: str
    out: str


@dataclass(frozen=True)
class SliceStep:
    source: str
    keep: Mapping[str, tuple[str, ...]]
    out: str


@dataclass(frozen=True)
class AggregateStep:
    source: str
    dim: str
    grouping: Mapping[str, tuple[str, ...]]
    out: str


@dataclass(frozen=True)
class CombineStep:
    sources: tuple[str, ...]
    dimension: Dimension
    out: str


@dataclass(frozen=True)
class ArithStep:
    left: str
    right: str
    op: str
    out: str


@dataclass(frozen=True)
class OutputStep:
    source: str


Step = Union[LoadStep, SliceStep, AggregateStep, CombineStep, ArithStep, OutputStep]


@dataclass(frozen=True)
class Recipe:
    """An ordered, linear pipeline ending in a single Output step."""

    recipe_id: str
    steps: tuple[Step, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise DerivationError(f"recipe '{self.recipe_id}' has no steps")
        if not isinstance(self.steps[0], LoadStep):
            raise DerivationError(f"recipe '{self.recipe_id}' must start with a load step")
        outputs = [s for s in self.steps if isinstance(s, OutputStep)]
        if len(outputs) != 1 or not isinstance(self.steps[-1], OutputStep):
            raise DerivationError(
                f"recipe '{self.recipe_id}' needs exactly one output step, at the end"
            )
        bound: set[str] = set()
        for i, step in enumerate(self.steps):
            for consumed in _consumed(step):
                if consumed not in bound:
                    raise RecipeError(
                        self.recipe_id, i, f"binding '{consumed}' is not defined yet"
                    )
            produced = getattr(step, "out", None)
            if produced is not None:
                if produced in bound:
                    raise RecipeError(self.recipe_id, i, f"binding '{produced}' is rebound")
                bound.add(produced)

    @property
    def load_sources(self) -> tuple[str, ...]:
        return tuple(s.source_id for s in self.steps if isinstance(s, LoadStep))


def _consumed(step: Step) -> tuple[str, ...]:
    if isinstance(step, LoadStep):
        return ()
    if isinstance(step, SliceStep):
        return (step.source,)
    if isinstance(step, AggregateStep):
        return (step.source,)
    if isinstance(step, CombineStep):
        return step.sources
    if isinstance(step, ArithStep):
        return (step.left, step.right)
    return (step.source,)


SourceVersion = tuple[str, int]


@dataclass(frozen=True)
class Evaluation:
    """A derived cube plus the snapshot versions it was computed from."""

    cube: DataCube
    provenance: tuple[SourceVersion, ...]


class SnapshotView(Protocol):
    def latest(self, source_id: str): ...


def evaluate(recipe: Recipe, store: SnapshotView) -> Evaluation:
    """Run a recipe against the latest snapshots in the store."""
    bindings: dict[str, DataCube] = {}
    provenance: dict[str, int] = {}
    result: DataCube | None = None
    for i, step in enumerate(recipe.steps):
        try:
            if isinstance(step, LoadStep):
                snapshot = store.latest(step.source_id)
                if snapshot is None:
                    raise MissingSourceError(step.source_id)
                bindings[step.out] = snapshot.cube
                provenance[step.source_id] = snapshot.version
            elif isinstance(step, SliceStep):
                bindings[step.out] = bindings[step.source].slice(step.keep)
            elif isinstance(step, AggregateStep):
                bindings[step.out] = bindings[step.source].aggregate(step.dim, step.grouping)
            elif isinstance(step, CombineStep):
                bindings[step.out] = combine(
                    [bindings[name] for name in step.sources], step.dimension
                )
            elif isinstance(step, ArithStep):
                bindings[step.out] = cube_arith(
                    bindings[step.left], bindings[step.right], step.op
                )
            else:
                result = bindings[step.source]
        except MissingSourceError:
            raise
        except CubeError as exc:
            raise RecipeError(recipe.recipe_id, i, str(exc)) from exc
    assert result is not None  # guaranteed by recipe validation
    return Evaluation(result, tuple(sorted(provenance.items())))


def net_change(series: DataCube, window: tuple[str, str]) -> float:
    """Difference between the series values at the window's end and start."""
    if series.rank != 1:
        raise DerivationError(f"net change needs a 1-dimensional series, got rank {series.rank}")
    start, end = window
    start_value = series.value_at((start,))
    end_value = series.value_at((end,))
    if start_value is None or end_value is None:
        missing = start if start_value is None else end
        raise DerivationError(f"series value at period '{missing}' is missing")
    return end_value - start_value


@dataclass(frozen=True)
class IndicatorResult:
    indicator: str
    variable: int
    window: tuple[str, str]
    value: float | None = None
    provenance: tuple[SourceVersion, ...] = ()
    error: str | None = None


def growth_indicators(
    store: SnapshotView,
    window: tuple[str, str],
    indicator_recipes: Sequence[tuple[str, int, Recipe]],
) -> list[IndicatorResult]:
    """Net change per growth target; one failing indicator never hides the rest."""
    if not window or len(window) != 2 or not window[0] or not window[1]:
        raise ValueError("window must be a (start, end) period pair")
    results = []
    for indicator, variable, recipe in indicator_recipes:
        try:
            evaluation = evaluate(recipe, store)
            value = net_change(evaluation.cube, window)
        except (DerivationError, CubeError) as exc:
            results.append(
                IndicatorResult(indicator, variable, window, error=str(exc))
            )
            continue
        results.append(
            IndicatorResult(indicator, variable, window, value, evaluation.provenance)
        )
    return results


# -- document serialization ---------------------------------------------------
#
# Recipes are embedded in the catalog document; these converters define
# that format.


def step_from_dict(spec: Mapping) -> Step:
    op = spec.get("op")
    if op == "load":
        return LoadStep(spec["source"], spec["as"])
    if op == "slice":
        keep = {dim: tuple(cats) for dim, cats in spec["keep"].items()}
        return SliceStep(spec["from"], keep, spec["as"])
    if op == "aggregate":
        grouping = {new: tuple(olds) for new, olds in spec["groups"].items()}
        return AggregateStep(spec["from"], spec["dim"], grouping, spec["as"])
    if op == "combine":
        d = spec["dimension"]
        dimension = Dimension(
            d["id"],
            d.get("label", d["id"]),
            tuple(Category(c[0], c[1]) for c in d["categories"]),
            d.get("role"),
        )
        return CombineStep(tuple(spec["from"]), dimension, spec["as"])
    if op == "arith":
        return ArithStep(spec["left"], spec["right"], spec["operator"], spec["as"])
    if op == "output":
        return OutputStep(spec["from"])
    raise DerivationError(f"unknown recipe step op {op!r}")


def step_to_dict(step: Step) -> dict:
    if isinstance(step, LoadStep):
        return {"op": "load", "source": step.source_id, "as": step.out}
    if isinstance(step, SliceStep):
        return {
            "op": "slice",
            "from": step.source,
            "keep": {dim: list(cats) for dim, cats in step.keep.items()},
            "as": step.out,
        }
    if isinstance(step, AggregateStep):
        return {
            "op": "aggregate",
            "from": step.source,
            "dim": step.dim,
            "groups": {new: list(olds) for new, olds in step.grouping.items()},
            "as": step.out,
        }
    if isinstance(step, CombineStep):
        return {
            "op": "combine",
            "from": list(step.sources),
            "dimension": {
                "id": step.dimension.id,
                "label": step.dimension.label,
                "categories": [[c.id, c.label] for c in step.dimension.categories],
            },
            "as": step.out,
        }
    if isinstance(step, ArithStep):
        return {
            "op": "arith",
            "left": step.left,
            "right": step.right,
            "operator": step.op,
            "as": step.out,
        }
    return {"op": "output", "from": step.source}


def recipe_from_dict(spec: Mapping) -> Recipe:
    return Recipe(spec["id"], tuple(step_from_dict(s) for s in spec["steps"]))


def recipe_to_dict(recipe: Recipe) -> dict:
    return {"id": recipe.recipe_id, "steps": [step_to_dict(s) for s in recipe.steps]}
