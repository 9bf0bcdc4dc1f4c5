"""The fixed information architecture and the numbered variable catalog.

Five top-level groups are hard-wired; each contains configurable
categories, and categories contain numbered statistic variables.
Numbers are assigned once, monotonically, and never reused, so a
published URL keeps meaning the same statistic forever.

The catalog is persisted as one human-editable YAML document (numbers
included, so a fixture document reproduces its numbering exactly).  The
document also embeds the variables' recipes, the growth-indicator
configuration and the survey publication plan.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, NamedTuple

import yaml

from .charts import ChartKind
from .derive import Recipe, recipe_from_dict, recipe_to_dict


class CatalogError(ValueError):
    pass


class UnknownVariableError(KeyError):
    def __init__(self, number: int):
        super().__init__(f"no variable numbered {number}")
        self.number = number


class DraftVariableError(UnknownVariableError):
    """The variable exists but is not published."""


@dataclass(frozen=True)
class Group:
    id: str
    label: str


# The closed set of top-level groups.
GROUPS: tuple[Group, ...] = (
    Group("goals", "Goals"),
    Group("premises", "Premises for growth"),
    Group("industries", "Industries"),
    Group("growth", "Growth"),
    Group("expectations", "Expectations"),
)
GROUP_IDS = tuple(g.id for g in GROUPS)

# Categories the goals group must always offer.
REQUIRED_GOALS_CATEGORIES = ("Population", "Value Creation", "Employment", "Jobs", "Welfare")


@dataclass(frozen=True)
class CategoryNode:
    id: str
    label: str
    group: str

    def __post_init__(self) -> None:
        if self.group not in GROUP_IDS:
            raise CatalogError(f"unknown group '{self.group}'")


class RelatedDocument(NamedTuple):
    label: str
    url: str


@dataclass(frozen=True)
class VariableEntry:
    number: int
    title: str
    description: str
    group: str
    category: str
    default_chart: ChartKind
    alternative_charts: tuple[ChartKind, ...] = ()
    related_documents: tuple[RelatedDocument, ...] = ()
    related_variables: tuple[int, ...] = ()
    recipe_id: str | None = None
    visibility: str = "published"
    unit: str | None = None
    x_dim: str | None = None
    series_dim: str | None = None
    drilldown_variable: int | None = None

    def __post_init__(self) -> None:
        if self.number < 1:
            raise CatalogError("variable numbers start at 1")
        if self.visibility not in ("published", "draft"):
            raise CatalogError(f"unknown visibility '{self.visibility}'")
        if self.default_chart in self.alternative_charts:
            raise CatalogError(
                f"variable {self.number}: default chart repeated in alternatives"
            )
        if len(set(self.alternative_charts)) != len(self.alternative_charts):
            raise CatalogError(f"variable {self.number}: duplicate alternative charts")

    @property
    def published(self) -> bool:
        return self.visibility == "published"


@dataclass(frozen=True)
class SurveyPublication:
    """Where survey aggregates are published and how they are aggregated."""

    source_id: str
    variable: int
    group_by: tuple[str, ...]
    measures: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class IndicatorConfig:
    window: tuple[str, str]
    variables: Mapping[str, int]  # indicator name -> variable number


class Catalog:
    """Groups, categories and numbered variables, with serialized writes."""

    def __init__(
        self,
        categories: Iterable[CategoryNode] = (),
        variables: Iterable[VariableEntry] = (),
        recipes: Iterable[Recipe] = (),
        survey: SurveyPublication | None = None,
        indicators: IndicatorConfig | None = None,
    ):
        self._lock = threading.Lock()
        self._categories: dict[str, list[CategoryNode]] = {g.id: [] for g in GROUPS}
        for node in categories:
            self.add_category(node)
        self._variables: dict[int, VariableEntry] = {}
        self._highest = 0
        for entry in variables:
            if entry.number in self._variables:
                raise CatalogError(f"variable number {entry.number} used twice")
            self._variables[entry.number] = entry
            self._highest = max(self._highest, entry.number)
        self.recipes: dict[str, Recipe] = {r.recipe_id: r for r in recipes}
        self.survey = survey
        self.indicators = indicators

    # -- categories ------------------------------------------------------

    def add_category(self, node: CategoryNode) -> None:
        existing = self._categories[node.group]
        if any(c.id == node.id for c in existing):
            raise CatalogError(f"category '{node.id}' already exists in '{node.group}'")
        existing.append(node)

    def category(self, group: str, category_id: str) -> CategoryNode:
        if group not in GROUP_IDS:
            raise CatalogError(f"unknown group '{group}'")
        for node in self._categories[group]:
            if node.id == category_id:
                return node
        raise CatalogError(f"group '{group}' has no category '{category_id}'")

    # -- variables ---------------------------------------------------------

    def register(
        self,
        title: str,
        description: str,
        group: str,
        category: str,
        default_chart: ChartKind,
        **extra,
    ) -> int:
        """Add a variable; returns its freshly assigned number.

        Numbers are one higher than anything ever assigned and are never
        reused, even after a deletion.
        """
        self.category(group, category)
        with self._lock:
            number = self._highest + 1
            self._variables[number] = VariableEntry(
                number=number,
                title=title,
                description=description,
                group=group,
                category=category,
                default_chart=ChartKind(default_chart),
                **extra,
            )
            self._highest = number
            return number

    def delete(self, number: int) -> None:
        with self._lock:
            self._variables.pop(number, None)  # the number stays burned

    def get(self, number: int, include_drafts: bool = False) -> VariableEntry:
        entry = self._variables.get(number)
        if entry is None:
            raise UnknownVariableError(number)
        if not entry.published and not include_drafts:
            raise DraftVariableError(number)
        return entry

    def publish(self, number: int) -> None:
        entry = self.get(number, include_drafts=True)
        self._check_references(entry)
        self._variables[number] = replace(entry, visibility="published")

    def all_variables(self, include_drafts: bool = False) -> list[VariableEntry]:
        return sorted(
            (e for e in self._variables.values() if include_drafts or e.published),
            key=lambda e: e.number,
        )

    def navigation_tree(self) -> list[dict]:
        """Groups, categories and published variables, in stable order."""
        by_category: dict[tuple[str, str], list[VariableEntry]] = {}
        for entry in self.all_variables():
            by_category.setdefault((entry.group, entry.category), []).append(entry)
        tree = []
        for group in GROUPS:
            categories = []
            for node in self._categories[group.id]:
                variables = by_category.get((group.id, node.id), [])
                categories.append(
                    {
                        "id": node.id,
                        "label": node.label,
                        "variables": [
                            {"number": e.number, "title": e.title} for e in variables
                        ],
                    }
                )
            tree.append({"id": group.id, "label": group.label, "categories": categories})
        return tree

    def related(self, number: int) -> list[tuple[int, str]]:
        """Published variables related to one variable, resolved to titles."""
        entry = self.get(number)
        out = []
        for ref in entry.related_variables:
            try:
                target = self.get(ref)
            except UnknownVariableError:
                continue  # draft or dangling forward reference
            out.append((target.number, target.title))
        return out

    def validate(self) -> None:
        """Publish-time checks across the whole catalog."""
        problems = []
        goals_labels = {c.label for c in self._categories["goals"]}
        for required in REQUIRED_GOALS_CATEGORIES:
            if required not in goals_labels:
                problems.append(f"goals group is missing the '{required}' category")
        for entry in self._variables.values():
            try:
                self.category(entry.group, entry.category)
            except CatalogError as exc:
                problems.append(f"variable {entry.number}: {exc}")
            if entry.recipe_id is not None and entry.recipe_id not in self.recipes:
                problems.append(
                    f"variable {entry.number}: unknown recipe '{entry.recipe_id}'"
                )
            if entry.published:
                for ref in entry.related_variables:
                    if ref not in self._variables:
                        problems.append(
                            f"variable {entry.number}: related variable {ref} does not exist"
                        )
                if entry.drilldown_variable is not None:
                    target = self._variables.get(entry.drilldown_variable)
                    if target is None or not target.published:
                        problems.append(
                            f"variable {entry.number}: drilldown target "
                            f"{entry.drilldown_variable} is not published"
                        )
        if problems:
            raise CatalogError("; ".join(problems))

    def _check_references(self, entry: VariableEntry) -> None:
        for ref in entry.related_variables:
            if ref not in self._variables:
                raise CatalogError(
                    f"variable {entry.number}: related variable {ref} does not exist"
                )


# -- document format ----------------------------------------------------------


def catalog_from_yaml(text: str) -> Catalog:
    doc = yaml.safe_load(text)
    if not isinstance(doc, dict):
        raise CatalogError("catalog document must be a mapping")
    categories = []
    for group_id, group_spec in (doc.get("groups") or {}).items():
        if group_id not in GROUP_IDS:
            raise CatalogError(f"unknown group '{group_id}' in document")
        for node in group_spec.get("categories", []):
            categories.append(CategoryNode(node["id"], node["label"], group_id))
    variables = []
    for spec in doc.get("variables", []):
        variables.append(
            VariableEntry(
                number=int(spec["number"]),
                title=spec["title"],
                description=spec.get("description", ""),
                group=spec["group"],
                category=spec["category"],
                default_chart=ChartKind(spec["default_chart"]),
                alternative_charts=tuple(
                    ChartKind(k) for k in spec.get("alternative_charts", [])
                ),
                related_documents=tuple(
                    RelatedDocument(d["label"], d["url"])
                    for d in spec.get("related_documents", [])
                ),
                related_variables=tuple(spec.get("related_variables", [])),
                recipe_id=spec.get("recipe"),
                visibility=spec.get("visibility", "published"),
                unit=spec.get("unit"),
                x_dim=spec.get("x_dim"),
                series_dim=spec.get("series_dim"),
                drilldown_variable=spec.get("drilldown_variable"),
            )
        )
    recipes = [recipe_from_dict(spec) for spec in doc.get("recipes", [])]
    survey = None
    if "survey" in doc:
        s = doc["survey"]
        survey = SurveyPublication(
            source_id=s["source_id"],
            variable=int(s["variable"]),
            group_by=tuple(s["plan"]["group_by"]),
            measures=tuple((m["question"], m["stat"]) for m in s["plan"]["measures"]),
        )
    indicators = None
    if "indicators" in doc:
        ind = doc["indicators"]
        indicators = IndicatorConfig(
            window=(str(ind["window"][0]), str(ind["window"][1])),
            variables={k: int(v) for k, v in ind["variables"].items()},
        )
    return Catalog(categories, variables, recipes, survey, indicators)


def catalog_to_yaml(catalog: Catalog) -> str:
    doc: dict = {"groups": {}}
    for group in GROUPS:
        doc["groups"][group.id] = {
            "label": group.label,
            "categories": [
                {"id": c.id, "label": c.label} for c in catalog._categories[group.id]
            ],
        }
    doc["variables"] = []
    for entry in catalog.all_variables(include_drafts=True):
        spec: dict = {
            "number": entry.number,
            "title": entry.title,
            "description": entry.description,
            "group": entry.group,
            "category": entry.category,
            "default_chart": entry.default_chart.value,
        }
        if entry.alternative_charts:
            spec["alternative_charts"] = [k.value for k in entry.alternative_charts]
        if entry.related_documents:
            spec["related_documents"] = [
                {"label": d.label, "url": d.url} for d in entry.related_documents
            ]
        if entry.related_variables:
            spec["related_variables"] = list(entry.related_variables)
        if entry.recipe_id:
            spec["recipe"] = entry.recipe_id
        if entry.visibility != "published":
            spec["visibility"] = entry.visibility
        for key in ("unit", "x_dim", "series_dim", "drilldown_variable"):
            value = getattr(entry, key)
            if value is not None:
                spec[key] = value
        doc["variables"].append(spec)
    if catalog.recipes:
        doc["recipes"] = [recipe_to_dict(r) for r in catalog.recipes.values()]
    if catalog.indicators:
        doc["indicators"] = {
            "window": list(catalog.indicators.window),
            "variables": dict(catalog.indicators.variables),
        }
    if catalog.survey:
        doc["survey"] = {
            "source_id": catalog.survey.source_id,
            "variable": catalog.survey.variable,
            "plan": {
                "group_by": list(catalog.survey.group_by),
                "measures": [
                    {"question": q, "stat": stat} for q, stat in catalog.survey.measures
                ],
            },
        }
    return yaml.safe_dump(doc, sort_keys=False, allow_unicode=True)
