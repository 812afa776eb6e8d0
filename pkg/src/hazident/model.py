"""Domain model and configuration ingestion.

The analysis configuration is a single JSON document (the machine-readable
item definition): skill graph, operating modes, guide word sets, curation,
scene catalog, and filter rules. Parsing is strict (unknown fields are
schema errors, dangling ids are reference errors) and deterministic:
identical bytes produce an identical, immutable ``AnalysisConfig``.

``validate_config`` re-checks every structural invariant on an already
constructed config object and returns findings instead of raising, so
programmatically built configs get the same audit as parsed documents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator, Mapping


class ConfigError(Exception):
    """Base class for configuration ingestion failures."""


class ConfigSyntaxError(ConfigError):
    """Document is not well-formed JSON; carries line/column context."""


class ConfigSchemaError(ConfigError):
    """Document shape is wrong: unknown field, wrong type, bad enum token."""


class ConfigReferenceError(ConfigError):
    """Document references an id that does not exist."""


class SkillCategory(str, Enum):
    SYSTEM = "system"
    SENSOR = "sensor"
    ACTUATOR = "actuator"
    INPUT_OUTPUT = "input_output"
    PERCEPTION = "perception"
    PLANNING = "planning"
    ACTION = "action"


#: Categories whose skills take part in guide word expansion.
HAZOP_CATEGORIES = frozenset(
    {SkillCategory.PERCEPTION, SkillCategory.PLANNING, SkillCategory.ACTION}
)


class GuidewordScope(str, Enum):
    OUTPUT = "output"
    PARAMETER = "parameter"


class TriangleRole(str, Enum):
    HAZARDOUS_ELEMENT = "hazardous_element"
    TARGET = "target"


@dataclass(frozen=True)
class Skill:
    id: str
    name: str
    category: SkillCategory
    parameters: tuple[str, ...] = ()


@dataclass(frozen=True)
class SkillGraph:
    """Directed acyclic dependency graph; edges point dependent -> prerequisite."""

    skills: tuple[Skill, ...] = ()
    edges: tuple[tuple[str, str], ...] = ()
    root: str | None = None

    def skill(self, skill_id: str) -> Skill:
        for s in self.skills:
            if s.id == skill_id:
                return s
        raise KeyError(f"unknown skill id: {skill_id!r}")

    def skill_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.skills)

    def hazop_skills(self) -> tuple[Skill, ...]:
        return tuple(s for s in self.skills if s.category in HAZOP_CATEGORIES)


@dataclass(frozen=True)
class OperatingMode:
    id: str
    name: str
    active_skills: tuple[str, ...] = ()


@dataclass(frozen=True)
class Guideword:
    text: str
    scope: GuidewordScope
    category: SkillCategory


@dataclass(frozen=True)
class CategoryGuidewords:
    """Guide word set for one skill category.

    ``declared`` distinguishes config-provided sets from built-in defaults;
    ``replace_defaults`` is the explicit opt-out that silences the
    missing-default warning when a declared set drops a default word.
    """

    category: SkillCategory
    words: tuple[Guideword, ...]
    declared: bool = False
    replace_defaults: bool = False


#: Default guide word sets per category. Declared sets may extend these;
#: dropping a default without ``replace_defaults: true`` is flagged.
DEFAULT_GUIDEWORDS: dict[SkillCategory, tuple[tuple[str, GuidewordScope], ...]] = {
    SkillCategory.PERCEPTION: (
        ("no", GuidewordScope.OUTPUT),
        ("nonexistent", GuidewordScope.OUTPUT),
        ("erroneous", GuidewordScope.PARAMETER),
        ("too large", GuidewordScope.PARAMETER),
        ("too small", GuidewordScope.PARAMETER),
    ),
    SkillCategory.PLANNING: (
        ("not relevant", GuidewordScope.OUTPUT),
        ("relevant {parameter} not", GuidewordScope.PARAMETER),
        ("conflicting", GuidewordScope.OUTPUT),
        ("physically not possible", GuidewordScope.PARAMETER),
    ),
    SkillCategory.ACTION: (
        ("absent", GuidewordScope.OUTPUT),
        ("wrong", GuidewordScope.OUTPUT),
        ("unattended", GuidewordScope.OUTPUT),
        ("too large", GuidewordScope.PARAMETER),
        ("too small", GuidewordScope.PARAMETER),
    ),
}


def default_guidewords(category: SkillCategory) -> tuple[Guideword, ...]:
    return tuple(
        Guideword(text=text, scope=scope, category=category)
        for text, scope in DEFAULT_GUIDEWORDS.get(category, ())
    )


@dataclass(frozen=True)
class SceneDimension:
    name: str
    values: tuple[str, ...]
    exceedance_values: tuple[str, ...] = ()
    triangle_role: TriangleRole | None = None


@dataclass(frozen=True)
class ForbiddenRule:
    """Conjunction of dimension=value literals; a matching assignment is invalid."""

    id: str
    when: tuple[tuple[str, str], ...]
    note: str = ""


@dataclass(frozen=True)
class SceneCatalog:
    dimensions: tuple[SceneDimension, ...] = ()
    forbidden: tuple[ForbiddenRule, ...] = ()

    def dimension(self, name: str) -> SceneDimension:
        for d in self.dimensions:
            if d.name == name:
                return d
        raise KeyError(f"unknown scene dimension: {name!r}")

    def dimension_names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dimensions)


@dataclass(frozen=True)
class Curation:
    exclude: tuple[str, ...] = ()
    include: tuple[str, ...] = ()
    notes: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class PlausibilityRule:
    """Marks (malfunction, scene) pairs as implausible.

    Empty selector tuples are wildcards; scene literals are a conjunction.
    """

    id: str
    skills: tuple[str, ...] = ()
    guidewords: tuple[str, ...] = ()
    parameters: tuple[str, ...] = ()
    scene: tuple[tuple[str, str], ...] = ()
    note: str = ""


@dataclass(frozen=True)
class SceneModeRule:
    """Excludes scenes matching the literals for the listed operating modes."""

    id: str
    modes: tuple[str, ...] = ()
    scene: tuple[tuple[str, str], ...] = ()
    note: str = ""


@dataclass(frozen=True)
class AnalysisSettings:
    """Generation switches, read from ``metadata.analysis``."""

    nominal_events: bool = True
    max_exceedances: int = 1
    generation_excluded_scenes: tuple[str, ...] = ()


@dataclass(frozen=True)
class CardLayoutRow:
    """One declared event-card row built from one or more scene dimensions.

    Styles: ``single`` (the value), ``left_right`` ("A (left) and B (right)"),
    ``same_or_list`` (joint label when all values agree, itemized otherwise),
    ``with`` ("A with B").
    """

    label: str
    dimensions: tuple[str, ...]
    style: str = "single"


CARD_ROW_STYLES = ("single", "left_right", "same_or_list", "with")


@dataclass(frozen=True)
class ReferenceCounts:
    """Published per-mode counts to report deltas against (optional)."""

    mode: str
    events: int | None = None
    relevant: int | None = None
    hazardous: int | None = None


@dataclass(frozen=True)
class AnalysisConfig:
    graph: SkillGraph = SkillGraph()
    modes: tuple[OperatingMode, ...] = ()
    guideword_sets: tuple[CategoryGuidewords, ...] = ()
    curation: Curation = Curation()
    scene_catalog: SceneCatalog = SceneCatalog()
    plausibility_rules: tuple[PlausibilityRule, ...] = ()
    scene_mode_rules: tuple[SceneModeRule, ...] = ()
    metadata: Mapping[str, Any] = field(default_factory=dict)
    settings: AnalysisSettings = AnalysisSettings()
    card_layout: tuple[CardLayoutRow, ...] = ()
    reference_counts: tuple[ReferenceCounts, ...] = ()
    source_text: str | None = field(default=None, compare=False)

    def guidewords_for(self, category: SkillCategory) -> tuple[Guideword, ...]:
        for entry in self.guideword_sets:
            if entry.category == category:
                return entry.words
        return default_guidewords(category)

    def mode(self, mode_id: str) -> OperatingMode:
        for m in self.modes:
            if m.id == mode_id:
                return m
        raise KeyError(f"unknown mode id: {mode_id!r}")


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning"
    code: str
    message: str
    entity: str = ""

    def __str__(self) -> str:
        tag = f" [{self.entity}]" if self.entity else ""
        return f"{self.severity}: {self.code}: {self.message}{tag}"


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

_TOP_LEVEL_KEYS = {
    "skills",
    "edges",
    "modes",
    "guidewords",
    "curation",
    "scene_dimensions",
    "forbidden_scenes",
    "plausibility_rules",
    "scene_mode_rules",
    "metadata",
}


def _type_name(value: Any) -> str:
    return type(value).__name__


def _expect_object(value: Any, path: str) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise ConfigSchemaError(f"{path}: expected object, got {_type_name(value)}")
    return value


def _expect_list(value: Any, path: str) -> list[Any]:
    if not isinstance(value, list):
        raise ConfigSchemaError(f"{path}: expected array, got {_type_name(value)}")
    return value


def _expect_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ConfigSchemaError(f"{path}: expected string, got {_type_name(value)}")
    return value


def _expect_bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigSchemaError(f"{path}: expected boolean, got {_type_name(value)}")
    return value


def _expect_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigSchemaError(f"{path}: expected integer, got {_type_name(value)}")
    return value


def _check_keys(obj: dict[str, Any], allowed: set[str], path: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigSchemaError(f"{path}: unknown field(s): {', '.join(unknown)}")


def _str_list(value: Any, path: str) -> tuple[str, ...]:
    return tuple(_expect_str(v, f"{path}[{i}]") for i, v in enumerate(_expect_list(value, path)))


def _literals(value: Any, path: str) -> tuple[tuple[str, str], ...]:
    obj = _expect_object(value, path)
    return tuple((k, _expect_str(v, f"{path}.{k}")) for k, v in obj.items())


def _parse_category(value: Any, path: str) -> SkillCategory:
    text = _expect_str(value, path)
    try:
        return SkillCategory(text)
    except ValueError:
        allowed = ", ".join(c.value for c in SkillCategory)
        raise ConfigSchemaError(f"{path}: unknown category {text!r} (allowed: {allowed})") from None


def _parse_skill(obj: Any, path: str) -> Skill:
    entry = _expect_object(obj, path)
    _check_keys(entry, {"id", "name", "category", "parameters"}, path)
    for required in ("id", "name", "category"):
        if required not in entry:
            raise ConfigSchemaError(f"{path}: missing required field {required!r}")
    return Skill(
        id=_expect_str(entry["id"], f"{path}.id"),
        name=_expect_str(entry["name"], f"{path}.name"),
        category=_parse_category(entry["category"], f"{path}.category"),
        parameters=_str_list(entry.get("parameters", []), f"{path}.parameters"),
    )


def _parse_guideword_entry(obj: Any, path: str, category: SkillCategory) -> Guideword:
    entry = _expect_object(obj, path)
    _check_keys(entry, {"text", "scope"}, path)
    for required in ("text", "scope"):
        if required not in entry:
            raise ConfigSchemaError(f"{path}: missing required field {required!r}")
    scope_text = _expect_str(entry["scope"], f"{path}.scope")
    try:
        scope = GuidewordScope(scope_text)
    except ValueError:
        raise ConfigSchemaError(
            f"{path}.scope: expected 'output' or 'parameter', got {scope_text!r}"
        ) from None
    return Guideword(text=_expect_str(entry["text"], f"{path}.text"), scope=scope, category=category)


def _parse_guidewords(obj: Any, path: str) -> tuple[CategoryGuidewords, ...]:
    mapping = _expect_object(obj, path)
    sets: list[CategoryGuidewords] = []
    for key, value in mapping.items():
        category = _parse_category(key, f"{path} key")
        if category not in HAZOP_CATEGORIES:
            raise ConfigSchemaError(
                f"{path}.{key}: guide words apply only to perception, planning and action skills"
            )
        entry = _expect_object(value, f"{path}.{key}")
        _check_keys(entry, {"words", "replace_defaults"}, f"{path}.{key}")
        if "words" not in entry:
            raise ConfigSchemaError(f"{path}.{key}: missing required field 'words'")
        words = tuple(
            _parse_guideword_entry(w, f"{path}.{key}.words[{i}]", category)
            for i, w in enumerate(_expect_list(entry["words"], f"{path}.{key}.words"))
        )
        replace = _expect_bool(entry.get("replace_defaults", False), f"{path}.{key}.replace_defaults")
        sets.append(
            CategoryGuidewords(category=category, words=words, declared=True, replace_defaults=replace)
        )
    declared = {s.category for s in sets}
    for category in (SkillCategory.PERCEPTION, SkillCategory.PLANNING, SkillCategory.ACTION):
        if category not in declared:
            sets.append(CategoryGuidewords(category=category, words=default_guidewords(category)))
    sets.sort(key=lambda s: s.category.value)
    return tuple(sets)


def _parse_dimension(obj: Any, path: str) -> SceneDimension:
    entry = _expect_object(obj, path)
    _check_keys(entry, {"name", "values", "exceedance_values", "triangle_role"}, path)
    for required in ("name", "values"):
        if required not in entry:
            raise ConfigSchemaError(f"{path}: missing required field {required!r}")
    role: TriangleRole | None = None
    if entry.get("triangle_role") is not None:
        role_text = _expect_str(entry["triangle_role"], f"{path}.triangle_role")
        try:
            role = TriangleRole(role_text)
        except ValueError:
            raise ConfigSchemaError(
                f"{path}.triangle_role: expected 'hazardous_element' or 'target', got {role_text!r}"
            ) from None
    return SceneDimension(
        name=_expect_str(entry["name"], f"{path}.name"),
        values=_str_list(entry["values"], f"{path}.values"),
        exceedance_values=_str_list(entry.get("exceedance_values", []), f"{path}.exceedance_values"),
        triangle_role=role,
    )


def _parse_forbidden(obj: Any, path: str, index: int) -> ForbiddenRule:
    entry = _expect_object(obj, path)
    _check_keys(entry, {"id", "when", "note"}, path)
    if "when" not in entry:
        raise ConfigSchemaError(f"{path}: missing required field 'when'")
    return ForbiddenRule(
        id=_expect_str(entry.get("id", f"forbidden-{index}"), f"{path}.id"),
        when=_literals(entry["when"], f"{path}.when"),
        note=_expect_str(entry.get("note", ""), f"{path}.note"),
    )


def _parse_curation(obj: Any, path: str) -> Curation:
    entry = _expect_object(obj, path)
    _check_keys(entry, {"exclude", "include", "notes"}, path)
    notes_obj = _expect_object(entry.get("notes", {}), f"{path}.notes")
    notes = tuple((k, _expect_str(v, f"{path}.notes.{k}")) for k, v in notes_obj.items())
    return Curation(
        exclude=_str_list(entry.get("exclude", []), f"{path}.exclude"),
        include=_str_list(entry.get("include", []), f"{path}.include"),
        notes=notes,
    )


def _parse_plausibility(obj: Any, path: str, index: int) -> PlausibilityRule:
    entry = _expect_object(obj, path)
    _check_keys(entry, {"id", "malfunction", "scene", "note"}, path)
    selector = _expect_object(entry.get("malfunction", {}), f"{path}.malfunction")
    _check_keys(selector, {"skills", "guidewords", "parameters"}, f"{path}.malfunction")
    return PlausibilityRule(
        id=_expect_str(entry.get("id", f"plausibility-{index}"), f"{path}.id"),
        skills=_str_list(selector.get("skills", []), f"{path}.malfunction.skills"),
        guidewords=_str_list(selector.get("guidewords", []), f"{path}.malfunction.guidewords"),
        parameters=_str_list(selector.get("parameters", []), f"{path}.malfunction.parameters"),
        scene=_literals(entry.get("scene", {}), f"{path}.scene"),
        note=_expect_str(entry.get("note", ""), f"{path}.note"),
    )


def _parse_scene_mode(obj: Any, path: str, index: int) -> SceneModeRule:
    entry = _expect_object(obj, path)
    _check_keys(entry, {"id", "modes", "scene", "note"}, path)
    for required in ("modes", "scene"):
        if required not in entry:
            raise ConfigSchemaError(f"{path}: missing required field {required!r}")
    return SceneModeRule(
        id=_expect_str(entry.get("id", f"scene-mode-{index}"), f"{path}.id"),
        modes=_str_list(entry["modes"], f"{path}.modes"),
        scene=_literals(entry["scene"], f"{path}.scene"),
        note=_expect_str(entry.get("note", ""), f"{path}.note"),
    )


def _parse_mode(obj: Any, path: str) -> OperatingMode:
    entry = _expect_object(obj, path)
    _check_keys(entry, {"id", "name", "active_skills"}, path)
    for required in ("id", "name"):
        if required not in entry:
            raise ConfigSchemaError(f"{path}: missing required field {required!r}")
    return OperatingMode(
        id=_expect_str(entry["id"], f"{path}.id"),
        name=_expect_str(entry["name"], f"{path}.name"),
        active_skills=_str_list(entry.get("active_skills", []), f"{path}.active_skills"),
    )


def _parse_settings(metadata: Mapping[str, Any]) -> AnalysisSettings:
    raw = metadata.get("analysis", {})
    entry = _expect_object(raw, "metadata.analysis")
    _check_keys(
        entry,
        {"nominal_events", "max_exceedances", "generation_excluded_scenes"},
        "metadata.analysis",
    )
    return AnalysisSettings(
        nominal_events=_expect_bool(entry.get("nominal_events", True), "metadata.analysis.nominal_events"),
        max_exceedances=_expect_int(entry.get("max_exceedances", 1), "metadata.analysis.max_exceedances"),
        generation_excluded_scenes=_str_list(
            entry.get("generation_excluded_scenes", []), "metadata.analysis.generation_excluded_scenes"
        ),
    )


def _parse_card_layout(metadata: Mapping[str, Any]) -> tuple[CardLayoutRow, ...]:
    raw = metadata.get("card_layout", [])
    rows: list[CardLayoutRow] = []
    for i, obj in enumerate(_expect_list(raw, "metadata.card_layout")):
        path = f"metadata.card_layout[{i}]"
        entry = _expect_object(obj, path)
        _check_keys(entry, {"label", "dimensions", "style"}, path)
        for required in ("label", "dimensions"):
            if required not in entry:
                raise ConfigSchemaError(f"{path}: missing required field {required!r}")
        style = _expect_str(entry.get("style", "single"), f"{path}.style")
        if style not in CARD_ROW_STYLES:
            raise ConfigSchemaError(
                f"{path}.style: expected one of {', '.join(CARD_ROW_STYLES)}, got {style!r}"
            )
        rows.append(
            CardLayoutRow(
                label=_expect_str(entry["label"], f"{path}.label"),
                dimensions=_str_list(entry["dimensions"], f"{path}.dimensions"),
                style=style,
            )
        )
    return tuple(rows)


def _parse_reference_counts(metadata: Mapping[str, Any]) -> tuple[ReferenceCounts, ...]:
    raw = metadata.get("reference_counts", {})
    entry = _expect_object(raw, "metadata.reference_counts")
    counts = []
    for mode_id, value in entry.items():
        path = f"metadata.reference_counts.{mode_id}"
        obj = _expect_object(value, path)
        _check_keys(obj, {"events", "relevant", "hazardous"}, path)
        counts.append(
            ReferenceCounts(
                mode=mode_id,
                events=_expect_int(obj["events"], f"{path}.events") if "events" in obj else None,
                relevant=_expect_int(obj["relevant"], f"{path}.relevant") if "relevant" in obj else None,
                hazardous=_expect_int(obj["hazardous"], f"{path}.hazardous") if "hazardous" in obj else None,
            )
        )
    return tuple(counts)


def _cross_check_references(config: AnalysisConfig) -> None:
    """Raise ConfigReferenceError on the first dangling id in the document."""
    skill_ids = set(config.graph.skill_ids())
    for dependent, prerequisite in config.graph.edges:
        for endpoint in (dependent, prerequisite):
            if endpoint not in skill_ids:
                raise ConfigReferenceError(f"edges: unknown skill id {endpoint!r}")
    for mode in config.modes:
        for skill_id in mode.active_skills:
            if skill_id not in skill_ids:
                raise ConfigReferenceError(
                    f"modes.{mode.id}.active_skills: unknown skill id {skill_id!r}"
                )
    dims = {d.name: set(d.values) for d in config.scene_catalog.dimensions}

    def check_literals(literals: tuple[tuple[str, str], ...], where: str) -> None:
        for dim, value in literals:
            if dim not in dims:
                raise ConfigReferenceError(f"{where}: unknown scene dimension {dim!r}")
            if value not in dims[dim]:
                raise ConfigReferenceError(f"{where}: unknown value {value!r} for dimension {dim!r}")

    for rule in config.scene_catalog.forbidden:
        check_literals(rule.when, f"forbidden_scenes.{rule.id}")
    for prule in config.plausibility_rules:
        check_literals(prule.scene, f"plausibility_rules.{prule.id}.scene")
        for skill_id in prule.skills:
            if skill_id not in skill_ids:
                raise ConfigReferenceError(
                    f"plausibility_rules.{prule.id}: unknown skill id {skill_id!r}"
                )
    mode_ids = {m.id for m in config.modes}
    for srule in config.scene_mode_rules:
        check_literals(srule.scene, f"scene_mode_rules.{srule.id}.scene")
        for mode_id in srule.modes:
            if mode_id not in mode_ids:
                raise ConfigReferenceError(f"scene_mode_rules.{srule.id}: unknown mode id {mode_id!r}")
    for row in config.card_layout:
        for dim in row.dimensions:
            if dim not in dims:
                raise ConfigReferenceError(
                    f"metadata.card_layout[{row.label!r}]: unknown scene dimension {dim!r}"
                )
    for ref in config.reference_counts:
        if ref.mode not in mode_ids:
            raise ConfigReferenceError(f"metadata.reference_counts: unknown mode id {ref.mode!r}")


def parse_config(document: str | bytes) -> AnalysisConfig:
    """Parse a JSON configuration document into a cross-linked AnalysisConfig.

    Raises ConfigSyntaxError / ConfigSchemaError / ConfigReferenceError; a
    successfully parsed config still goes through ``validate_config`` before
    generation (parsing does not reject cycles or count invariants).
    """
    if isinstance(document, bytes):
        text = document.decode("utf-8")
    else:
        text = document
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    top = _expect_object(raw, "document")
    _check_keys(top, _TOP_LEVEL_KEYS, "document")

    skills = tuple(
        _parse_skill(obj, f"skills[{i}]") for i, obj in enumerate(_expect_list(top.get("skills", []), "skills"))
    )
    edges: list[tuple[str, str]] = []
    for i, obj in enumerate(_expect_list(top.get("edges", []), "edges")):
        pair = _expect_list(obj, f"edges[{i}]")
        if len(pair) != 2:
            raise ConfigSchemaError(f"edges[{i}]: expected [dependent, prerequisite] pair")
        edges.append((_expect_str(pair[0], f"edges[{i}][0]"), _expect_str(pair[1], f"edges[{i}][1]")))
    root = next((s.id for s in skills if s.category == SkillCategory.SYSTEM), None)
    graph = SkillGraph(skills=skills, edges=tuple(edges), root=root)

    modes = tuple(
        _parse_mode(obj, f"modes[{i}]") for i, obj in enumerate(_expect_list(top.get("modes", []), "modes"))
    )
    guideword_sets = _parse_guidewords(top.get("guidewords", {}), "guidewords")
    curation = _parse_curation(top.get("curation", {}), "curation")
    dimensions = tuple(
        _parse_dimension(obj, f"scene_dimensions[{i}]")
        for i, obj in enumerate(_expect_list(top.get("scene_dimensions", []), "scene_dimensions"))
    )
    forbidden = tuple(
        _parse_forbidden(obj, f"forbidden_scenes[{i}]", i)
        for i, obj in enumerate(_expect_list(top.get("forbidden_scenes", []), "forbidden_scenes"))
    )
    plausibility = tuple(
        _parse_plausibility(obj, f"plausibility_rules[{i}]", i)
        for i, obj in enumerate(_expect_list(top.get("plausibility_rules", []), "plausibility_rules"))
    )
    scene_mode = tuple(
        _parse_scene_mode(obj, f"scene_mode_rules[{i}]", i)
        for i, obj in enumerate(_expect_list(top.get("scene_mode_rules", []), "scene_mode_rules"))
    )
    metadata = dict(_expect_object(top.get("metadata", {}), "metadata"))

    config = AnalysisConfig(
        graph=graph,
        modes=modes,
        guideword_sets=guideword_sets,
        curation=curation,
        scene_catalog=SceneCatalog(dimensions=dimensions, forbidden=forbidden),
        plausibility_rules=plausibility,
        scene_mode_rules=scene_mode,
        metadata=metadata,
        settings=_parse_settings(metadata),
        card_layout=_parse_card_layout(metadata),
        reference_counts=_parse_reference_counts(metadata),
        source_text=text,
    )
    _cross_check_references(config)
    return config


# --------------------------------------------------------------------------
# Serialization (inverse of parse_config on valid configs)
# --------------------------------------------------------------------------


def config_to_document(config: AnalysisConfig) -> dict[str, Any]:
    doc: dict[str, Any] = {}
    if config.metadata:
        doc["metadata"] = dict(config.metadata)
    doc["skills"] = [
        {
            "id": s.id,
            "name": s.name,
            "category": s.category.value,
            **({"parameters": list(s.parameters)} if s.parameters else {}),
        }
        for s in config.graph.skills
    ]
    doc["edges"] = [[d, p] for d, p in config.graph.edges]
    doc["modes"] = [
        {"id": m.id, "name": m.name, "active_skills": list(m.active_skills)} for m in config.modes
    ]
    declared = {
        s.category.value: {
            "words": [{"text": w.text, "scope": w.scope.value} for w in s.words],
            **({"replace_defaults": True} if s.replace_defaults else {}),
        }
        for s in config.guideword_sets
        if s.declared
    }
    if declared:
        doc["guidewords"] = declared
    if config.curation != Curation():
        doc["curation"] = {
            "exclude": list(config.curation.exclude),
            "include": list(config.curation.include),
            **({"notes": dict(config.curation.notes)} if config.curation.notes else {}),
        }
    doc["scene_dimensions"] = [
        {
            "name": d.name,
            "values": list(d.values),
            **({"exceedance_values": list(d.exceedance_values)} if d.exceedance_values else {}),
            **({"triangle_role": d.triangle_role.value} if d.triangle_role else {}),
        }
        for d in config.scene_catalog.dimensions
    ]
    if config.scene_catalog.forbidden:
        doc["forbidden_scenes"] = [
            {"id": r.id, "when": dict(r.when), **({"note": r.note} if r.note else {})}
            for r in config.scene_catalog.forbidden
        ]
    if config.plausibility_rules:
        doc["plausibility_rules"] = [
            {
                "id": r.id,
                "malfunction": {
                    **({"skills": list(r.skills)} if r.skills else {}),
                    **({"guidewords": list(r.guidewords)} if r.guidewords else {}),
                    **({"parameters": list(r.parameters)} if r.parameters else {}),
                },
                "scene": dict(r.scene),
                **({"note": r.note} if r.note else {}),
            }
            for r in config.plausibility_rules
        ]
    if config.scene_mode_rules:
        doc["scene_mode_rules"] = [
            {
                "id": r.id,
                "modes": list(r.modes),
                "scene": dict(r.scene),
                **({"note": r.note} if r.note else {}),
            }
            for r in config.scene_mode_rules
        ]
    return doc


def serialize_config(config: AnalysisConfig) -> str:
    return json.dumps(config_to_document(config), indent=2, ensure_ascii=False) + "\n"


# --------------------------------------------------------------------------
# Validation
# --------------------------------------------------------------------------

#: Category layers a skill may normally depend on; edges outside this map
#: get a layering warning (hierarchy is conventional, not mandatory).
_LAYERING: dict[SkillCategory, frozenset[SkillCategory]] = {
    SkillCategory.SYSTEM: frozenset(
        {
            SkillCategory.PERCEPTION,
            SkillCategory.PLANNING,
            SkillCategory.ACTION,
            SkillCategory.INPUT_OUTPUT,
            SkillCategory.SENSOR,
            SkillCategory.ACTUATOR,
        }
    ),
    SkillCategory.PERCEPTION: frozenset(
        {SkillCategory.PERCEPTION, SkillCategory.SENSOR, SkillCategory.INPUT_OUTPUT}
    ),
    SkillCategory.PLANNING: frozenset(
        {SkillCategory.PLANNING, SkillCategory.PERCEPTION, SkillCategory.INPUT_OUTPUT}
    ),
    SkillCategory.ACTION: frozenset(
        {
            SkillCategory.ACTION,
            SkillCategory.PLANNING,
            SkillCategory.PERCEPTION,
            SkillCategory.ACTUATOR,
            SkillCategory.INPUT_OUTPUT,
        }
    ),
    SkillCategory.SENSOR: frozenset(),
    SkillCategory.ACTUATOR: frozenset(),
    SkillCategory.INPUT_OUTPUT: frozenset(),
}


def _iter_duplicates(items: tuple[str, ...]) -> Iterator[str]:
    seen: set[str] = set()
    for item in items:
        if item in seen:
            yield item
        seen.add(item)


def validate_config(config: AnalysisConfig) -> list[Finding]:
    """Audit every structural invariant; errors block generation, warnings do not.

    Pure: repeated calls on the same config return the identical report.
    """
    findings: list[Finding] = []

    def error(code: str, message: str, entity: str = "") -> None:
        findings.append(Finding("error", code, message, entity))

    def warning(code: str, message: str, entity: str = "") -> None:
        findings.append(Finding("warning", code, message, entity))

    graph = config.graph
    skill_ids = set()
    for dup in _iter_duplicates(graph.skill_ids()):
        error("skill-duplicate", f"duplicate skill id {dup!r}", dup)
    skill_ids = set(graph.skill_ids())
    by_id = {s.id: s for s in graph.skills}

    for skill in graph.skills:
        for dup in _iter_duplicates(skill.parameters):
            error("parameter-duplicate", f"skill {skill.id!r} declares parameter {dup!r} twice", skill.id)
        if skill.category in HAZOP_CATEGORIES and not skill.parameters:
            warning(
                "skill-no-parameters",
                f"{skill.category.value} skill {skill.id!r} has no parameters; "
                "parameter-scoped guide words will produce nothing",
                skill.id,
            )

    valid_edges: list[tuple[str, str]] = []
    seen_edges: set[tuple[str, str]] = set()
    for dependent, prerequisite in graph.edges:
        missing = [e for e in (dependent, prerequisite) if e not in skill_ids]
        if missing:
            for endpoint in missing:
                error("edge-reference", f"edge ({dependent!r} -> {prerequisite!r}) references unknown skill {endpoint!r}", endpoint)
            continue
        if (dependent, prerequisite) in seen_edges:
            warning("edge-duplicate", f"duplicate edge ({dependent!r} -> {prerequisite!r})")
        seen_edges.add((dependent, prerequisite))
        valid_edges.append((dependent, prerequisite))
        dep_cat = by_id[dependent].category
        pre_cat = by_id[prerequisite].category
        if pre_cat not in _LAYERING[dep_cat]:
            warning(
                "category-layering",
                f"edge ({dependent!r} -> {prerequisite!r}) crosses category layers "
                f"({dep_cat.value} -> {pre_cat.value})",
            )

    # Cycle check runs over structurally valid edges only, so a dangling
    # endpoint yields exactly one finding.
    from hazident.skillgraph import check_acyclic  # local import avoids module cycle

    cycle = check_acyclic(SkillGraph(skills=graph.skills, edges=tuple(valid_edges), root=graph.root))
    if cycle is not None:
        error("graph-cycle", "cycle detected: " + " -> ".join(cycle))

    system_skills = [s for s in graph.skills if s.category == SkillCategory.SYSTEM]
    if graph.skills and len(system_skills) != 1:
        error(
            "system-skill-count",
            f"exactly one system skill required, found {len(system_skills)}"
            + (": " + ", ".join(s.id for s in system_skills) if system_skills else ""),
        )
    elif len(system_skills) == 1 and graph.root != system_skills[0].id:
        error("root-mismatch", f"root must be the system skill {system_skills[0].id!r}, got {graph.root!r}")

    for dup in _iter_duplicates(tuple(m.id for m in config.modes)):
        error("mode-duplicate", f"duplicate mode id {dup!r}", dup)
    for mode in config.modes:
        for skill_id in mode.active_skills:
            if skill_id not in skill_ids:
                error("mode-skill-reference", f"mode {mode.id!r} activates unknown skill {skill_id!r}", mode.id)
        for dup in _iter_duplicates(mode.active_skills):
            warning("mode-skill-duplicate", f"mode {mode.id!r} lists skill {dup!r} twice", mode.id)

    for entry in config.guideword_sets:
        seen_words: set[tuple[str, GuidewordScope]] = set()
        for word in entry.words:
            if (word.text, word.scope) in seen_words:
                error(
                    "guideword-duplicate",
                    f"{entry.category.value} guide word {word.text!r} ({word.scope.value}) declared twice",
                    entry.category.value,
                )
            seen_words.add((word.text, word.scope))
        if not entry.declared or entry.replace_defaults:
            continue
        declared_pairs = {(w.text, w.scope) for w in entry.words}
        for text, scope in DEFAULT_GUIDEWORDS[entry.category]:
            if (text, scope) not in declared_pairs:
                warning(
                    "guideword-default-missing",
                    f"{entry.category.value} guide word set drops default {text!r} "
                    "without replace_defaults",
                    entry.category.value,
                )

    catalog = config.scene_catalog
    for dup in _iter_duplicates(catalog.dimension_names()):
        error("dimension-duplicate", f"duplicate scene dimension {dup!r}", dup)
    dims = {d.name: d for d in catalog.dimensions}
    for dim in catalog.dimensions:
        if not dim.values:
            error("dimension-empty", f"dimension {dim.name!r} has no values", dim.name)
        elif len(dim.values) == 1:
            warning("dimension-single-value", f"dimension {dim.name!r} has a single value", dim.name)
        for dup in _iter_duplicates(dim.values):
            error("value-duplicate", f"dimension {dim.name!r} lists value {dup!r} twice", dim.name)
        for value in dim.exceedance_values:
            if value not in dim.values:
                error(
                    "exceedance-reference",
                    f"dimension {dim.name!r} flags unknown value {value!r} as exceedance",
                    dim.name,
                )

    def check_literals(literals: tuple[tuple[str, str], ...], code: str, where: str) -> None:
        for dim_name, value in literals:
            if dim_name not in dims:
                error(code, f"{where} references unknown dimension {dim_name!r}", where)
            elif value not in dims[dim_name].values:
                error(code, f"{where} references unknown value {value!r} of dimension {dim_name!r}", where)

    for rule in catalog.forbidden:
        if not rule.when:
            warning("forbidden-empty", f"forbidden rule {rule.id!r} has no literals and matches every scene", rule.id)
        check_literals(rule.when, "forbidden-reference", f"forbidden rule {rule.id!r}")

    for prule in config.plausibility_rules:
        check_literals(prule.scene, "plausibility-reference", f"plausibility rule {prule.id!r}")
        known_guidewords = {w.text for s in config.guideword_sets for w in s.words}
        for skill_id in prule.skills:
            if skill_id not in skill_ids:
                error("plausibility-reference", f"plausibility rule {prule.id!r} references unknown skill {skill_id!r}", prule.id)
            elif by_id[skill_id].category not in HAZOP_CATEGORIES:
                warning(
                    "plausibility-category",
                    f"plausibility rule {prule.id!r} selects {skill_id!r}, which never carries malfunctions",
                    prule.id,
                )
        for text in prule.guidewords:
            if text not in known_guidewords:
                error("plausibility-reference", f"plausibility rule {prule.id!r} references unknown guide word {text!r}", prule.id)

    mode_ids = {m.id for m in config.modes}
    for srule in config.scene_mode_rules:
        check_literals(srule.scene, "scene-mode-reference", f"scene-mode rule {srule.id!r}")
        for mode_id in srule.modes:
            if mode_id not in mode_ids:
                error("scene-mode-reference", f"scene-mode rule {srule.id!r} references unknown mode {mode_id!r}", srule.id)

    if config.settings.max_exceedances < 0:
        error("settings-range", "metadata.analysis.max_exceedances must be non-negative")

    for row in config.card_layout:
        for dim_name in row.dimensions:
            if dim_name not in dims:
                error("card-layout-reference", f"card layout row {row.label!r} references unknown dimension {dim_name!r}", row.label)

    for ref in config.reference_counts:
        if ref.mode not in mode_ids:
            error("reference-counts-reference", f"reference counts name unknown mode {ref.mode!r}", ref.mode)

    has_errors = any(f.severity == "error" for f in findings)

    # Curation and scene-exclusion ids resolve against generated artifacts;
    # only meaningful once the structural checks above pass.
    if not has_errors:
        from hazident.hazop import expand_all  # local import avoids module cycle

        candidate_ids = {m.id for m in expand_all(config)}
        for dup in _iter_duplicates(config.curation.exclude):
            error("curation-duplicate", f"curation excludes {dup!r} twice", dup)
        for dup in _iter_duplicates(config.curation.include):
            error("curation-duplicate", f"curation includes {dup!r} twice", dup)
        for cid in (*config.curation.exclude, *config.curation.include):
            if cid not in candidate_ids:
                error("curation-reference", f"curation references unknown malfunction id {cid!r}", cid)
        for cid, _ in config.curation.notes:
            if cid not in candidate_ids:
                warning("curation-note-reference", f"curation note references unknown malfunction id {cid!r}", cid)

        if config.settings.generation_excluded_scenes:
            from hazident.scenes import enumerate_scenes

            scene_ids = {s.id for s in enumerate_scenes(catalog)}
            for dup in _iter_duplicates(config.settings.generation_excluded_scenes):
                error("scene-exclusion-duplicate", f"generation excludes scene {dup!r} twice", dup)
            for sid in config.settings.generation_excluded_scenes:
                if sid not in scene_ids:
                    error("scene-exclusion-reference", f"generation excludes unknown scene id {sid!r}", sid)

    return findings


def errors_of(findings: list[Finding]) -> list[Finding]:
    return [f for f in findings if f.severity == "error"]
