"""Candidate event generation and rule filtering.

An event is one (operating mode, malfunction-or-nominal, scene) triple.
Generation crosses every curated malfunction with every generation scene
for every mode, then evaluates four filter families without
short-circuiting, so each dropped event carries every reason that
applies:

- ``mode-activity``: the malfunctioning skill is not active in the mode
- ``single-fault``: total failure count (scene exceedances plus one for
  a malfunction) is not exactly one
- ``plausibility:<rule>``: an expert rule marks the pairing implausible
- ``scene-mode:<rule>``: the scene is excluded for the mode

An event with no reasons is relevant. Nominal (malfunction-free) events
are generated when ``metadata.analysis.nominal_events`` is true; they
surface scenes that are hazardous with fully intact function.
"""

from __future__ import annotations

from dataclasses import dataclass

from hazident.hazop import Malfunction, curated_malfunctions
from hazident.model import AnalysisConfig, PlausibilityRule, SceneModeRule
from hazident.scenes import Scene, enumerate_scenes

RULE_MODE_ACTIVITY = "mode-activity"
RULE_SINGLE_FAULT = "single-fault"
RULE_PLAUSIBILITY = "plausibility"
RULE_SCENE_MODE = "scene-mode"

RULE_FAMILIES = (RULE_MODE_ACTIVITY, RULE_SINGLE_FAULT, RULE_PLAUSIBILITY, RULE_SCENE_MODE)


@dataclass(frozen=True)
class Event:
    id: str
    mode: str
    malfunction: Malfunction | None
    scene: Scene
    failure_count: int
    drop_reasons: tuple[str, ...]

    @property
    def relevant(self) -> bool:
        return not self.drop_reasons

    @property
    def nominal(self) -> bool:
        return self.malfunction is None


def event_id(mode_index: int, malfunction_index: int | None, scene_index: int) -> str:
    middle = "nom" if malfunction_index is None else f"f{malfunction_index:03d}"
    return f"m{mode_index:02d}-{middle}-s{scene_index:04d}"


def _selector_matches(rule: PlausibilityRule, malfunction: Malfunction | None) -> bool:
    if malfunction is None:
        # Only a fully unconstrained selector (a pure scene rule) hits
        # nominal events.
        return not (rule.skills or rule.guidewords or rule.parameters)
    if rule.skills and malfunction.skill not in rule.skills:
        return False
    if rule.guidewords and malfunction.guideword.text not in rule.guidewords:
        return False
    if rule.parameters and (malfunction.parameter or "") not in rule.parameters:
        return False
    return True


def evaluate_filters(
    config: AnalysisConfig,
    mode_id: str,
    malfunction: Malfunction | None,
    scene: Scene,
    *,
    active_skills: frozenset[str] | None = None,
) -> tuple[str, ...]:
    """Every failing rule for the triple, in rule-family order.

    All families are evaluated unconditionally; reordering the rule lists
    changes at most the tuple order, never its membership.
    """
    reasons: list[str] = []
    if malfunction is not None:
        active = active_skills if active_skills is not None else frozenset(config.mode(mode_id).active_skills)
        if malfunction.skill not in active:
            reasons.append(RULE_MODE_ACTIVITY)
    failure_count = scene.exceedance_count + (0 if malfunction is None else 1)
    if failure_count != 1:
        reasons.append(RULE_SINGLE_FAULT)
    for prule in config.plausibility_rules:
        if _selector_matches(prule, malfunction) and scene.matches(prule.scene):
            reasons.append(f"{RULE_PLAUSIBILITY}:{prule.id}")
    for srule in config.scene_mode_rules:
        if mode_id in srule.modes and scene.matches(srule.scene):
            reasons.append(f"{RULE_SCENE_MODE}:{srule.id}")
    return tuple(reasons)


def generation_scenes(config: AnalysisConfig) -> list[Scene]:
    """Valid scenes minus explicit generation exclusions (indices keep
    their catalog positions, so event ids survive the exclusion)."""
    excluded = set(config.settings.generation_excluded_scenes)
    return [s for s in enumerate_scenes(config.scene_catalog) if s.id not in excluded]


def generate_events(config: AnalysisConfig, *, nominal: bool | None = None) -> list[Event]:
    """The full deterministic event stream: modes x malfunctions x scenes.

    Order: modes in config order; within a mode, curated malfunctions in
    expansion order, then the nominal block; scenes in enumeration order.
    ``nominal`` overrides ``metadata.analysis.nominal_events``.
    """
    include_nominal = config.settings.nominal_events if nominal is None else nominal
    malfunctions = curated_malfunctions(config)
    scenes = generation_scenes(config)
    events: list[Event] = []
    for mode_index, mode in enumerate(config.modes):
        active = frozenset(mode.active_skills)
        for malfunction_index, malfunction in enumerate(malfunctions):
            for scene in scenes:
                reasons = evaluate_filters(config, mode.id, malfunction, scene, active_skills=active)
                events.append(
                    Event(
                        id=event_id(mode_index, malfunction_index, scene.index),
                        mode=mode.id,
                        malfunction=malfunction,
                        scene=scene,
                        failure_count=scene.exceedance_count + 1,
                        drop_reasons=reasons,
                    )
                )
        if include_nominal:
            for scene in scenes:
                reasons = evaluate_filters(config, mode.id, None, scene, active_skills=active)
                events.append(
                    Event(
                        id=event_id(mode_index, None, scene.index),
                        mode=mode.id,
                        malfunction=None,
                        scene=scene,
                        failure_count=scene.exceedance_count,
                        drop_reasons=reasons,
                    )
                )
    return events


def relevant_events(events: list[Event]) -> list[Event]:
    return [e for e in events if e.relevant]


def _family_of(reason: str) -> str:
    return reason.split(":", 1)[0]


@dataclass(frozen=True)
class ModeStatistics:
    mode: str
    total: int
    relevant: int
    nominal_relevant: int
    drop_counts: tuple[tuple[str, int], ...]  # per family; overlapping
    rule_counts: tuple[tuple[str, int], ...]  # per concrete rule tag; overlapping

    @property
    def dropped(self) -> int:
        return self.total - self.relevant


@dataclass(frozen=True)
class RunStatistics:
    modes: tuple[ModeStatistics, ...]
    total: int
    relevant: int

    def for_mode(self, mode_id: str) -> ModeStatistics:
        for entry in self.modes:
            if entry.mode == mode_id:
                return entry
        raise KeyError(f"no statistics for mode {mode_id!r}")


def statistics(config: AnalysisConfig, events: list[Event]) -> RunStatistics:
    """Per-mode totals. Drop counts are overlapping: an event failing two
    rules counts once under each, so columns may sum past the dropped total.
    """
    per_mode: list[ModeStatistics] = []
    for mode in config.modes:
        mode_events = [e for e in events if e.mode == mode.id]
        relevant = [e for e in mode_events if e.relevant]
        families: dict[str, int] = {family: 0 for family in RULE_FAMILIES}
        rules: dict[str, int] = {}
        for event in mode_events:
            for family in {_family_of(r) for r in event.drop_reasons}:
                families[family] += 1
            for reason in set(event.drop_reasons):
                rules[reason] = rules.get(reason, 0) + 1
        per_mode.append(
            ModeStatistics(
                mode=mode.id,
                total=len(mode_events),
                relevant=len(relevant),
                nominal_relevant=sum(1 for e in relevant if e.nominal),
                drop_counts=tuple((f, families[f]) for f in RULE_FAMILIES),
                rule_counts=tuple(sorted(rules.items())),
            )
        )
    return RunStatistics(
        modes=tuple(per_mode),
        total=len(events),
        relevant=sum(m.relevant for m in per_mode),
    )


@dataclass(frozen=True)
class HazardTriangle:
    """The three legs an assessor checks: what can do harm, what sets it
    off, and what gets harmed."""

    hazardous_element: str
    initiating_mechanism: str
    target: str


def hazard_triangle(config: AnalysisConfig, event: Event) -> HazardTriangle:
    """Triangle legs read from the config's declared dimension roles.

    The initiating mechanism is the malfunction when present, otherwise
    the scene's exceedances.
    """
    element_parts = []
    target_parts = []
    for dimension in config.scene_catalog.dimensions:
        if dimension.triangle_role is None:
            continue
        value = event.scene.value_of(dimension.name)
        if dimension.triangle_role.value == "hazardous_element":
            element_parts.append(value)
        else:
            target_parts.append(value)
    if event.malfunction is not None:
        mechanism = event.malfunction.description
    elif event.scene.exceedances:
        mechanism = "; ".join(
            f"{name}: {event.scene.value_of(name)}" for name in event.scene.exceedances
        )
    else:
        mechanism = "(no initiating mechanism)"
    return HazardTriangle(
        hazardous_element="; ".join(element_parts) if element_parts else "(no role declared)",
        initiating_mechanism=mechanism,
        target="; ".join(target_parts) if target_parts else "(no role declared)",
    )
