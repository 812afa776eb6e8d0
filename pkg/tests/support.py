"""Test helpers: document builders and independent oracles.

The oracles deliberately avoid the library's enumeration and filtering
code paths: scenes come from a hand-rolled product walk, and filter
verdicts from a straight re-reading of the config rules. Equivalence
tests compare engine output against these.
"""

from __future__ import annotations

import itertools
import json
import random
from typing import Any

from hazident.hazop import curated_malfunctions
from hazident.model import AnalysisConfig, parse_config

# ------------------------------------------------------------- documents


def minimal_document(**overrides: Any) -> dict[str, Any]:
    """Smallest useful config: one skill per layer, two modes, two dims."""
    doc: dict[str, Any] = {
        "skills": [
            {"id": "root", "name": "Operate", "category": "system"},
            {"id": "see", "name": "See obstacles", "category": "perception", "parameters": ["distance"]},
            {"id": "plan", "name": "Plan motion", "category": "planning", "parameters": ["speed"]},
            {"id": "act", "name": "Apply brakes", "category": "action", "parameters": ["force"]},
        ],
        "edges": [["root", "plan"], ["plan", "see"], ["act", "plan"]],
        "modes": [
            {"id": "auto", "name": "Automatic", "active_skills": ["see", "plan", "act"]},
            {"id": "degraded", "name": "Degraded", "active_skills": ["act"]},
        ],
        "scene_dimensions": [
            {"name": "surface", "values": ["dry", "wet", "icy"], "exceedance_values": ["icy"]},
            {"name": "traffic", "values": ["none", "dense"], "triangle_role": "target"},
        ],
        "forbidden_scenes": [],
        "plausibility_rules": [],
        "scene_mode_rules": [],
        "metadata": {"analysis": {"nominal_events": False}},
    }
    doc.update(overrides)
    return doc


def parse_document(doc: dict[str, Any]) -> AnalysisConfig:
    return parse_config(json.dumps(doc))


# ---------------------------------------------------------------- oracles


def oracle_scenes(config: AnalysisConfig) -> list[dict[str, str]]:
    """Scene assignments via an independent product walk (dicts, not Scenes)."""
    dims = config.scene_catalog.dimensions
    if not dims:
        return []
    names = [d.name for d in dims]
    result = []
    for combo in itertools.product(*(d.values for d in dims)):
        assigned = dict(zip(names, combo))
        dead = False
        for rule in config.scene_catalog.forbidden:
            if all(assigned.get(dim) == value for dim, value in rule.when):
                dead = True
                break
        if not dead:
            result.append(assigned)
    return result


def oracle_exceedances(config: AnalysisConfig, assigned: dict[str, str]) -> int:
    count = 0
    for dim in config.scene_catalog.dimensions:
        if assigned[dim.name] in dim.exceedance_values:
            count += 1
    return count


EventKey = tuple[str, str | None, tuple[tuple[str, str], ...]]


def oracle_events(config: AnalysisConfig, *, nominal: bool | None = None) -> dict[EventKey, frozenset[str]]:
    """(mode, malfunction id or None, scene assignment) -> failing-rule set.

    Filtering is re-derived from the config rules from scratch; only the
    curated malfunction list is shared with the engine (its expansion has
    its own oracle).
    """
    include_nominal = config.settings.nominal_events if nominal is None else nominal
    malfunctions = curated_malfunctions(config)
    by_id = {m.id: m for m in malfunctions}
    scenes = oracle_scenes(config)
    excluded = set(config.settings.generation_excluded_scenes)
    if excluded:
        # Exclusions are declared by engine scene id; rebuild those ids the
        # same way the catalog defines them (value index join).
        dims = config.scene_catalog.dimensions
        def sid(assigned: dict[str, str]) -> str:
            return "s" + "-".join(str(d.values.index(assigned[d.name])) for d in dims)
        scenes = [s for s in scenes if sid(s) not in excluded]

    mode_active = {m.id: set(m.active_skills) for m in config.modes}
    result: dict[EventKey, frozenset[str]] = {}
    malf_ids: list[str | None] = [m.id for m in malfunctions]
    if include_nominal:
        malf_ids = malf_ids + [None]
    for mode in config.modes:
        for malf_id in malf_ids:
            for assigned in scenes:
                reasons: set[str] = set()
                malfunction = by_id[malf_id] if malf_id is not None else None
                if malfunction is not None and malfunction.skill not in mode_active[mode.id]:
                    reasons.add("mode-activity")
                failures = oracle_exceedances(config, assigned) + (1 if malfunction else 0)
                if failures != 1:
                    reasons.add("single-fault")
                for rule in config.plausibility_rules:
                    if malfunction is None:
                        selector_ok = not (rule.skills or rule.guidewords or rule.parameters)
                    else:
                        selector_ok = (
                            (not rule.skills or malfunction.skill in rule.skills)
                            and (not rule.guidewords or malfunction.guideword.text in rule.guidewords)
                            and (not rule.parameters or (malfunction.parameter or "") in rule.parameters)
                        )
                    if selector_ok and all(assigned.get(d) == v for d, v in rule.scene):
                        reasons.add(f"plausibility:{rule.id}")
                for rule in config.scene_mode_rules:
                    if mode.id in rule.modes and all(assigned.get(d) == v for d, v in rule.scene):
                        reasons.add(f"scene-mode:{rule.id}")
                key = (mode.id, malf_id, tuple(sorted(assigned.items())))
                result[key] = frozenset(reasons)
    return result


def engine_key(event) -> EventKey:
    return (
        event.mode,
        event.malfunction.id if event.malfunction else None,
        tuple(sorted(event.scene.values)),
    )


# ------------------------------------------------------- random toy configs

CATEGORY_CHOICES = ("perception", "planning", "action")


def random_document(rng: random.Random) -> dict[str, Any]:
    """A small random-but-valid config; candidate volume stays below ~1000."""
    skills: list[dict[str, Any]] = [{"id": "sys", "name": "System", "category": "system"}]
    n_hazop = rng.randint(1, 4)
    parameter_pool = ["alpha", "beta", "gamma"]
    for i in range(n_hazop):
        params = rng.sample(parameter_pool, rng.randint(0, 2))
        skills.append(
            {
                "id": f"skill{i}",
                "name": f"Skill {i}",
                "category": rng.choice(CATEGORY_CHOICES),
                "parameters": params,
            }
        )
    # Acyclic by construction: dependents only reference earlier skills.
    edges = []
    for i in range(1, n_hazop):
        if rng.random() < 0.5:
            edges.append([f"skill{i}", f"skill{rng.randrange(i)}"])

    modes = []
    hazop_ids = [s["id"] for s in skills[1:]]
    for i in range(rng.randint(1, 3)):
        active = [sid for sid in hazop_ids if rng.random() < 0.7]
        modes.append({"id": f"mode{i}", "name": f"Mode {i}", "active_skills": active})

    dims = []
    n_dims = rng.randint(2, 4)
    for i in range(n_dims):
        n_values = rng.randint(1, 3)
        values = [f"v{i}{j}" for j in range(n_values)]
        exceedance = [v for v in values if rng.random() < 0.3]
        dims.append({"name": f"dim{i}", "values": values, "exceedance_values": exceedance})

    def random_literals() -> dict[str, str]:
        chosen = rng.sample(dims, rng.randint(1, min(2, len(dims))))
        return {d["name"]: rng.choice(d["values"]) for d in chosen}

    forbidden = [
        {"id": f"fb{i}", "when": random_literals()} for i in range(rng.randint(0, 2))
    ]
    guideword_texts = ["no", "nonexistent", "erroneous", "too large", "too small",
                       "not relevant", "relevant {parameter} not", "conflicting",
                       "physically not possible", "absent", "wrong", "unattended"]
    plausibility = []
    for i in range(rng.randint(0, 2)):
        selector: dict[str, list[str]] = {}
        if rng.random() < 0.7:
            selector["skills"] = rng.sample(hazop_ids, rng.randint(1, len(hazop_ids)))
        if rng.random() < 0.4:
            selector["guidewords"] = rng.sample(guideword_texts, rng.randint(1, 2))
        plausibility.append(
            {"id": f"pl{i}", "malfunction": selector, "scene": random_literals()}
        )
    scene_mode = []
    if rng.random() < 0.5:
        scene_mode.append(
            {
                "id": "sm0",
                "modes": rng.sample([m["id"] for m in modes], rng.randint(1, len(modes))),
                "scene": random_literals(),
            }
        )
    return {
        "skills": skills,
        "edges": edges,
        "modes": modes,
        "scene_dimensions": dims,
        "forbidden_scenes": forbidden,
        "plausibility_rules": plausibility,
        "scene_mode_rules": scene_mode,
        "metadata": {
            "analysis": {
                "nominal_events": rng.random() < 0.5,
                "max_exceedances": rng.randint(0, 2),
            }
        },
    }
