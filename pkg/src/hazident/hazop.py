"""Guide word expansion and curation.

Every perception, planning, or action skill is crossed with its
category's guide words: output-scoped words yield one malfunction per
skill, parameter-scoped words one per declared parameter. Curation then
removes expert-excluded candidates by exact id (include overrides
exclude, nothing is matched by pattern).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from hazident.model import (
    AnalysisConfig,
    Curation,
    Guideword,
    GuidewordScope,
    Skill,
)


def slugify(text: str) -> str:
    """Lowercase token for id segments: non-alphanumeric runs become '_'."""
    return re.sub(r"[^a-z0-9]+", "_", text.lower()).strip("_")


@dataclass(frozen=True)
class Malfunction:
    """One candidate failure: a guide word applied to a skill (and parameter)."""

    id: str
    skill: str
    skill_name: str
    guideword: Guideword
    parameter: str | None = None
    description: str = ""
    note: str = ""


def malfunction_description(skill: Skill, word: Guideword, parameter: str | None) -> str:
    """Human phrasing of the deviation, capitalized.

    ``{parameter}`` and ``{skill}`` placeholders in the guide word text are
    substituted; otherwise parameter-scoped words append after the
    parameter ("relative speed too small") and output-scoped words prefix
    the skill name ("Plan trajectory: conflicting").
    """
    text = word.text
    if parameter is not None:
        text = text.replace("{parameter}", parameter) if "{parameter}" in text else f"{parameter} {text}"
    if "{skill}" in text:
        text = text.replace("{skill}", skill.name.lower())
    elif parameter is None:
        text = f"{skill.name}: {text}"
    return text[:1].upper() + text[1:]


def malfunction_id(skill: Skill, word: Guideword, parameter: str | None) -> str:
    base = f"{skill.id}:{slugify(word.text)}"
    return base if parameter is None else f"{base}:{slugify(parameter)}"


def expand_guidewords(config: AnalysisConfig, skill: Skill) -> list[Malfunction]:
    """All malfunction candidates for one skill, in declaration order."""
    result: list[Malfunction] = []
    for word in config.guidewords_for(skill.category):
        if word.scope is GuidewordScope.OUTPUT:
            result.append(
                Malfunction(
                    id=malfunction_id(skill, word, None),
                    skill=skill.id,
                    skill_name=skill.name,
                    guideword=word,
                    description=malfunction_description(skill, word, None),
                )
            )
        else:
            for parameter in skill.parameters:
                result.append(
                    Malfunction(
                        id=malfunction_id(skill, word, parameter),
                        skill=skill.id,
                        skill_name=skill.name,
                        guideword=word,
                        parameter=parameter,
                        description=malfunction_description(skill, word, parameter),
                    )
                )
    return result


def expand_all(config: AnalysisConfig) -> list[Malfunction]:
    """Raw candidate list over every guide-word-eligible skill, config order."""
    result: list[Malfunction] = []
    for skill in config.graph.hazop_skills():
        result.extend(expand_guidewords(config, skill))
    return result


def apply_curation(candidates: list[Malfunction], curation: Curation) -> list[Malfunction]:
    """Drop excluded ids (include wins over exclude), preserving order."""
    excluded = set(curation.exclude) - set(curation.include)
    notes = dict(curation.notes)
    kept = []
    for candidate in candidates:
        if candidate.id in excluded:
            continue
        note = notes.get(candidate.id, "")
        kept.append(replace(candidate, note=note) if note else candidate)
    return kept


def curated_malfunctions(config: AnalysisConfig) -> list[Malfunction]:
    return apply_curation(expand_all(config), config.curation)


def expansion_count(skill: Skill, words: tuple[Guideword, ...]) -> int:
    """Closed-form candidate count: outputs + parameter words x parameters."""
    output_words = sum(1 for w in words if w.scope is GuidewordScope.OUTPUT)
    parameter_words = len(words) - output_words
    return output_words + parameter_words * len(skill.parameters)
