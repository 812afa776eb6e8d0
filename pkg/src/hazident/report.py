"""Human-facing renderings: event cards, statistics tables, CSV, markdown.

Everything here is a pure function of config plus generated artifacts —
no timestamps, no environment reads — so report output is byte-stable
for a given run.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from hazident.events import Event, RunStatistics
from hazident.model import AnalysisConfig, CardLayoutRow
from hazident.scenes import enumerate_scenes

NOMINAL_SKILL = "—"
NOMINAL_MALFUNCTION = "(nominal — no malfunction)"


def _capitalize(text: str) -> str:
    return text[:1].upper() + text[1:]


def _dimension_label(name: str) -> str:
    return _capitalize(name.replace("_", " "))


def _render_layout_row(row: CardLayoutRow, event: Event) -> str:
    values = [event.scene.value_of(d) for d in row.dimensions]
    if row.style == "left_right" and len(values) == 2:
        return _capitalize(f"{values[0]} (left) and {values[1]} (right)")
    if row.style == "with":
        return _capitalize(" with ".join(values))
    if row.style == "same_or_list":
        if len(set(values)) == 1:
            # The joint label reads as a predicate ("valid"), so it stays
            # lowercased.
            return values[0]
        return ", ".join(
            f"{d.replace('_', ' ')}: {v}" for d, v in zip(row.dimensions, values)
        )
    return _capitalize("; ".join(values))


def card_rows(config: AnalysisConfig, event: Event) -> list[tuple[str, str]]:
    """Ordered (label, value) pairs of the review card for one event.

    The scene block follows ``metadata.card_layout`` when declared and
    falls back to one row per dimension otherwise.
    """
    mode = config.mode(event.mode)
    rows = [("Operating mode", mode.name)]
    if event.malfunction is not None:
        rows.append(("Skill", event.malfunction.skill_name))
        rows.append(("Malfunction", event.malfunction.description))
    else:
        rows.append(("Skill", NOMINAL_SKILL))
        rows.append(("Malfunction", NOMINAL_MALFUNCTION))
    if config.card_layout:
        for layout_row in config.card_layout:
            rows.append((layout_row.label, _render_layout_row(layout_row, event)))
    else:
        for name, value in event.scene.values:
            rows.append((_dimension_label(name), _capitalize(value)))
    return rows


def render_card(config: AnalysisConfig, event: Event) -> str:
    header = f"Potential hazardous event {event.id}"
    lines = [header] + [f"{label}: {value}" for label, value in card_rows(config, event)]
    if not event.relevant:
        lines.append("Dropped by: " + ", ".join(event.drop_reasons))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CatalogSummary:
    catalog_scenes: int
    within_budget: int
    generation_scenes: int
    max_exceedances: int


def catalog_summary(config: AnalysisConfig) -> CatalogSummary:
    scenes = enumerate_scenes(config.scene_catalog)
    budget = config.settings.max_exceedances
    excluded = set(config.settings.generation_excluded_scenes)
    return CatalogSummary(
        catalog_scenes=len(scenes),
        within_budget=sum(1 for s in scenes if s.exceedance_count <= budget),
        generation_scenes=sum(1 for s in scenes if s.id not in excluded),
        max_exceedances=budget,
    )


def format_table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def fmt(row: list[str]) -> str:
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines)


def _signed(delta: int) -> str:
    return f"{delta:+d}"


def render_statistics(
    config: AnalysisConfig,
    stats: RunStatistics,
    *,
    hazardous_by_mode: dict[str, int] | None = None,
) -> str:
    """Plain-text per-mode summary with deltas against any published counts.

    ``hazardous_by_mode`` comes from review assessments when a run is
    loaded; without it the hazardous columns are omitted.
    """
    summary = catalog_summary(config)
    references = {r.mode: r for r in config.reference_counts}
    mode_names = {m.id: m.name for m in config.modes}

    lines: list[str] = []
    name = str(config.metadata.get("name", "")) or "(unnamed config)"
    version = str(config.metadata.get("version", ""))
    lines.append(f"Configuration: {name}" + (f" (version {version})" if version else ""))
    lines.append(
        f"Skill graph: {len(config.graph.skills)} skills, "
        f"{len(config.graph.hazop_skills())} eligible for guide word expansion"
    )
    from hazident.hazop import curated_malfunctions, expand_all

    lines.append(
        f"Malfunctions: {len(expand_all(config))} raw candidates, "
        f"{len(curated_malfunctions(config))} after curation"
    )
    lines.append(
        f"Scene catalog: {summary.catalog_scenes} valid scenes, "
        f"{summary.within_budget} within the exceedance budget (<= {summary.max_exceedances})"
    )
    if summary.generation_scenes != summary.catalog_scenes:
        lines.append(
            f"Generation uses {summary.generation_scenes} of {summary.catalog_scenes} scenes "
            f"({summary.catalog_scenes - summary.generation_scenes} pre-excluded by "
            "metadata.analysis.generation_excluded_scenes)"
        )
    lines.append(f"Events: {stats.total} total, {stats.relevant} relevant")
    lines.append("")

    has_refs = bool(references)
    headers = ["Mode", "Events", "Relevant"]
    if has_refs:
        headers += ["Published relevant", "Delta"]
    if hazardous_by_mode is not None:
        headers += ["Hazardous (assessed)"]
        if has_refs:
            headers += ["Published hazardous", "Delta"]
    rows: list[list[str]] = []
    for mode_stats in stats.modes:
        ref = references.get(mode_stats.mode)
        row = [mode_names.get(mode_stats.mode, mode_stats.mode), str(mode_stats.total), str(mode_stats.relevant)]
        if has_refs:
            if ref and ref.relevant is not None:
                row += [str(ref.relevant), _signed(mode_stats.relevant - ref.relevant)]
            else:
                row += ["-", "-"]
        if hazardous_by_mode is not None:
            hazardous = hazardous_by_mode.get(mode_stats.mode, 0)
            row += [str(hazardous)]
            if has_refs:
                if ref and ref.hazardous is not None:
                    row += [str(ref.hazardous), _signed(hazardous - ref.hazardous)]
                else:
                    row += ["-", "-"]
        rows.append(row)
    lines.append(format_table(headers, rows))
    lines.append("")

    drop_headers = ["Mode", "Dropped", "mode-activity", "single-fault", "plausibility", "scene-mode"]
    drop_rows = []
    for mode_stats in stats.modes:
        counts = dict(mode_stats.drop_counts)
        drop_rows.append(
            [
                mode_names.get(mode_stats.mode, mode_stats.mode),
                str(mode_stats.dropped),
                str(counts.get("mode-activity", 0)),
                str(counts.get("single-fault", 0)),
                str(counts.get("plausibility", 0)),
                str(counts.get("scene-mode", 0)),
            ]
        )
    lines.append(format_table(drop_headers, drop_rows))
    lines.append(
        "Note: rule columns overlap — an event dropped by several rules counts under each, "
        "so columns may sum past the dropped total."
    )

    notes = config.metadata.get("notes", [])
    if notes:
        lines.append("")
        lines.append("Notes:")
        for note in notes:
            lines.append(f"  - {note}")
    return "\n".join(lines) + "\n"


def events_to_csv(config: AnalysisConfig, events: list[Event]) -> str:
    """Delimited event table; one scene_<dimension> column per dimension."""
    dims = config.scene_catalog.dimension_names()
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        [
            "id",
            "mode",
            "malfunction_id",
            "skill",
            "guideword",
            "parameter",
            "malfunction",
            "scene_id",
            "failure_count",
            "relevant",
            "drop_reasons",
            *(f"scene_{d}" for d in dims),
        ]
    )
    for event in events:
        m = event.malfunction
        writer.writerow(
            [
                event.id,
                event.mode,
                m.id if m else "",
                m.skill if m else "",
                m.guideword.text if m else "",
                (m.parameter or "") if m else "",
                m.description if m else "",
                event.scene.id,
                event.failure_count,
                "1" if event.relevant else "0",
                ";".join(event.drop_reasons),
                *(event.scene.value_of(d) for d in dims),
            ]
        )
    return buffer.getvalue()


def assessments_to_csv(assessments: list) -> str:
    """Append-order assessment log as CSV (one row per write, not per event)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["seq", "event_id", "status", "rationale", "assessor"])
    for a in assessments:
        writer.writerow([a.seq, a.event_id, a.status.value, a.rationale, a.assessor])
    return buffer.getvalue()


def _markdown_table(headers: list[str], rows: list[list[str]]) -> str:
    lines = ["| " + " | ".join(headers) + " |", "|" + "|".join(" --- " for _ in headers) + "|"]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return "\n".join(lines)


def render_markdown(
    config: AnalysisConfig,
    stats: RunStatistics,
    *,
    hazardous_by_mode: dict[str, int] | None = None,
    progress: dict | None = None,
    sample_events: list[Event] | None = None,
) -> str:
    """Full markdown report for a run (stable bytes; no timestamps)."""
    summary = catalog_summary(config)
    references = {r.mode: r for r in config.reference_counts}
    mode_names = {m.id: m.name for m in config.modes}
    from hazident.hazop import curated_malfunctions, expand_all

    name = str(config.metadata.get("name", "")) or "(unnamed config)"
    version = str(config.metadata.get("version", ""))
    lines = [f"# Hazard identification report — {name}" + (f" v{version}" if version else ""), ""]
    lines += [
        "## Inputs",
        "",
        f"- Skills: {len(config.graph.skills)} ({len(config.graph.hazop_skills())} guide-word eligible)",
        f"- Malfunctions: {len(expand_all(config))} raw, {len(curated_malfunctions(config))} curated",
        f"- Scene catalog: {summary.catalog_scenes} valid scenes, "
        f"{summary.within_budget} within the exceedance budget (<= {summary.max_exceedances})",
        f"- Generation scenes: {summary.generation_scenes}",
        f"- Operating modes: {len(config.modes)}",
        f"- Nominal events: {'on' if config.settings.nominal_events else 'off'}",
        "",
        "## Events per mode",
        "",
    ]
    headers = ["Mode", "Events", "Relevant"]
    if references:
        headers += ["Published relevant", "Delta"]
    if hazardous_by_mode is not None:
        headers += ["Hazardous (assessed)"]
        if references:
            headers += ["Published hazardous", "Delta"]
    rows = []
    for mode_stats in stats.modes:
        ref = references.get(mode_stats.mode)
        row = [mode_names.get(mode_stats.mode, mode_stats.mode), str(mode_stats.total), str(mode_stats.relevant)]
        if references:
            row += (
                [str(ref.relevant), _signed(mode_stats.relevant - ref.relevant)]
                if ref and ref.relevant is not None
                else ["-", "-"]
            )
        if hazardous_by_mode is not None:
            hazardous = hazardous_by_mode.get(mode_stats.mode, 0)
            row += [str(hazardous)]
            if references:
                row += (
                    [str(ref.hazardous), _signed(hazardous - ref.hazardous)]
                    if ref and ref.hazardous is not None
                    else ["-", "-"]
                )
        rows.append(row)
    lines.append(_markdown_table(headers, rows))
    lines += ["", "## Dropped events by rule", ""]
    drop_rows = [
        [
            mode_names.get(m.mode, m.mode),
            str(m.dropped),
            *(str(dict(m.drop_counts).get(k, 0)) for k in ("mode-activity", "single-fault", "plausibility", "scene-mode")),
        ]
        for m in stats.modes
    ]
    lines.append(
        _markdown_table(
            ["Mode", "Dropped", "mode-activity", "single-fault", "plausibility", "scene-mode"], drop_rows
        )
    )
    lines += [
        "",
        "Rule columns overlap: an event dropped by several rules counts under each, "
        "so columns may sum past the dropped total.",
    ]
    if progress is not None:
        lines += [
            "",
            "## Review progress",
            "",
            f"- Relevant events: {progress['relevant']}",
            f"- Assessed: {progress['assessed']} (remaining {progress['remaining']})",
        ]
        for status, count in sorted(progress.get("by_status", {}).items()):
            lines.append(f"- {status}: {count}")
    if sample_events:
        lines += ["", "## Example cards", ""]
        for event in sample_events:
            lines.append("```")
            lines.append(render_card(config, event).rstrip("\n"))
            lines.append("```")
            lines.append("")
    notes = config.metadata.get("notes", [])
    if notes:
        lines += ["## Notes", ""]
        lines.extend(f"- {note}" for note in notes)
        lines.append("")
    text = "\n".join(lines)
    return text if text.endswith("\n") else text + "\n"
