from __future__ import annotations

import json

import support
from hazident.events import (
    RULE_MODE_ACTIVITY,
    RULE_SINGLE_FAULT,
    evaluate_filters,
    generate_events,
    generation_scenes,
    hazard_triangle,
    relevant_events,
    statistics,
)
from hazident.hazop import curated_malfunctions
from hazident.model import parse_config
from hazident.scenes import enumerate_scenes


def toy_config(**overrides):
    return support.parse_document(support.minimal_document(**overrides))


class TestGeneration:
    def test_volume_is_modes_times_malfunctions_times_scenes(self):
        config = toy_config()
        malfunctions = curated_malfunctions(config)
        scenes = enumerate_scenes(config.scene_catalog)
        events = generate_events(config)
        # Expansion: perception 2+3p, planning 2+2p, action 3+2p with one
        # parameter each -> 5 + 4 + 5; two modes, six scenes, nominal off.
        assert len(malfunctions) == 14
        assert len(scenes) == 6
        assert len(events) == 2 * 14 * 6

    def test_nominal_switch_adds_scene_block_per_mode(self):
        config = toy_config()
        base = len(generate_events(config))
        with_nominal = len(generate_events(config, nominal=True))
        assert with_nominal == base + 2 * 6

    def test_nominal_defaults_on_without_metadata(self):
        doc = support.minimal_document()
        doc["metadata"] = {}
        config = support.parse_document(doc)
        events = generate_events(config)
        assert any(e.nominal for e in events)

    def test_event_ids_encode_config_order(self):
        config = toy_config()
        events = generate_events(config, nominal=True)
        assert events[0].id == "m00-f000-s0000"
        nominal = [e for e in events if e.nominal]
        assert nominal[0].id == "m00-nom-s0000"
        # Order: per mode, malfunction blocks then the nominal block.
        modes = [e.mode for e in events]
        assert modes == sorted(modes, key=["auto", "degraded"].index)

    def test_failure_count(self):
        config = toy_config()
        for event in generate_events(config, nominal=True):
            expected = event.scene.exceedance_count + (0 if event.nominal else 1)
            assert event.failure_count == expected

    def test_generation_exclusion_preserves_indices(self):
        doc = support.minimal_document()
        doc["metadata"]["analysis"]["generation_excluded_scenes"] = ["s0-1"]
        config = support.parse_document(doc)
        scenes = generation_scenes(config)
        assert [s.id for s in scenes] == ["s0-0", "s1-0", "s1-1", "s2-0", "s2-1"]
        # Indices keep their catalog positions so event ids stay comparable.
        assert [s.index for s in scenes] == [0, 2, 3, 4, 5]


class TestFilters:
    def test_mode_activity(self):
        config = toy_config()
        [see_no] = [m for m in curated_malfunctions(config) if m.id == "see:no"]
        clean = [s for s in enumerate_scenes(config.scene_catalog) if s.exceedance_count == 0][0]
        assert evaluate_filters(config, "auto", see_no, clean) == ()
        # "degraded" only activates the action skill.
        assert RULE_MODE_ACTIVITY in evaluate_filters(config, "degraded", see_no, clean)

    def test_single_fault_drops_zero_and_two_failures(self):
        config = toy_config()
        scenes = enumerate_scenes(config.scene_catalog)
        clean = next(s for s in scenes if s.exceedance_count == 0)
        exceeded = next(s for s in scenes if s.exceedance_count == 1)
        [malf] = [m for m in curated_malfunctions(config) if m.id == "act:absent"]
        assert evaluate_filters(config, "auto", malf, clean) == ()
        assert evaluate_filters(config, "auto", malf, exceeded) == (RULE_SINGLE_FAULT,)
        assert evaluate_filters(config, "auto", None, clean) == (RULE_SINGLE_FAULT,)
        assert evaluate_filters(config, "auto", None, exceeded) == ()

    def test_all_reasons_collected_without_short_circuit(self):
        config = toy_config()
        scenes = enumerate_scenes(config.scene_catalog)
        exceeded = next(s for s in scenes if s.exceedance_count == 1)
        [see_no] = [m for m in curated_malfunctions(config) if m.id == "see:no"]
        reasons = evaluate_filters(config, "degraded", see_no, exceeded)
        assert set(reasons) == {RULE_MODE_ACTIVITY, RULE_SINGLE_FAULT}

    def test_plausibility_selector_and_scene_must_both_match(self):
        doc = support.minimal_document()
        doc["plausibility_rules"] = [
            {
                "id": "wet-brakes",
                "malfunction": {"skills": ["act"], "guidewords": ["absent"]},
                "scene": {"surface": "wet"},
            }
        ]
        config = support.parse_document(doc)
        scenes = enumerate_scenes(config.scene_catalog)
        wet = next(s for s in scenes if s.value_of("surface") == "wet")
        dry = next(s for s in scenes if s.value_of("surface") == "dry")
        malfs = {m.id: m for m in curated_malfunctions(config)}
        assert "plausibility:wet-brakes" in evaluate_filters(config, "auto", malfs["act:absent"], wet)
        assert evaluate_filters(config, "auto", malfs["act:absent"], dry) == ()
        assert evaluate_filters(config, "auto", malfs["act:wrong"], wet) == ()

    def test_unconstrained_selector_hits_nominal(self):
        doc = support.minimal_document()
        doc["plausibility_rules"] = [
            {"id": "never-icy", "malfunction": {}, "scene": {"surface": "icy"}}
        ]
        config = support.parse_document(doc)
        icy = next(
            s for s in enumerate_scenes(config.scene_catalog) if s.value_of("surface") == "icy"
        )
        assert "plausibility:never-icy" in evaluate_filters(config, "auto", None, icy)

    def test_constrained_selector_skips_nominal(self):
        doc = support.minimal_document()
        doc["plausibility_rules"] = [
            {"id": "p", "malfunction": {"skills": ["act"]}, "scene": {"surface": "icy"}}
        ]
        config = support.parse_document(doc)
        icy = next(
            s for s in enumerate_scenes(config.scene_catalog) if s.value_of("surface") == "icy"
        )
        assert evaluate_filters(config, "auto", None, icy) == ()

    def test_scene_mode_rule(self):
        doc = support.minimal_document()
        doc["scene_mode_rules"] = [
            {"id": "no-dense-degraded", "modes": ["degraded"], "scene": {"traffic": "dense"}}
        ]
        config = support.parse_document(doc)
        dense = next(
            s for s in enumerate_scenes(config.scene_catalog) if s.value_of("traffic") == "dense"
        )
        [malf] = [m for m in curated_malfunctions(config) if m.id == "act:absent"]
        assert "scene-mode:no-dense-degraded" in evaluate_filters(config, "degraded", malf, dense)
        assert evaluate_filters(config, "auto", malf, dense) == ()


class TestStatistics:
    def test_totals_and_relevant(self):
        config = toy_config()
        events = generate_events(config)
        stats = statistics(config, events)
        assert stats.total == len(events)
        assert stats.relevant == len(relevant_events(events))
        assert sum(m.total for m in stats.modes) == stats.total

    def test_overlapping_drop_counts(self):
        config = toy_config()
        events = generate_events(config)
        stats = statistics(config, events)
        degraded = stats.for_mode("degraded")
        counts = dict(degraded.drop_counts)
        # 9 malfunctions from inactive skills x 6 scenes fail mode-activity;
        # every malfunction fails single-fault on the 2 exceedance scenes.
        # The 18 events failing both count in each column, so the columns
        # sum past the dropped total.
        assert counts["mode-activity"] == 9 * 6
        assert counts["single-fault"] == 14 * 2
        assert degraded.dropped == 9 * 6 + 5 * 2
        assert counts["mode-activity"] + counts["single-fault"] > degraded.dropped

    def test_oracle_equivalence_on_toy(self):
        config = toy_config()
        events = generate_events(config)
        oracle = support.oracle_events(config)
        assert len(events) == len(oracle)
        for event in events:
            assert frozenset(event.drop_reasons) == oracle[support.engine_key(event)]


class TestHazardTriangle:
    def test_malfunction_is_the_mechanism(self):
        config = toy_config()
        events = generate_events(config)
        event = next(e for e in relevant_events(events))
        triangle = hazard_triangle(config, event)
        assert triangle.initiating_mechanism == event.malfunction.description
        assert triangle.target == event.scene.value_of("traffic")
        assert triangle.hazardous_element == "(no role declared)"

    def test_exceedance_is_the_mechanism_for_nominal(self):
        config = toy_config()
        events = generate_events(config, nominal=True)
        event = next(e for e in events if e.nominal and e.scene.exceedance_count == 1)
        triangle = hazard_triangle(config, event)
        assert triangle.initiating_mechanism == "surface: icy"

    def test_nominal_clean_scene(self):
        config = toy_config()
        events = generate_events(config, nominal=True)
        event = next(e for e in events if e.nominal and e.scene.exceedance_count == 0)
        assert hazard_triangle(config, event).initiating_mechanism == "(no initiating mechanism)"

    def test_roles_joined_in_dimension_order(self, afas_config, afas_events):
        event = next(e for e in afas_events if e.id == "m02-f013-s0062")
        triangle = hazard_triangle(afas_config, event)
        assert triangle.hazardous_element == "driving at 10 km/h"
        assert triangle.target == "vulnerable object; moving traffic"
        assert triangle.initiating_mechanism == "Relevant object not considered"
