from __future__ import annotations

import dataclasses
import json

import pytest

import support
from hazident.model import (
    AnalysisConfig,
    CardLayoutRow,
    ConfigReferenceError,
    ConfigSchemaError,
    ConfigSyntaxError,
    Curation,
    ForbiddenRule,
    OperatingMode,
    PlausibilityRule,
    ReferenceCounts,
    SceneModeRule,
    Skill,
    SkillCategory,
    SkillGraph,
    errors_of,
    parse_config,
    serialize_config,
    validate_config,
)


def doc_text(**overrides) -> str:
    return json.dumps(support.minimal_document(**overrides))


class TestParse:
    def test_minimal_document(self):
        config = support.parse_document(support.minimal_document())
        assert config.graph.root == "root"
        assert [s.id for s in config.graph.hazop_skills()] == ["see", "plan", "act"]
        assert config.mode("auto").name == "Automatic"
        assert config.scene_catalog.dimension("surface").exceedance_values == ("icy",)
        assert config.settings.nominal_events is False
        assert config.settings.max_exceedances == 1

    def test_syntax_error_reports_position(self):
        with pytest.raises(ConfigSyntaxError, match=r"line 1"):
            parse_config("{nope")

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigSchemaError, match="unknown field"):
            parse_config(doc_text(surprise=[]))

    def test_wrong_type(self):
        with pytest.raises(ConfigSchemaError, match="skills: expected array"):
            parse_config(json.dumps(support.minimal_document(skills={})))

    def test_missing_required_field(self):
        doc = support.minimal_document()
        del doc["skills"][0]["name"]
        with pytest.raises(ConfigSchemaError, match="missing required field 'name'"):
            support.parse_document(doc)

    def test_unknown_category_lists_allowed(self):
        doc = support.minimal_document()
        doc["skills"][1]["category"] = "flying"
        with pytest.raises(ConfigSchemaError, match="allowed: system, sensor"):
            support.parse_document(doc)

    def test_guidewords_rejected_for_non_hazop_category(self):
        doc = support.minimal_document()
        doc["guidewords"] = {"sensor": {"words": []}}
        with pytest.raises(ConfigSchemaError, match="only to perception, planning and action"):
            support.parse_document(doc)

    def test_bad_guideword_scope(self):
        doc = support.minimal_document()
        doc["guidewords"] = {"perception": {"words": [{"text": "no", "scope": "sideways"}]}}
        with pytest.raises(ConfigSchemaError, match="'output' or 'parameter'"):
            support.parse_document(doc)

    def test_edge_must_be_pair(self):
        doc = support.minimal_document()
        doc["edges"].append(["a", "b", "c"])
        with pytest.raises(ConfigSchemaError, match=r"edges\[3\]"):
            support.parse_document(doc)

    def test_bool_field_rejects_string(self):
        doc = support.minimal_document()
        doc["metadata"]["analysis"]["nominal_events"] = "yes"
        with pytest.raises(ConfigSchemaError, match="expected boolean"):
            support.parse_document(doc)

    def test_card_layout_style_checked(self):
        doc = support.minimal_document()
        doc["metadata"]["card_layout"] = [
            {"label": "Surface", "dimensions": ["surface"], "style": "fancy"}
        ]
        with pytest.raises(ConfigSchemaError, match="fancy"):
            support.parse_document(doc)

    @pytest.mark.parametrize(
        "mutate, expected",
        [
            (lambda d: d["modes"][0]["active_skills"].append("ghost"), "ghost"),
            (lambda d: d["edges"].append(["see", "ghost"]), "ghost"),
            (
                lambda d: d["forbidden_scenes"].append({"id": "f", "when": {"nope": "dry"}}),
                "nope",
            ),
            (
                lambda d: d["forbidden_scenes"].append({"id": "f", "when": {"surface": "lava"}}),
                "lava",
            ),
            (
                lambda d: d["plausibility_rules"].append(
                    {"id": "p", "malfunction": {"skills": ["ghost"]}, "scene": {}}
                ),
                "ghost",
            ),
            (
                lambda d: d["scene_mode_rules"].append(
                    {"id": "s", "modes": ["ghost"], "scene": {"surface": "dry"}}
                ),
                "ghost",
            ),
            (
                lambda d: d["metadata"].update(
                    {"card_layout": [{"label": "X", "dimensions": ["nope"]}]}
                ),
                "nope",
            ),
            (
                lambda d: d["metadata"].update({"reference_counts": {"ghost": {"events": 1}}}),
                "ghost",
            ),
        ],
    )
    def test_dangling_reference_names_offender(self, mutate, expected):
        doc = support.minimal_document()
        mutate(doc)
        with pytest.raises(ConfigReferenceError, match=expected):
            support.parse_document(doc)

    def test_identical_bytes_identical_config(self):
        text = doc_text()
        assert parse_config(text) == parse_config(text)


class TestRoundTrip:
    def test_minimal_round_trip(self):
        config = support.parse_document(support.minimal_document())
        assert parse_config(serialize_config(config)) == config

    def test_afas_round_trip(self, afas_config):
        assert parse_config(serialize_config(afas_config)) == afas_config

    def test_declared_guidewords_survive(self):
        doc = support.minimal_document()
        doc["guidewords"] = {
            "action": {
                "replace_defaults": True,
                "words": [{"text": "late", "scope": "output"}],
            }
        }
        config = support.parse_document(doc)
        again = parse_config(serialize_config(config))
        assert again == config
        assert [w.text for w in again.guidewords_for(SkillCategory.ACTION)] == ["late"]
        # Undeclared categories still resolve to defaults.
        assert [w.text for w in again.guidewords_for(SkillCategory.PERCEPTION)][:2] == [
            "no",
            "nonexistent",
        ]


def single_error(config: AnalysisConfig, code: str) -> None:
    errors = errors_of(validate_config(config))
    assert [f.code for f in errors] == [code], [str(f) for f in errors]


class TestValidateErrors:
    def test_valid_config_has_no_errors(self):
        config = support.parse_document(support.minimal_document())
        assert errors_of(validate_config(config)) == []

    def test_empty_config_is_valid(self):
        config = parse_config("{}")
        assert errors_of(validate_config(config)) == []

    def test_cycle_reports_witness(self):
        doc = support.minimal_document()
        doc["edges"].append(["see", "act"])  # act -> plan -> see -> act closes a loop
        config = support.parse_document(doc)
        errors = errors_of(validate_config(config))
        assert [f.code for f in errors] == ["graph-cycle"]
        witness = errors[0].message
        assert "->" in witness
        # The witness is a closed path over real skill ids.
        ids = witness.split(": ", 1)[1].split(" -> ")
        assert ids[0] == ids[-1]
        assert set(ids) <= {"see", "plan", "act"}

    def test_two_system_skills(self):
        doc = support.minimal_document()
        doc["skills"].append({"id": "root2", "name": "Other", "category": "system"})
        single_error(support.parse_document(doc), "system-skill-count")

    def test_no_system_skill_with_skills_present(self):
        doc = support.minimal_document()
        doc["skills"] = doc["skills"][1:]
        doc["edges"] = [e for e in doc["edges"] if e[0] != "root"]
        single_error(support.parse_document(doc), "system-skill-count")

    def test_root_mismatch(self):
        config = support.parse_document(support.minimal_document())
        graph = dataclasses.replace(config.graph, root="see")
        single_error(dataclasses.replace(config, graph=graph), "root-mismatch")

    def test_edge_with_unknown_endpoint(self):
        config = support.parse_document(support.minimal_document())
        graph = dataclasses.replace(config.graph, edges=config.graph.edges + (("see", "ghost"),))
        single_error(dataclasses.replace(config, graph=graph), "edge-reference")

    def test_duplicate_skill_id(self):
        doc = support.minimal_document()
        doc["skills"].append(dict(doc["skills"][1]))
        single_error(support.parse_document(doc), "skill-duplicate")

    def test_duplicate_parameter(self):
        doc = support.minimal_document()
        doc["skills"][1]["parameters"] = ["distance", "distance"]
        single_error(support.parse_document(doc), "parameter-duplicate")

    def test_duplicate_mode_id(self):
        doc = support.minimal_document()
        doc["modes"].append(dict(doc["modes"][0]))
        single_error(support.parse_document(doc), "mode-duplicate")

    def test_mode_with_unknown_skill(self):
        config = support.parse_document(support.minimal_document())
        modes = (
            dataclasses.replace(config.modes[0], active_skills=("see", "ghost")),
            config.modes[1],
        )
        single_error(dataclasses.replace(config, modes=modes), "mode-skill-reference")

    def test_duplicate_dimension(self):
        doc = support.minimal_document()
        doc["scene_dimensions"].append(dict(doc["scene_dimensions"][0]))
        single_error(support.parse_document(doc), "dimension-duplicate")

    def test_duplicate_value(self):
        doc = support.minimal_document()
        doc["scene_dimensions"][0]["values"] = ["dry", "dry"]
        doc["scene_dimensions"][0]["exceedance_values"] = []
        single_error(support.parse_document(doc), "value-duplicate")

    def test_empty_dimension(self):
        doc = support.minimal_document()
        doc["scene_dimensions"][0]["values"] = []
        doc["scene_dimensions"][0]["exceedance_values"] = []
        single_error(support.parse_document(doc), "dimension-empty")

    def test_exceedance_value_not_in_values(self):
        config = support.parse_document(support.minimal_document())
        dims = list(config.scene_catalog.dimensions)
        dims[0] = dataclasses.replace(dims[0], exceedance_values=("molten",))
        catalog = dataclasses.replace(config.scene_catalog, dimensions=tuple(dims))
        single_error(dataclasses.replace(config, scene_catalog=catalog), "exceedance-reference")

    def test_forbidden_rule_unknown_value(self):
        config = support.parse_document(support.minimal_document())
        catalog = dataclasses.replace(
            config.scene_catalog,
            forbidden=(ForbiddenRule(id="f", when=(("surface", "lava"),)),),
        )
        single_error(dataclasses.replace(config, scene_catalog=catalog), "forbidden-reference")

    def test_plausibility_unknown_guideword(self):
        doc = support.minimal_document()
        doc["plausibility_rules"] = [
            {"id": "p", "malfunction": {"guidewords": ["backwards"]}, "scene": {"surface": "dry"}}
        ]
        single_error(support.parse_document(doc), "plausibility-reference")

    def test_scene_mode_unknown_mode(self):
        config = support.parse_document(support.minimal_document())
        rules = (SceneModeRule(id="s", modes=("ghost",), scene=(("surface", "dry"),)),)
        single_error(dataclasses.replace(config, scene_mode_rules=rules), "scene-mode-reference")

    def test_negative_exceedance_budget(self):
        doc = support.minimal_document()
        doc["metadata"]["analysis"]["max_exceedances"] = -1
        single_error(support.parse_document(doc), "settings-range")

    def test_curation_unknown_id(self):
        doc = support.minimal_document()
        doc["curation"] = {"exclude": ["see:upside_down"]}
        single_error(support.parse_document(doc), "curation-reference")

    def test_curation_duplicate(self):
        doc = support.minimal_document()
        doc["curation"] = {"exclude": ["see:no", "see:no"]}
        single_error(support.parse_document(doc), "curation-duplicate")

    def test_generation_exclusion_unknown_scene(self):
        doc = support.minimal_document()
        doc["metadata"]["analysis"]["generation_excluded_scenes"] = ["s9-9"]
        single_error(support.parse_document(doc), "scene-exclusion-reference")

    def test_duplicate_guideword(self):
        doc = support.minimal_document()
        doc["guidewords"] = {
            "perception": {
                "replace_defaults": True,
                "words": [
                    {"text": "no", "scope": "output"},
                    {"text": "no", "scope": "output"},
                ],
            }
        }
        single_error(support.parse_document(doc), "guideword-duplicate")

    def test_card_layout_unknown_dimension(self):
        config = support.parse_document(support.minimal_document())
        layout = (CardLayoutRow(label="X", dimensions=("nope",)),)
        single_error(dataclasses.replace(config, card_layout=layout), "card-layout-reference")

    def test_reference_counts_unknown_mode(self):
        config = support.parse_document(support.minimal_document())
        refs = (ReferenceCounts(mode="ghost", relevant=1),)
        single_error(dataclasses.replace(config, reference_counts=refs), "reference-counts-reference")


class TestValidateWarnings:
    def warning_codes(self, config: AnalysisConfig) -> list[str]:
        return [f.code for f in validate_config(config) if f.severity == "warning"]

    def test_single_value_dimension(self):
        doc = support.minimal_document()
        doc["scene_dimensions"][1]["values"] = ["none"]
        assert self.warning_codes(support.parse_document(doc)) == ["dimension-single-value"]

    def test_hazop_skill_without_parameters(self):
        doc = support.minimal_document()
        doc["skills"][1]["parameters"] = []
        assert self.warning_codes(support.parse_document(doc)) == ["skill-no-parameters"]

    def test_dropping_default_guideword_warns(self):
        doc = support.minimal_document()
        doc["guidewords"] = {"action": {"words": [{"text": "absent", "scope": "output"}]}}
        codes = self.warning_codes(support.parse_document(doc))
        # "wrong", "unattended", "too large", "too small" are missing.
        assert codes == ["guideword-default-missing"] * 4

    def test_replace_defaults_silences_missing_default(self):
        doc = support.minimal_document()
        doc["guidewords"] = {
            "action": {"replace_defaults": True, "words": [{"text": "absent", "scope": "output"}]}
        }
        assert self.warning_codes(support.parse_document(doc)) == []

    def test_layering_warning(self):
        doc = support.minimal_document()
        doc["skills"].append({"id": "imu", "name": "IMU", "category": "sensor"})
        doc["edges"].append(["act", "imu"])  # action reading a sensor directly
        assert self.warning_codes(support.parse_document(doc)) == ["category-layering"]

    def test_duplicate_edge_warning(self):
        doc = support.minimal_document()
        doc["edges"].append(["plan", "see"])
        assert self.warning_codes(support.parse_document(doc)) == ["edge-duplicate"]

    def test_plausibility_on_non_hazop_skill(self):
        doc = support.minimal_document()
        doc["plausibility_rules"] = [
            {"id": "p", "malfunction": {"skills": ["root"]}, "scene": {"surface": "dry"}}
        ]
        assert self.warning_codes(support.parse_document(doc)) == ["plausibility-category"]

    def test_report_is_stable(self, afas_config):
        assert validate_config(afas_config) == validate_config(afas_config)

    def test_afas_config_error_free(self, afas_config):
        findings = validate_config(afas_config)
        assert errors_of(findings) == []
        # Two intentionally single-valued dimensions are the only notes.
        assert [f.code for f in findings] == ["dimension-single-value"] * 2
