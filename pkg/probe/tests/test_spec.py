import json

import pytest

from clozeprobe.errors import SpecError
from clozeprobe.spec import Pattern, ProbeSpec, load_probe_spec, validate_single_token

from conftest import FIXTURES


def make_spec(**overrides):
    base = dict(
        model="bert-base-uncased",
        direction="attribute-given-object",
        objects=("france", "germany"),
        attributes=("french", "german"),
        patterns=(Pattern("p0", ("[ATTR]", "is", "spoken", "in", "[OBJ]", ".")),),
        batch_size=4,
    )
    base.update(overrides)
    return ProbeSpec(**base)


def test_load_region_spec():
    spec = load_probe_spec(str(FIXTURES / "region_language_mini" / "probe_spec.json"))
    assert len(spec.objects) == 10
    assert len(spec.attributes) == 6
    assert len(spec.patterns) == 3
    assert spec.direction == "attribute-given-object"
    assert spec.masked_identifiers == spec.attributes
    assert spec.filled_slot == "[OBJ]"
    assert spec.masked_slot == "[ATTR]"


def test_identifiers_are_lowercased():
    spec = make_spec(objects=("France", "Germany"))
    assert spec.objects == ("france", "germany")


def test_direction_picks_the_masked_side():
    spec = make_spec(direction="object-given-attribute")
    assert spec.masked_identifiers == spec.objects
    assert spec.filled_identifiers == spec.attributes
    assert spec.masked_slot == "[OBJ]"


def test_bad_direction_rejected():
    with pytest.raises(SpecError, match="direction"):
        make_spec(direction="sideways")


def test_case_collision_counts_as_duplicate():
    with pytest.raises(SpecError, match="duplicates"):
        make_spec(attributes=("french", "French"))


def test_empty_objects_rejected():
    with pytest.raises(SpecError, match="objects"):
        make_spec(objects=())


def test_batch_size_must_be_positive():
    with pytest.raises(SpecError, match="batch_size"):
        make_spec(batch_size=0)


def test_pattern_needs_both_slots():
    with pytest.raises(SpecError, match="exactly one"):
        Pattern("p0", ("no", "slots", "here"))


def test_duplicate_pattern_ids_rejected():
    pat = ("[ATTR]", "of", "[OBJ]")
    with pytest.raises(SpecError, match="unique"):
        make_spec(patterns=(Pattern("p0", pat), Pattern("p0", pat)))


def test_missing_field_names_the_field(tmp_path):
    p = tmp_path / "spec.json"
    p.write_text(json.dumps({"model": "x", "direction": "attribute-given-object"}))
    with pytest.raises(SpecError, match="'objects'"):
        load_probe_spec(str(p))


def test_missing_file_reported(tmp_path):
    with pytest.raises(SpecError, match="file not found"):
        load_probe_spec(str(tmp_path / "nope.json"))


def test_template_must_hold_strings(tmp_path):
    p = tmp_path / "spec.json"
    p.write_text(
        json.dumps(
            {
                "model": "x",
                "direction": "attribute-given-object",
                "objects": ["a"],
                "attributes": ["b"],
                "patterns": [{"id": "p0", "template": ["[OBJ]", 3, "[ATTR]"]}],
            }
        )
    )
    with pytest.raises(SpecError, match="patterns\\[0\\]"):
        load_probe_spec(str(p))


def test_masked_side_single_token_passes(model, region_spec):
    ids = validate_single_token(region_spec, model.tokenizer)
    assert sorted(ids) == sorted(region_spec.attributes)
    assert all(isinstance(v, int) for v in ids.values())


def test_multi_token_offenders_all_listed(model):
    spec = make_spec(attributes=("french", "wheezing", "migraine"))
    with pytest.raises(SpecError) as err:
        validate_single_token(spec, model.tokenizer)
    message = str(err.value)
    assert "wheezing" in message
    assert "migraine" in message
    assert "'french'" not in message
