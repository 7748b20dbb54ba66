import numpy as np

from clozeprobe.probing import probe_tensor, render_query
from clozeprobe.spec import Pattern, ProbeSpec

PATTERN = Pattern("p0", ("[ATTR]", "is", "spoken", "in", "[OBJ]", "."))


def tiny_spec(**overrides):
    base = dict(
        model="bert-base-uncased",
        direction="attribute-given-object",
        objects=("france",),
        attributes=("french",),
        patterns=(PATTERN,),
        batch_size=8,
    )
    base.update(overrides)
    return ProbeSpec(**base)


def test_render_query_masks_the_read_side():
    spec = tiny_spec()
    words = render_query(PATTERN, spec, "france")
    assert words == ["[MASK]", "is", "spoken", "in", "france", "."]


def test_render_query_splits_multiword_fillers():
    spec = tiny_spec(objects=("new zealand",))
    words = render_query(PATTERN, spec, "new zealand")
    assert words == ["[MASK]", "is", "spoken", "in", "new", "zealand", "."]


def test_single_cell_tensor_shape_and_range(model):
    payload = probe_tensor(tiny_spec(), model)
    values = np.array(payload["values"])
    assert values.shape == (1, 1, 1)
    assert 0.0 < values[0, 0, 0] < 1.0


def test_probing_twice_is_deterministic(model):
    spec = tiny_spec(objects=("france", "germany"))
    first = np.array(probe_tensor(spec, model)["values"])
    second = np.array(probe_tensor(spec, model)["values"])
    assert np.abs(first - second).max() <= 1e-6


def test_batch_size_changes_throughput_only(model):
    objects = ("france", "germany", "austria", "spain", "brazil")
    one = tiny_spec(objects=objects, attributes=("french", "german"), batch_size=1)
    many = tiny_spec(objects=objects, attributes=("french", "german"), batch_size=32)
    a = np.array(probe_tensor(one, model)["values"])
    b = np.array(probe_tensor(many, model)["values"])
    np.testing.assert_allclose(a, b, atol=1e-5)


def test_softmax_rows_sum_to_one(model):
    probs = model.mask_distributions(
        [["[MASK]", "is", "spoken", "in", "france", "."]]
    )
    assert probs.shape == (1, model.vocab_size)
    assert abs(probs.sum() - 1.0) <= 1e-4


def test_sliced_rows_never_exceed_one(model):
    spec = tiny_spec(
        objects=("france", "germany"),
        attributes=("french", "german", "english"),
    )
    values = np.array(probe_tensor(spec, model)["values"])
    # attribute-given-object: each (object, pattern) slice comes from one
    # softmax row, so its attribute entries sum below 1
    assert values.sum(axis=1).max() <= 1.0 + 1e-9


def test_object_given_attribute_masks_the_object_slot(model):
    spec = tiny_spec(
        direction="object-given-attribute",
        objects=("france", "germany"),
        attributes=("french",),
    )
    values = np.array(probe_tensor(spec, model)["values"])
    assert values.shape == (2, 1, 1)
    assert values.sum(axis=0).max() <= 1.0 + 1e-9


def test_payload_matches_tensor_schema(model):
    payload = probe_tensor(tiny_spec(), model)
    assert list(payload) == ["objects", "attributes", "patterns", "direction", "values"]
    assert payload["patterns"] == ["p0"]
    assert payload["direction"] == "attribute-given-object"
