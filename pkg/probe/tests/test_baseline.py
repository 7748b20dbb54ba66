import numpy as np
import pytest

from clozeprobe.baseline import embedding_scores
from clozeprobe.spec import Pattern, ProbeSpec


def spec_for(objects, attributes):
    return ProbeSpec(
        model="bert-base-uncased",
        direction="attribute-given-object",
        objects=objects,
        attributes=attributes,
        patterns=(Pattern("p0", ("[ATTR]", "is", "spoken", "in", "[OBJ]", ".")),),
    )


def test_identical_strings_score_one(model):
    payload = embedding_scores(spec_for(("fly",), ("fly",)), model)
    assert payload["values"][0][0] == pytest.approx(1.0)


def test_matrix_shape_and_range(model):
    spec = spec_for(("france", "germany", "brazil"), ("french", "german"))
    values = np.array(embedding_scores(spec, model)["values"])
    assert values.shape == (3, 2)
    assert values.min() >= 0.0
    assert values.max() <= 1.0


def test_different_strings_score_below_one(model):
    payload = embedding_scores(spec_for(("france",), ("german",)), model)
    assert payload["values"][0][0] < 1.0


def test_multi_piece_identifiers_are_pooled(model):
    # "wheezing" splits into several wordpieces; pooling must still give
    # one vector and a self-similarity of 1
    payload = embedding_scores(spec_for(("wheezing",), ("wheezing",)), model)
    assert payload["values"][0][0] == pytest.approx(1.0)


def test_payload_is_a_pooled_score_file(model):
    payload = embedding_scores(spec_for(("france",), ("german",)), model)
    assert list(payload) == [
        "objects",
        "attributes",
        "values",
        "pooling",
        "normalization",
        "alpha",
    ]
    assert payload["pooling"] == "none"
    assert payload["normalization"] == "none"
    assert payload["alpha"] is None
