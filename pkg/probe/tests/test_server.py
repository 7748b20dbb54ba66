import json
import threading
import urllib.error
import urllib.request

import pytest

from clozeprobe.server import make_server

QUERY = ["[MASK]", "is", "the", "official", "language", "of", "france", "."]


@pytest.fixture(scope="module")
def endpoint(model):
    httpd = make_server(model, 0)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    host, port = httpd.server_address[:2]
    yield f"http://{host}:{port}"
    httpd.shutdown()
    httpd.server_close()


def post(endpoint, payload, path="/fill", raw=None):
    body = raw if raw is not None else json.dumps(payload).encode("utf-8")
    request = urllib.request.Request(
        endpoint + path, data=body, headers={"Content-Type": "application/json"}
    )
    try:
        with urllib.request.urlopen(request) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


def test_top_k_truncation_reports_residual_mass(endpoint):
    status, body = post(endpoint, {"tokens": QUERY, "mask_index": 0, "top_k": 5})
    assert status == 200
    assert len(body["tokens"]) == 5
    assert len(body["probs"]) == 5
    assert body["probs"] == sorted(body["probs"], reverse=True)
    assert abs(sum(body["probs"]) - body["mass"]) <= 1e-9
    assert body["mass"] < 1.0


def test_null_top_k_returns_the_full_distribution(endpoint, model):
    status, body = post(endpoint, {"tokens": QUERY, "mask_index": 0, "top_k": None})
    assert status == 200
    assert len(body["tokens"]) == model.vocab_size - len(model.special_ids)
    assert abs(body["mass"] - 1.0) <= 1e-4


def test_omitted_top_k_uses_the_server_default(endpoint):
    status, body = post(endpoint, {"tokens": QUERY, "mask_index": 0})
    assert status == 200
    assert len(body["tokens"]) == 50


def test_special_tokens_are_never_candidates(endpoint, model):
    _, body = post(endpoint, {"tokens": QUERY, "mask_index": 0, "top_k": None})
    specials = set(model.tokenizer.all_special_tokens)
    assert not specials & set(body["tokens"])


def test_double_mask_answers_the_requested_position(endpoint):
    tokens = ["[MASK]", "is", "the", "official", "language", "of", "[MASK]", "."]
    status, first = post(endpoint, {"tokens": tokens, "mask_index": 0, "top_k": 10})
    assert status == 200
    status, second = post(endpoint, {"tokens": tokens, "mask_index": 6, "top_k": 10})
    assert status == 200
    assert first["tokens"] != second["tokens"]


def test_mask_index_at_non_mask_token_is_rejected(endpoint):
    status, body = post(endpoint, {"tokens": QUERY, "mask_index": 3, "top_k": 5})
    assert status == 400
    assert "mask_index" in body["error"]


def test_mask_index_out_of_range_is_rejected(endpoint):
    status, body = post(endpoint, {"tokens": QUERY, "mask_index": 99, "top_k": 5})
    assert status == 400
    assert "mask_index" in body["error"]


def test_missing_tokens_field_is_rejected(endpoint):
    status, body = post(endpoint, {"mask_index": 0})
    assert status == 400
    assert "tokens" in body["error"]


def test_embedded_mask_substring_is_rejected(endpoint):
    tokens = ["[MASK]", "is", "spoken", "in", "x[MASK]y", "."]
    status, body = post(endpoint, {"tokens": tokens, "mask_index": 0})
    assert status == 400
    assert "tokens" in body["error"]


def test_invalid_json_is_rejected(endpoint):
    status, body = post(endpoint, None, raw=b"{not json")
    assert status == 400
    assert "JSON" in body["error"]


def test_bad_top_k_is_rejected(endpoint):
    status, body = post(endpoint, {"tokens": QUERY, "mask_index": 0, "top_k": -3})
    assert status == 400
    assert "top_k" in body["error"]


def test_unknown_path_is_rejected(endpoint):
    status, body = post(endpoint, {"tokens": QUERY, "mask_index": 0}, path="/other")
    assert status == 404
    assert "error" in body
