"""HTTP fill endpoint: POST /fill returns the model's mask distribution.

The request body is ``{"tokens": [...], "mask_index": i, "top_k": k}``
where tokens are whole words, ``mask_index`` points at a mask token, and
``top_k`` truncates the candidate list. A request may mask several
positions (a sampling chain's first query masks both slots); the answer
is always for the position named by ``mask_index``. ``top_k`` absent
falls back to the server default, while an explicit null asks for the
full distribution, which a sampler needs to draw from.
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .model import MaskedModel


def parse_fill_request(payload, mask_token: str, default_top_k: int | None):
    """Returns (words, mask ordinal, top_k); ValueError names the bad field."""
    if not isinstance(payload, dict):
        raise ValueError("request body must be a JSON object")
    if "tokens" not in payload:
        raise ValueError("missing field 'tokens'")
    tokens = payload["tokens"]
    if (
        not isinstance(tokens, list)
        or not tokens
        or not all(isinstance(t, str) for t in tokens)
    ):
        raise ValueError("field 'tokens' must be a non-empty list of strings")
    for i, word in enumerate(tokens):
        # a word embedding the mask string would break the word-to-piece
        # correspondence the ordinal mapping below relies on
        if word != mask_token and mask_token in word:
            raise ValueError(f"field 'tokens' entry {i} embeds {mask_token!r}")
    if "mask_index" not in payload:
        raise ValueError("missing field 'mask_index'")
    index = payload["mask_index"]
    if isinstance(index, bool) or not isinstance(index, int):
        raise ValueError("field 'mask_index' must be an integer")
    if not 0 <= index < len(tokens):
        raise ValueError(f"field 'mask_index' is out of range for {len(tokens)} tokens")
    if tokens[index] != mask_token:
        raise ValueError(
            f"field 'mask_index' does not point at the mask token {mask_token!r}"
        )
    top_k = payload.get("top_k", default_top_k)
    if top_k is not None:
        if isinstance(top_k, bool) or not isinstance(top_k, int) or top_k < 1:
            raise ValueError("field 'top_k' must be a positive integer or null")
    return tokens, tokens[:index].count(mask_token), top_k


class FillHandler(BaseHTTPRequestHandler):
    model: MaskedModel
    default_top_k: int | None = 50

    def do_POST(self) -> None:
        if self.path != "/fill":
            self._send(404, {"error": f"unknown path {self.path!r}"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length))
        except (ValueError, TypeError):
            self._send(400, {"error": "request body is not valid JSON"})
            return
        try:
            words, ordinal, top_k = parse_fill_request(
                payload, self.model.mask_token, self.default_top_k
            )
        except ValueError as exc:
            self._send(400, {"error": str(exc)})
            return
        try:
            tokens, probs, mass = self.model.fill(words, ordinal, top_k)
        except Exception as exc:
            self._send(500, {"error": str(exc)})
            return
        self._send(200, {"tokens": tokens, "probs": probs.tolist(), "mass": mass})

    def _send(self, code: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, format: str, *args) -> None:
        pass


def make_server(
    model: MaskedModel, port: int, default_top_k: int | None = 50
) -> ThreadingHTTPServer:
    """Bind a threading server on localhost; the caller runs serve_forever()."""
    handler = type(
        "BoundFillHandler",
        (FillHandler,),
        {"model": model, "default_top_k": default_top_k},
    )
    return ThreadingHTTPServer(("127.0.0.1", port), handler)
