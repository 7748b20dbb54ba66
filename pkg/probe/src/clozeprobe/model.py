"""Thin wrapper around a pretrained masked language model.

Loads tokenizer and weights once, runs in eval mode, and serializes every
forward pass behind one lock: the HTTP server shares this object across
handler threads and a torch module is not reentrant on a single device.
Probabilities are accumulated in float64 so downstream sums stay stable.
"""

from __future__ import annotations

import threading
from typing import Sequence

import numpy as np
import torch

from .errors import ModelError


class MaskedModel:
    def __init__(self, name: str, device: str = "cpu") -> None:
        try:
            from transformers import AutoModelForMaskedLM, AutoTokenizer
            from transformers.utils import logging as hf_logging

            hf_logging.set_verbosity_error()
            hf_logging.disable_progress_bar()
            self.tokenizer = AutoTokenizer.from_pretrained(name)
            self.module = AutoModelForMaskedLM.from_pretrained(name)
        except Exception as exc:
            raise ModelError(f"could not load model {name!r}: {exc}") from exc
        self.name = name
        self.device = torch.device(device)
        self.module.to(self.device)
        self.module.eval()
        self.mask_token = self.tokenizer.mask_token
        self.mask_id = self.tokenizer.mask_token_id
        if self.mask_id is None:
            raise ModelError(f"model {name!r} has no mask token; not a masked LM")
        self.special_ids = sorted(set(self.tokenizer.all_special_ids))
        self.vocab_size = int(self.module.config.vocab_size)
        self._lock = threading.Lock()

    def _forward(self, texts: list[str]) -> tuple[torch.Tensor, torch.Tensor]:
        """Returns (padded input ids, logits), both on the CPU."""
        enc = self.tokenizer(texts, padding=True, return_tensors="pt")
        input_ids = enc["input_ids"]
        enc = {k: v.to(self.device) for k, v in enc.items()}
        with self._lock, torch.no_grad():
            logits = self.module(**enc).logits.cpu()
        return input_ids, logits

    def mask_distributions(self, sequences: Sequence[Sequence[str]]) -> np.ndarray:
        """Vocabulary softmax at the unique mask of each word sequence.

        Each sequence is a list of words containing the mask token exactly
        once; anything else means a slot substitution went wrong, so it is
        an error rather than a judgement call.
        """
        texts = [" ".join(seq) for seq in sequences]
        input_ids, logits = self._forward(texts)
        where = input_ids == self.mask_id
        counts = where.sum(dim=1)
        if not bool((counts == 1).all()):
            bad = int((counts != 1).nonzero()[0, 0])
            raise ModelError(
                f"query {texts[bad]!r} tokenized to {int(counts[bad])} mask "
                "pieces, expected exactly 1"
            )
        rows, cols = where.nonzero(as_tuple=True)
        picked = logits[rows, cols].double()
        return torch.softmax(picked, dim=-1).numpy()

    def mask_distribution_at(self, words: Sequence[str], ordinal: int) -> np.ndarray:
        """Softmax at the ``ordinal``-th mask piece of one word sequence.

        Sampling chains may mask both slots of a pattern at once, so the
        caller says which mask it wants by position.
        """
        text = " ".join(words)
        input_ids, logits = self._forward([text])
        positions = (input_ids[0] == self.mask_id).nonzero(as_tuple=True)[0]
        if ordinal < 0 or ordinal >= len(positions):
            raise ModelError(
                f"query {text!r} holds {len(positions)} mask pieces, "
                f"ordinal {ordinal} is out of range"
            )
        picked = logits[0, positions[ordinal]].double()
        return torch.softmax(picked, dim=-1).numpy()

    def fill(
        self, words: Sequence[str], mask_ordinal: int, top_k: int | None
    ) -> tuple[list[str], np.ndarray, float]:
        """Candidate fillers for one mask, most probable first.

        Special tokens are removed and the rest renormalized: a sampler
        must never receive the mask or padding token as a filler, and with
        ``top_k`` None the returned probabilities then sum to 1 up to
        float error.
        """
        probs = self.mask_distribution_at(words, mask_ordinal)
        keep = np.ones(len(probs), dtype=bool)
        keep[self.special_ids] = False
        ids = np.nonzero(keep)[0]
        weights = probs[ids]
        total = weights.sum()
        if total <= 0.0:
            raise ModelError("mask distribution collapsed onto special tokens")
        weights = weights / total
        order = np.argsort(-weights)
        if top_k is not None:
            order = order[: int(top_k)]
        chosen = weights[order]
        tokens = self.tokenizer.convert_ids_to_tokens([int(i) for i in ids[order]])
        return tokens, chosen, float(chosen.sum())

    def embed(self, text: str) -> np.ndarray:
        """Mean-pooled last-layer hidden states over ``text``'s own pieces."""
        enc = self.tokenizer(text, return_tensors="pt", return_special_tokens_mask=True)
        special = enc.pop("special_tokens_mask")[0].bool()
        enc = {k: v.to(self.device) for k, v in enc.items()}
        with self._lock, torch.no_grad():
            out = self.module(**enc, output_hidden_states=True)
        hidden = out.hidden_states[-1][0].cpu().double()
        keep = ~special
        if not bool(keep.any()):
            raise ModelError(f"text {text!r} tokenized to special tokens only")
        return hidden[keep].mean(dim=0).numpy()
