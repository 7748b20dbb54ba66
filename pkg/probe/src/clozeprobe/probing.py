"""Turn a probe spec into a |G| x |M| x |B| tensor of cloze probabilities."""

from __future__ import annotations

import numpy as np

from .model import MaskedModel
from .spec import MASK_TOKEN, Pattern, ProbeSpec, validate_single_token


def render_query(pattern: Pattern, spec: ProbeSpec, filler: str) -> list[str]:
    """The pattern with ``filler`` in the filled slot and a mask in the other.

    Multi-word fillers are spliced in word by word; the masked slot always
    becomes a single mask token.
    """
    out: list[str] = []
    for token in pattern.template:
        if token == spec.filled_slot:
            out.extend(filler.split())
        elif token == spec.masked_slot:
            out.append(MASK_TOKEN)
        else:
            out.append(token)
    return out


def probe_tensor(spec: ProbeSpec, model: MaskedModel) -> dict:
    """Score every (object, attribute, pattern) cell with one softmax read.

    One forward pass covers a batch of fillings of the same pattern, so the
    whole run takes |B| * ceil(|filled side| / batch_size) passes. For
    direction 'attribute-given-object', values[g, m, b] is the model's
    probability of attribute token m at the mask of pattern b filled with
    object g; dually for the other direction. Returns the tensor file
    payload in the shared schema.
    """
    token_ids = validate_single_token(spec, model.tokenizer)
    cols = np.array([token_ids[w] for w in spec.masked_identifiers], dtype=int)
    filled = spec.filled_identifiers
    values = np.zeros((len(spec.objects), len(spec.attributes), len(spec.patterns)))
    beta = spec.batch_size
    for b, pattern in enumerate(spec.patterns):
        for start in range(0, len(filled), beta):
            chunk = filled[start : start + beta]
            probs = model.mask_distributions(
                [render_query(pattern, spec, w) for w in chunk]
            )
            sliced = probs[:, cols]
            for j in range(len(chunk)):
                if spec.direction == "attribute-given-object":
                    values[start + j, :, b] = sliced[j]
                else:
                    values[:, start + j, b] = sliced[j]
    return {
        "objects": list(spec.objects),
        "attributes": list(spec.attributes),
        "patterns": [p.id for p in spec.patterns],
        "direction": spec.direction,
        "values": values.tolist(),
    }
