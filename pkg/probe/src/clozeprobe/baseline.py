"""Embedding-similarity baseline: no cloze signal, just vector geometry."""

from __future__ import annotations

import numpy as np

from .model import MaskedModel
from .spec import ProbeSpec


def embedding_scores(spec: ProbeSpec, model: MaskedModel) -> dict:
    """Cosine similarity of identifier embeddings, mapped onto [0, 1].

    Each identifier is encoded on its own and mean-pooled over its word
    pieces, so identical object and attribute strings score exactly 1.
    Patterns play no role here, which is the point of the baseline: it
    sees the names, never the sentences. Returns a pooled-score file
    payload in the shared schema.
    """
    vectors: dict[str, np.ndarray] = {}
    for ident in dict.fromkeys(spec.objects + spec.attributes):
        vec = model.embed(ident)
        vectors[ident] = vec / np.linalg.norm(vec)
    scores = np.zeros((len(spec.objects), len(spec.attributes)))
    for i, g in enumerate(spec.objects):
        for j, m in enumerate(spec.attributes):
            cosine = float(np.dot(vectors[g], vectors[m]))
            scores[i, j] = 0.5 * (cosine + 1.0)
    np.clip(scores, 0.0, 1.0, out=scores)
    return {
        "objects": list(spec.objects),
        "attributes": list(spec.attributes),
        "values": scores.tolist(),
        "pooling": "none",
        "normalization": "none",
        "alpha": None,
    }
