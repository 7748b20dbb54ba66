"""Formal concepts and their enumeration.

Enumeration uses NextClosure over attribute sets: closed intents are
visited in lectic order (attribute 0 most significant), which makes the
output canonical and duplicate-free without bookkeeping.
"""
from __future__ import annotations

from typing import Iterable

import numpy as np

from .context import FormalContext, TriadicContext, indices_of
from .errors import CapExceededError, ValidationError

DEFAULT_ENUMERATION_CAP = 64


class FormalConcept:
    """An (extent, intent) pair closed under the derivation operators."""

    __slots__ = ("context", "extent", "intent", "_extent_bits", "_intent_bits")

    def __init__(
        self,
        context: FormalContext,
        extent: Iterable[int],
        intent: Iterable[int],
    ) -> None:
        ebits = context._check_object_indices(extent)
        ibits = context._check_attribute_indices(intent)
        if context._attrs_bits(ebits) != ibits or context._objects_bits(ibits) != ebits:
            raise ValidationError(
                f"({sorted(indices_of(ebits))}, {sorted(indices_of(ibits))}) "
                "is not closed under the context's derivation operators"
            )
        self.context = context
        self.extent: frozenset[int] = indices_of(ebits)
        self.intent: frozenset[int] = indices_of(ibits)
        self._extent_bits = ebits
        self._intent_bits = ibits

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalConcept):
            return NotImplemented
        return self._extent_bits == other._extent_bits and self._intent_bits == other._intent_bits

    def __hash__(self) -> int:
        return hash((self._extent_bits, self._intent_bits))

    def __repr__(self) -> str:
        objs = ",".join(self.context.objects[g] for g in sorted(self.extent))
        attrs = ",".join(self.context.attributes[m] for m in sorted(self.intent))
        return "FormalConcept({%s}, {%s})" % (objs, attrs)

    def object_ids(self) -> tuple[str, ...]:
        return tuple(self.context.objects[g] for g in sorted(self.extent))

    def attribute_ids(self) -> tuple[str, ...]:
        return tuple(self.context.attributes[m] for m in sorted(self.intent))


def closure(ctx: FormalContext, objs: Iterable[int]) -> FormalConcept:
    """Smallest formal concept whose extent contains ``objs``."""
    obits = ctx._check_object_indices(objs)
    ibits = ctx._attrs_bits(obits)
    ebits = ctx._objects_bits(ibits)
    return FormalConcept(ctx, indices_of(ebits), indices_of(ibits))


def leq(c1: FormalConcept, c2: FormalConcept) -> bool:
    """Concept order: extent inclusion (with the dual intent inclusion)."""
    extent_le = c1._extent_bits & ~c2._extent_bits == 0
    intent_ge = c2._intent_bits & ~c1._intent_bits == 0
    assert extent_le == intent_ge, "extent and intent orders disagree; inputs are not concepts of one context"
    return extent_le


def enumerate_concepts(
    ctx: FormalContext, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[FormalConcept]:
    """All formal concepts of ``ctx``, in lectic order of intents.

    Refuses contexts with more than ``cap`` objects: the concept count can
    be exponential and silent degradation would be worse than an error.
    """
    n_objects = len(ctx.objects)
    if n_objects > cap:
        raise CapExceededError(
            f"context too large for exact enumeration: {n_objects} objects exceeds cap {cap}"
        )
    n_attrs = len(ctx.attributes)
    full_intent = (1 << n_attrs) - 1

    def close_intent(seed: int) -> tuple[int, int]:
        ebits = ctx._objects_bits(seed)
        return ebits, ctx._attrs_bits(ebits)

    concepts: list[FormalConcept] = []
    ebits, intent = close_intent(0)
    while True:
        concepts.append(FormalConcept(ctx, indices_of(ebits), indices_of(intent)))
        if intent == full_intent:
            return concepts
        ebits, intent = _next_intent(close_intent, intent, n_attrs)


def _next_intent(close_intent, intent: int, n_attrs: int) -> tuple[int, int]:
    """Lectically next closed intent after ``intent`` (Ganter's step)."""
    a = intent
    for i in range(n_attrs - 1, -1, -1):
        bit = 1 << i
        if a & bit:
            a &= ~bit
            continue
        low_mask = bit - 1
        ebits, candidate = close_intent((a & low_mask) | bit)
        # accept only if closing introduced nothing below position i
        if candidate & low_mask == a & low_mask:
            return ebits, candidate
    raise AssertionError("no next intent; caller must stop at the full intent")


def lectic_key(intent: Iterable[int], n_attrs: int) -> int:
    """Sort key realizing lectic order (attribute 0 most significant)."""
    return sum(1 << (n_attrs - 1 - m) for m in intent)


def is_triadic_concept(
    tctx: TriadicContext,
    a1: Iterable[int],
    a2: Iterable[int],
    a3: Iterable[int],
) -> bool:
    """Check the three simultaneous maximality conditions of a triadic concept."""
    y = tctx.incidence
    ng, nm, nb = y.shape
    g_set = _as_index_array(a1, ng, "object")
    m_set = _as_index_array(a2, nm, "attribute")
    b_set = _as_index_array(a3, nb, "condition")

    # slice over the other two axes; all() over an empty selection is True,
    # matching vacuous quantification
    full_g = y[:, m_set][:, :, b_set].all(axis=(1, 2))
    full_m = y[g_set][:, :, b_set].all(axis=(0, 2))
    full_b = y[g_set][:, m_set].all(axis=(0, 1))

    return (
        np.array_equal(np.flatnonzero(full_g), g_set)
        and np.array_equal(np.flatnonzero(full_m), m_set)
        and np.array_equal(np.flatnonzero(full_b), b_set)
    )


def _as_index_array(indices: Iterable[int], size: int, kind: str) -> np.ndarray:
    idx = sorted(set(int(i) for i in indices))
    for i in idx:
        if not 0 <= i < size:
            raise IndexError(f"{kind} index {i} out of range for {size} {kind}s")
    return np.asarray(idx, dtype=int)
