"""Formal contexts: object/attribute universes with boolean incidence.

A context is immutable after construction. Row and column bitmasks are
precomputed so that derivation, the inner loop of concept enumeration,
is a chain of integer ANDs.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError


def bits_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def indices_of(bits: int) -> frozenset[int]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return frozenset(out)


def _check_unique(ids: Sequence[str], kind: str) -> None:
    if len(set(ids)) != len(ids):
        seen: set[str] = set()
        dup = next(x for x in ids if x in seen or seen.add(x))
        raise ValidationError(f"duplicate {kind} identifier: {dup!r}")


class FormalContext:
    """Objects, attributes and a |G|x|M| boolean incidence matrix."""

    def __init__(
        self,
        objects: Sequence[str],
        attributes: Sequence[str],
        incidence,
    ) -> None:
        self.objects: tuple[str, ...] = tuple(str(o) for o in objects)
        self.attributes: tuple[str, ...] = tuple(str(a) for a in attributes)
        _check_unique(self.objects, "object")
        _check_unique(self.attributes, "attribute")
        inc = np.asarray(incidence, dtype=bool)
        if inc.ndim != 2 or inc.shape != (len(self.objects), len(self.attributes)):
            raise ValidationError(
                "incidence shape %s does not match (%d objects, %d attributes)"
                % (getattr(inc, "shape", None), len(self.objects), len(self.attributes))
            )
        inc.setflags(write=False)
        self.incidence: np.ndarray = inc
        # bitmask per object over attributes, and per attribute over objects
        self._row_bits: tuple[int, ...] = tuple(
            bits_of(np.flatnonzero(inc[g]).tolist()) for g in range(inc.shape[0])
        )
        self._col_bits: tuple[int, ...] = tuple(
            bits_of(np.flatnonzero(inc[:, m]).tolist()) for m in range(inc.shape[1])
        )
        self._all_objects_bits = (1 << len(self.objects)) - 1
        self._all_attributes_bits = (1 << len(self.attributes)) - 1

    # -- identity ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FormalContext):
            return NotImplemented
        return (
            self.objects == other.objects
            and self.attributes == other.attributes
            and np.array_equal(self.incidence, other.incidence)
        )

    def __hash__(self) -> int:
        return hash((self.objects, self.attributes, self.incidence.tobytes()))

    def __repr__(self) -> str:
        return "FormalContext(%d objects, %d attributes, density=%.3f)" % (
            len(self.objects),
            len(self.attributes),
            self.density,
        )

    @property
    def density(self) -> float:
        """Fraction of incident cells; 0.0 for an empty matrix."""
        if self.incidence.size == 0:
            return 0.0
        return float(self.incidence.sum()) / self.incidence.size

    def incident_pairs(self) -> list[tuple[int, int]]:
        """All (object, attribute) index pairs in row-major order."""
        return [(int(g), int(m)) for g, m in np.argwhere(self.incidence)]

    # -- derivation operators ----------------------------------------------

    def _check_object_indices(self, objs: Iterable[int]) -> int:
        bits = 0
        n = len(self.objects)
        for g in objs:
            if not 0 <= g < n:
                raise IndexError(f"object index {g} out of range for {n} objects")
            bits |= 1 << g
        return bits

    def _check_attribute_indices(self, attrs: Iterable[int]) -> int:
        bits = 0
        n = len(self.attributes)
        for m in attrs:
            if not 0 <= m < n:
                raise IndexError(f"attribute index {m} out of range for {n} attributes")
            bits |= 1 << m
        return bits

    def _attrs_bits(self, object_bits: int) -> int:
        """Attributes shared by every object in the bitmask.

        The empty set derives to all attributes (vacuous universal
        quantification).
        """
        result = self._all_attributes_bits
        while object_bits:
            low = object_bits & -object_bits
            result &= self._row_bits[low.bit_length() - 1]
            object_bits ^= low
        return result

    def _objects_bits(self, attribute_bits: int) -> int:
        result = self._all_objects_bits
        while attribute_bits:
            low = attribute_bits & -attribute_bits
            result &= self._col_bits[low.bit_length() - 1]
            attribute_bits ^= low
        return result

    def derive_attributes(self, objs: Iterable[int]) -> frozenset[int]:
        """Attribute indices shared by all of ``objs`` (the prime operator)."""
        return indices_of(self._attrs_bits(self._check_object_indices(objs)))

    def derive_objects(self, attrs: Iterable[int]) -> frozenset[int]:
        """Object indices sharing all of ``attrs`` (the dual prime operator)."""
        return indices_of(self._objects_bits(self._check_attribute_indices(attrs)))

    # -- preprocessing -----------------------------------------------------

    def clarified(self) -> "FormalContext":
        """Merge duplicate rows and duplicate columns.

        Off by default everywhere; identifiers of merged groups are joined
        with '|' in first-occurrence order so evaluation against unclarified
        gold data stays an explicit choice.
        """
        def merge(ids: tuple[str, ...], keys: list) -> tuple[list[str], list[int]]:
            groups: dict = {}
            order: list = []
            for i, key in enumerate(keys):
                if key not in groups:
                    groups[key] = []
                    order.append(key)
                groups[key].append(i)
            merged_ids = ["|".join(ids[i] for i in groups[key]) for key in order]
            keep = [groups[key][0] for key in order]
            return merged_ids, keep

        row_keys = [self.incidence[g].tobytes() for g in range(len(self.objects))]
        new_objects, keep_rows = merge(self.objects, row_keys)
        inc = self.incidence[keep_rows]
        col_keys = [inc[:, m].tobytes() for m in range(len(self.attributes))]
        new_attributes, keep_cols = merge(self.attributes, col_keys)
        return FormalContext(new_objects, new_attributes, inc[:, keep_cols])


class TriadicContext:
    """Binary triadic context: objects x attributes x conditions."""

    def __init__(
        self,
        objects: Sequence[str],
        attributes: Sequence[str],
        conditions: Sequence[str],
        incidence,
    ) -> None:
        self.objects = tuple(str(o) for o in objects)
        self.attributes = tuple(str(a) for a in attributes)
        self.conditions = tuple(str(b) for b in conditions)
        _check_unique(self.objects, "object")
        _check_unique(self.attributes, "attribute")
        _check_unique(self.conditions, "condition")
        inc = np.asarray(incidence, dtype=bool)
        expected = (len(self.objects), len(self.attributes), len(self.conditions))
        if inc.ndim != 3 or inc.shape != expected:
            raise ValidationError(
                f"triadic incidence shape {getattr(inc, 'shape', None)} does not match {expected}"
            )
        inc.setflags(write=False)
        self.incidence = inc

    def __repr__(self) -> str:
        return "TriadicContext(%d x %d x %d)" % self.incidence.shape
