"""Concept lattices: covering relation, top and bottom, DOT export."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .concepts import FormalConcept, lectic_key
from .context import FormalContext, indices_of
from .errors import ValidationError


@dataclass(frozen=True)
class ConceptLattice:
    """All concepts of one context plus the covering (Hasse) relation.

    ``concepts`` is in lectic order of intents. ``covers`` holds
    (lower, upper) index pairs and is the transitive reduction of the
    concept order.
    """

    context: FormalContext
    concepts: tuple[FormalConcept, ...]
    covers: tuple[tuple[int, int], ...]
    top: int
    bottom: int

    def parents(self, i: int) -> tuple[int, ...]:
        """Indices of the upper covers of concept ``i``."""
        return tuple(b for a, b in self.covers if a == i)

    def children(self, i: int) -> tuple[int, ...]:
        """Indices of the lower covers of concept ``i``."""
        return tuple(a for a, b in self.covers if b == i)

    def order_pairs(self) -> frozenset[tuple[int, int]]:
        """Strict order pairs (i, j) with concept i < concept j, from covers.

        Computed by closing the cover relation transitively, so tests can
        hold it against the extent-inclusion order.
        """
        n = len(self.concepts)
        up = [0] * n
        # parents always have strictly larger extents, so processing by
        # descending extent size sees every parent before its children
        order = sorted(range(n), key=lambda i: -len(self.concepts[i].extent))
        parent_map: dict[int, list[int]] = {i: [] for i in range(n)}
        for a, b in self.covers:
            parent_map[a].append(b)
        for i in order:
            for b in parent_map[i]:
                up[i] |= up[b] | (1 << b)
        return frozenset(
            (i, j) for i in range(n) for j in indices_of(up[i])
        )


def build_lattice(concepts: Sequence[FormalConcept]) -> ConceptLattice:
    """Order a full concept set into a lattice with its covering relation.

    Expects every concept of a single context. Duplicate extents are
    rejected: they cannot occur among genuine formal concepts.
    """
    if not concepts:
        raise ValidationError("cannot build a lattice from an empty concept list")
    ctx = concepts[0].context
    for c in concepts[1:]:
        if c.context != ctx:
            raise ValidationError("concepts belong to different contexts")

    n_attrs = len(ctx.attributes)
    ordered = sorted(concepts, key=lambda c: lectic_key(c.intent, n_attrs))
    seen: set[int] = set()
    for c in ordered:
        if c._extent_bits in seen:
            raise ValidationError(
                f"duplicate extent {sorted(c.extent)}; input is not a set of distinct formal concepts"
            )
        seen.add(c._extent_bits)

    ebits = [c._extent_bits for c in ordered]
    n = len(ordered)
    top = bottom = None
    for i, c in enumerate(ordered):
        if c._extent_bits == ctx._all_objects_bits:
            top = i
        if c._intent_bits == ctx._all_attributes_bits:
            bottom = i
    if top is None or bottom is None:
        raise ValidationError(
            "concept list lacks the top or bottom concept; pass the complete concept set"
        )

    below = [0] * n  # strict lower sets, as index bitmasks
    for i in range(n):
        for j in range(n):
            if i != j and ebits[i] & ~ebits[j] == 0:
                below[j] |= 1 << i

    sizes = [e.bit_count() for e in ebits]
    covers: list[tuple[int, int]] = []
    for j in range(n):
        # visit larger extents first: anything under an accepted cover is
        # transitively reachable and therefore not itself a cover
        cand = sorted(indices_of(below[j]), key=lambda i: (-sizes[i], i))
        covered = 0
        for i in cand:
            if covered >> i & 1:
                continue
            covers.append((i, j))
            covered |= below[i]
    covers.sort()

    return ConceptLattice(
        context=ctx,
        concepts=tuple(ordered),
        covers=tuple(covers),
        top=top,
        bottom=bottom,
    )


def introduced_labels(lattice: ConceptLattice) -> list[tuple[list[str], list[str]]]:
    """Per concept: objects and attributes first appearing at that node.

    An object is introduced where no lower cover already contains it; an
    attribute is introduced where no upper cover still carries it. Every
    object and attribute is introduced at exactly one concept.
    """
    out: list[tuple[list[str], list[str]]] = []
    ctx = lattice.context
    for i, c in enumerate(lattice.concepts):
        child_extent = 0
        for a in lattice.children(i):
            child_extent |= lattice.concepts[a]._extent_bits
        parent_intent = 0
        for b in lattice.parents(i):
            parent_intent |= lattice.concepts[b]._intent_bits
        objs = [ctx.objects[g] for g in sorted(indices_of(c._extent_bits & ~child_extent))]
        attrs = [ctx.attributes[m] for m in sorted(indices_of(c._intent_bits & ~parent_intent))]
        out.append((objs, attrs))
    return out


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(
    lattice: ConceptLattice,
    ctx: FormalContext | None = None,
    labeling: str = "full",
) -> str:
    """Render the lattice as DOT text, edges pointing up the order.

    ``full`` labels each node with its whole extent and intent; ``reduced``
    only with the objects/attributes introduced at that node.
    """
    if ctx is None:
        ctx = lattice.context
    elif ctx != lattice.context:
        raise ValidationError("context does not match the lattice's context")
    if labeling not in ("full", "reduced"):
        raise ValidationError(f"unknown labeling {labeling!r}; expected 'full' or 'reduced'")

    if labeling == "full":
        labels = [
            (
                [ctx.objects[g] for g in sorted(c.extent)],
                [ctx.attributes[m] for m in sorted(c.intent)],
            )
            for c in lattice.concepts
        ]
    else:
        labels = introduced_labels(lattice)

    lines = ["digraph lattice {", "  rankdir=BT;", '  node [shape=box];']
    for i, (objs, attrs) in enumerate(labels):
        text = _dot_escape(",".join(objs) + " / " + ",".join(attrs))
        lines.append(f'  c{i} [label="{text}"];')
    for a, b in lattice.covers:
        lines.append(f"  c{a} -> c{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
