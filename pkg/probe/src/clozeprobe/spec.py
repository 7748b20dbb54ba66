"""Probe specifications: which identifiers to score, and which side gets masked.

A spec names a masked language model, two identifier lists, and a set of
cloze patterns. ``direction`` decides which side's probability is read at
the mask: 'attribute-given-object' fills the object slot and reads the
attribute vocabulary entries, and dually. The side that is read must be
single-token under the model's tokenizer; the filled side may not be.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import SpecError

MASK_TOKEN = "[MASK]"
OBJECT_SLOT = "[OBJ]"
ATTRIBUTE_SLOT = "[ATTR]"
DIRECTIONS = ("object-given-attribute", "attribute-given-object")


@dataclass(frozen=True)
class Pattern:
    """A cloze template with one object slot and one attribute slot."""

    id: str
    template: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "template", tuple(self.template))
        if not self.template:
            raise SpecError(f"pattern {self.id!r} has an empty template")
        n_obj = self.template.count(OBJECT_SLOT)
        n_attr = self.template.count(ATTRIBUTE_SLOT)
        if n_obj != 1 or n_attr != 1:
            raise SpecError(
                f"pattern {self.id!r} must contain exactly one {OBJECT_SLOT} "
                f"and one {ATTRIBUTE_SLOT} slot (found {n_obj} and {n_attr})"
            )


@dataclass(frozen=True)
class ProbeSpec:
    """Everything needed to turn one dataset into one probing run.

    Identifiers are lowercased on construction; the default models are
    uncased, so case would only create spurious duplicates.
    """

    model: str
    direction: str
    objects: tuple[str, ...]
    attributes: tuple[str, ...]
    patterns: tuple[Pattern, ...]
    batch_size: int = 8
    device: str = "cpu"

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects", tuple(str(g).lower() for g in self.objects))
        object.__setattr__(
            self, "attributes", tuple(str(m).lower() for m in self.attributes)
        )
        object.__setattr__(self, "patterns", tuple(self.patterns))
        if self.direction not in DIRECTIONS:
            raise SpecError(
                f"direction must be one of {DIRECTIONS}, got {self.direction!r}"
            )
        for name, items in (("objects", self.objects), ("attributes", self.attributes)):
            if not items:
                raise SpecError(f"spec field {name!r} must be a non-empty list")
            if len(set(items)) != len(items):
                raise SpecError(f"spec field {name!r} contains duplicates")
        if not self.patterns:
            raise SpecError("spec needs at least one pattern")
        ids = [p.id for p in self.patterns]
        if len(set(ids)) != len(ids):
            raise SpecError("pattern ids must be unique")
        if self.batch_size < 1:
            raise SpecError(f"batch_size must be >= 1, got {self.batch_size}")

    @property
    def masked_identifiers(self) -> tuple[str, ...]:
        """The side whose probabilities are read off the softmax."""
        if self.direction == "object-given-attribute":
            return self.objects
        return self.attributes

    @property
    def filled_identifiers(self) -> tuple[str, ...]:
        if self.direction == "object-given-attribute":
            return self.attributes
        return self.objects

    @property
    def masked_slot(self) -> str:
        return OBJECT_SLOT if self.direction == "object-given-attribute" else ATTRIBUTE_SLOT

    @property
    def filled_slot(self) -> str:
        return ATTRIBUTE_SLOT if self.direction == "object-given-attribute" else OBJECT_SLOT


def load_probe_spec(path: str) -> ProbeSpec:
    """Read a spec file, naming the offending field on any problem."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise SpecError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON in {path}: {exc}") from None
    if not isinstance(data, dict):
        raise SpecError(f"{path} must hold a JSON object")
    for field in ("model", "direction", "objects", "attributes", "patterns"):
        if field not in data:
            raise SpecError(f"missing field {field!r} in {path}")

    def strings(key: str) -> tuple[str, ...]:
        items = data[key]
        if not isinstance(items, list) or not all(isinstance(x, str) for x in items):
            raise SpecError(f"field {key!r} in {path} must be a list of strings")
        return tuple(items)

    raw = data["patterns"]
    if not isinstance(raw, list) or not raw:
        raise SpecError(f"field 'patterns' in {path} must be a non-empty list")
    patterns = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or "id" not in item or "template" not in item:
            raise SpecError(f"patterns[{i}] in {path} needs 'id' and 'template'")
        template = item["template"]
        if not isinstance(template, list) or not all(isinstance(t, str) for t in template):
            raise SpecError(
                f"patterns[{i}] in {path}: 'template' must be a list of strings"
            )
        patterns.append(Pattern(str(item["id"]), tuple(template)))

    return ProbeSpec(
        model=str(data["model"]),
        direction=str(data["direction"]),
        objects=strings("objects"),
        attributes=strings("attributes"),
        patterns=tuple(patterns),
        batch_size=int(data.get("batch_size", 8)),
        device=str(data.get("device", "cpu")),
    )


def validate_single_token(spec: ProbeSpec, tokenizer) -> dict[str, int]:
    """Map every masked-side identifier to its vocabulary id.

    The probability of a filler is read from a single softmax entry, so a
    masked-side identifier that tokenizes to several pieces has nowhere to
    be read from. All offenders are collected and reported together before
    any forward pass runs.
    """
    special = set(tokenizer.all_special_ids)
    ids: dict[str, int] = {}
    offenders = []
    for ident in spec.masked_identifiers:
        pieces = tokenizer.tokenize(ident)
        if len(pieces) != 1:
            offenders.append(f"{ident!r} -> {pieces}")
            continue
        token_id = tokenizer.convert_tokens_to_ids(pieces)[0]
        if token_id in special:
            offenders.append(f"{ident!r} -> special token {pieces[0]!r}")
            continue
        ids[ident] = int(token_id)
    if offenders:
        raise SpecError(
            f"masked-side identifiers must be single tokens under {spec.model!r}: "
            + "; ".join(offenders)
        )
    return ids
