"""Cloze probing of masked language models.

Reads a probe spec, asks a pretrained masked language model for the
conditional probabilities of identifiers inside pattern fillings, and
writes the resulting score tensors in the same JSON schemas the lattice
pipeline consumes. Also ships an embedding-similarity baseline and an
HTTP fill endpoint for samplers.

The model-bound pieces (``model``, ``probing``, ``baseline``, ``server``)
import torch and are left out of the package namespace so spec handling
stays cheap.
"""

from .errors import ModelError, ProbeError, SpecError
from .spec import (
    ATTRIBUTE_SLOT,
    DIRECTIONS,
    MASK_TOKEN,
    OBJECT_SLOT,
    Pattern,
    ProbeSpec,
    load_probe_spec,
    validate_single_token,
)

__all__ = [
    "ATTRIBUTE_SLOT",
    "DIRECTIONS",
    "MASK_TOKEN",
    "OBJECT_SLOT",
    "ModelError",
    "Pattern",
    "ProbeError",
    "ProbeSpec",
    "SpecError",
    "load_probe_spec",
    "validate_single_token",
]
