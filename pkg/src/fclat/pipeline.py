"""From probability tensors to binary contexts.

Pooling collapses the pattern axis of a score tensor, normalization maps
pooled scores into [0,1] on a log scale, and thresholding produces a
FormalContext. Pooled score rows double as per-object embedding vectors
whose dimensions stay labeled by attribute identifiers.
"""
from __future__ import annotations

import warnings
from typing import Iterable, Sequence

import numpy as np

from .context import FormalContext, _check_unique
from .errors import ValidationError

ZERO_FLOOR = 1e-12
DIRECTIONS = ("object-given-attribute", "attribute-given-object")
POOLING_MODES = ("avg", "max", "none")
NORMALIZATIONS = ("minmax-log", "sigmoid", "none")
# threshold defaults per normalization mode
DEFAULT_ALPHA = {"minmax-log": 0.6, "sigmoid": 0.5, "none": 0.5}


class TriadicTensor:
    """|G|x|M|x|B| array of conditional probabilities plus axis identifiers.

    ``direction`` records which side the probabilities are over:
    'object-given-attribute' means values[:, m, b] is a slice of a
    distribution over objects, so it must not sum above 1, and dually.
    """

    __slots__ = ("objects", "attributes", "patterns", "values", "direction")

    def __init__(
        self,
        objects: Sequence[str],
        attributes: Sequence[str],
        patterns: Sequence[str],
        values,
        direction: str,
    ) -> None:
        self.objects = tuple(objects)
        self.attributes = tuple(attributes)
        self.patterns = tuple(patterns)
        _check_unique(self.objects, "object")
        _check_unique(self.attributes, "attribute")
        _check_unique(self.patterns, "pattern")
        if direction not in DIRECTIONS:
            raise ValidationError(
                f"direction must be one of {DIRECTIONS}, got {direction!r}"
            )
        self.direction = direction
        vals = np.array(values, dtype=float)
        expected = (len(self.objects), len(self.attributes), len(self.patterns))
        if vals.shape != expected:
            raise ValidationError(
                f"values shape {vals.shape} does not match {expected}"
            )
        if np.isnan(vals).any():
            raise ValidationError("values contain NaN")
        if vals.size and (vals.min() < 0.0 or vals.max() > 1.0):
            raise ValidationError("values must lie in [0, 1]")
        if direction == "object-given-attribute":
            sums = vals.sum(axis=0)
            slice_name = "(attribute, pattern)"
        else:
            sums = vals.sum(axis=1)
            slice_name = "(object, pattern)"
        if sums.size and sums.max() > 1.0 + 1e-6:
            raise ValidationError(
                f"probabilities sum to {sums.max():.6f} > 1 over the predicted axis "
                f"for some {slice_name} slice"
            )
        vals.setflags(write=False)
        self.values = vals

    def __repr__(self) -> str:
        return "TriadicTensor(%d x %d x %d, %s)" % (
            *self.values.shape,
            self.direction,
        )


class PooledContext:
    """A |G|x|M| score matrix with its provenance tags.

    ``pooling`` is 'none' for matrices that never had a pattern axis
    (learned counts, baselines). ``alpha`` is the threshold intended for
    binarization; None when not yet chosen.
    """

    __slots__ = ("objects", "attributes", "scores", "pooling", "normalization", "alpha")

    def __init__(
        self,
        objects: Sequence[str],
        attributes: Sequence[str],
        scores,
        pooling: str = "none",
        normalization: str = "none",
        alpha: float | None = None,
    ) -> None:
        self.objects = tuple(objects)
        self.attributes = tuple(attributes)
        _check_unique(self.objects, "object")
        _check_unique(self.attributes, "attribute")
        if pooling not in POOLING_MODES:
            raise ValidationError(f"pooling must be one of {POOLING_MODES}, got {pooling!r}")
        if normalization not in NORMALIZATIONS:
            raise ValidationError(
                f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}"
            )
        if alpha is not None and not 0.0 <= alpha <= 1.0:
            raise ValidationError(f"alpha must lie in [0, 1], got {alpha}")
        mat = np.array(scores, dtype=float)
        if mat.shape != (len(self.objects), len(self.attributes)):
            raise ValidationError(
                f"scores shape {mat.shape} does not match "
                f"({len(self.objects)}, {len(self.attributes)})"
            )
        if not np.isfinite(mat).all():
            raise ValidationError("scores must be finite")
        mat.setflags(write=False)
        self.scores = mat
        self.pooling = pooling
        self.normalization = normalization
        self.alpha = None if alpha is None else float(alpha)

    def __repr__(self) -> str:
        return "PooledContext(%d x %d, pooling=%s, normalization=%s)" % (
            len(self.objects),
            len(self.attributes),
            self.pooling,
            self.normalization,
        )

    def _with_scores(self, scores: np.ndarray, normalization: str) -> "PooledContext":
        return PooledContext(
            self.objects, self.attributes, scores, self.pooling, normalization, self.alpha
        )


def pool(tensor: TriadicTensor, mode: str) -> PooledContext:
    """Collapse the pattern axis: 'avg' takes the mean, 'max' the maximum."""
    if mode not in ("avg", "max"):
        raise ValidationError(f"pooling mode must be 'avg' or 'max', got {mode!r}")
    if tensor.values.shape[2] == 0:
        raise ValidationError("cannot pool over an empty pattern axis")
    if mode == "avg":
        scores = tensor.values.mean(axis=2)
    else:
        scores = tensor.values.max(axis=2)
    return PooledContext(tensor.objects, tensor.attributes, scores, pooling=mode)


def _clamped_log(scores: np.ndarray) -> np.ndarray:
    if scores.size and scores.min() < 0.0:
        raise ValidationError("scores must be nonnegative before log normalization")
    zeros = int((scores == 0.0).sum())
    if zeros:
        warnings.warn(
            f"{zeros} zero score(s) clamped to {ZERO_FLOOR:g} before log",
            RuntimeWarning,
            stacklevel=3,
        )
        scores = np.maximum(scores, ZERO_FLOOR)
    return np.log(scores)


def normalize_minmax_log(pooled: PooledContext, per_row: bool = False) -> PooledContext:
    """Affinely map log scores onto [0,1], matrix-wide by default.

    Zero scores are clamped to a small floor first (with a warning) so the
    log is defined. A constant matrix has no min-max range and is rejected.
    """
    logs = _clamped_log(pooled.scores)
    if per_row:
        lo = logs.min(axis=1, keepdims=True)
        hi = logs.max(axis=1, keepdims=True)
    else:
        lo = logs.min()
        hi = logs.max()
    if np.any(hi <= lo):
        raise ValidationError("degenerate score matrix: min and max log scores coincide")
    return pooled._with_scores((logs - lo) / (hi - lo), "minmax-log")


def normalize_sigmoid(
    pooled: PooledContext, scale: float = 1.0, shift: float | None = None
) -> PooledContext:
    """Squash log scores elementwise: sigmoid(scale * (log s - shift)).

    ``shift`` defaults to the mean log score, centering the output around
    0.5. scale > 0 keeps the map order-preserving.
    """
    if scale == 0.0:
        raise ValidationError("sigmoid scale must be nonzero")
    logs = _clamped_log(pooled.scores)
    if shift is None:
        shift = float(logs.mean()) if logs.size else 0.0
    z = scale * (logs - shift)
    # two-branch form avoids overflow in exp for large |z|
    out = np.where(z >= 0, 1.0 / (1.0 + np.exp(-np.abs(z))), np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))
    return pooled._with_scores(out, "sigmoid")


def binarize(pooled: PooledContext, alpha: float | None = None) -> FormalContext:
    """Threshold scores strictly above alpha into a binary context."""
    if alpha is None:
        alpha = pooled.alpha if pooled.alpha is not None else DEFAULT_ALPHA[pooled.normalization]
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha}")
    s = pooled.scores
    if s.size and (s.min() < 0.0 or s.max() > 1.0):
        raise ValidationError(
            "scores outside [0, 1]; normalize before binarizing"
        )
    return FormalContext(pooled.objects, pooled.attributes, s > alpha)


class ConceptualEmbedding:
    """Per-object score vectors with attribute-labeled dimensions."""

    __slots__ = ("objects", "dimensions", "matrix")

    def __init__(self, objects: Sequence[str], dimensions: Sequence[str], matrix) -> None:
        self.objects = tuple(objects)
        self.dimensions = tuple(dimensions)
        mat = np.array(matrix, dtype=float)
        if mat.shape != (len(self.objects), len(self.dimensions)):
            raise ValidationError(
                f"matrix shape {mat.shape} does not match "
                f"({len(self.objects)}, {len(self.dimensions)})"
            )
        mat.setflags(write=False)
        self.matrix = mat

    def row(self, obj: str | int) -> np.ndarray:
        if isinstance(obj, str):
            try:
                obj = self.objects.index(obj)
            except ValueError:
                raise KeyError(f"unknown object {obj!r}") from None
        if not 0 <= obj < len(self.objects):
            raise IndexError(f"object index {obj} out of range for {len(self.objects)} objects")
        return self.matrix[obj]

    def project(self, dims: Iterable[str]) -> "ConceptualEmbedding":
        """Restrict to the named dimensions, e.g. for a 2-D slice."""
        names = list(dims)
        cols = []
        for name in names:
            try:
                cols.append(self.dimensions.index(name))
            except ValueError:
                raise KeyError(f"unknown dimension {name!r}") from None
        return ConceptualEmbedding(self.objects, names, self.matrix[:, cols])


def embedding_rows(pooled: PooledContext) -> ConceptualEmbedding:
    """View each object's score row as its embedding vector."""
    return ConceptualEmbedding(pooled.objects, pooled.attributes, pooled.scores)
