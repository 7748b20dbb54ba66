"""Synthetic corpora from ground-truth contexts, and learning them back.

A corpus is built by filling cloze patterns with incident object-attribute
pairs. A counting learner recovers the incidence from co-occurrences, and a
convergence harness measures how fast. A Gibbs driver samples pairs from
any probability provider (exact joint tables here, language models behind
the HTTP protocol).
"""
from __future__ import annotations

import warnings
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import requests

from .context import FormalContext
from .errors import ProviderError, ValidationError
from .pipeline import PooledContext

MASK_TOKEN = "[MASK]"
OBJECT_SLOT = "[OBJ]"
ATTRIBUTE_SLOT = "[ATTR]"


@dataclass(frozen=True)
class Pattern:
    """A cloze template with one object slot and one attribute slot."""

    id: str
    template: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "template", tuple(self.template))
        if not self.template:
            raise ValidationError(f"pattern {self.id!r} has an empty template")
        n_obj = self.template.count(OBJECT_SLOT)
        n_attr = self.template.count(ATTRIBUTE_SLOT)
        if n_obj != 1 or n_attr != 1:
            raise ValidationError(
                f"pattern {self.id!r} must contain exactly one {OBJECT_SLOT} "
                f"and one {ATTRIBUTE_SLOT} slot (found {n_obj} and {n_attr})"
            )

    @property
    def object_position(self) -> int:
        return self.template.index(OBJECT_SLOT)

    @property
    def attribute_position(self) -> int:
        return self.template.index(ATTRIBUTE_SLOT)

    @property
    def object_first(self) -> bool:
        return self.object_position < self.attribute_position


def render_filling(
    pattern: Pattern, obj: str | None = None, attribute: str | None = None
) -> tuple[str, ...]:
    """Substitute slot tokens; an empty slot becomes the mask placeholder."""
    for token in (obj, attribute):
        if token is not None and MASK_TOKEN in token:
            raise ValidationError(
                f"filler token {token!r} contains the mask placeholder {MASK_TOKEN}"
            )
    out = list(pattern.template)
    out[pattern.object_position] = MASK_TOKEN if obj is None else obj
    out[pattern.attribute_position] = MASK_TOKEN if attribute is None else attribute
    return tuple(out)


class Sentence(NamedTuple):
    pattern_id: str
    object_id: str
    attribute_id: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class SyntheticCorpus:
    sentences: tuple[Sentence, ...]
    source_context_id: str
    seed: int

    def __len__(self) -> int:
        return len(self.sentences)


def generate_corpus(
    ctx: FormalContext,
    patterns: Sequence[Pattern],
    n: int,
    seed: int,
    pair_dist: str = "uniform",
    weights=None,
    noise_rate: float = 0.0,
    context_id: str = "",
) -> SyntheticCorpus:
    """Sample n pattern fillings i.i.d. from the context's incident pairs.

    With probability ``noise_rate`` a sentence's pair is swapped for a
    uniformly random non-incident pair, modeling imperfect data.
    """
    if not patterns:
        raise ValidationError("at least one pattern is required")
    if n < 0:
        raise ValidationError("corpus size must be nonnegative")
    if not 0.0 <= noise_rate < 1.0:
        raise ValidationError(f"noise_rate must lie in [0, 1), got {noise_rate}")
    pairs = ctx.incident_pairs()
    if not pairs:
        raise ValidationError("context has no incident pairs to sample from")

    if pair_dist == "uniform":
        probs = None
    elif pair_dist == "weighted":
        if weights is None:
            raise ValidationError("pair_dist='weighted' requires a weight matrix")
        w = np.asarray(weights, dtype=float)
        if w.shape != ctx.incidence.shape:
            raise ValidationError(
                f"weight matrix shape {w.shape} does not match context shape {ctx.incidence.shape}"
            )
        raw = np.array([w[g, m] for g, m in pairs], dtype=float)
        if (raw < 0).any() or raw.sum() <= 0:
            raise ValidationError("pair weights must be nonnegative with positive total")
        probs = raw / raw.sum()
    else:
        raise ValidationError(f"pair_dist must be 'uniform' or 'weighted', got {pair_dist!r}")

    non_pairs: list[tuple[int, int]] = []
    if noise_rate > 0.0:
        non_pairs = [(int(g), int(m)) for g, m in np.argwhere(~ctx.incidence)]
        if not non_pairs:
            raise ValidationError("noise_rate > 0 needs at least one non-incident pair")

    rng = np.random.default_rng(seed)
    pat_idx = rng.integers(0, len(patterns), size=n)
    if probs is None:
        pair_idx = rng.integers(0, len(pairs), size=n)
    else:
        pair_idx = rng.choice(len(pairs), size=n, p=probs)
    noisy = rng.random(n) < noise_rate if noise_rate > 0.0 else np.zeros(n, dtype=bool)
    noise_pick = rng.integers(0, len(non_pairs), size=int(noisy.sum())) if non_pairs else None

    sentences: list[Sentence] = []
    k = 0
    for i in range(n):
        if noisy[i]:
            g, m = non_pairs[noise_pick[k]]
            k += 1
        else:
            g, m = pairs[pair_idx[i]]
        pat = patterns[pat_idx[i]]
        g_id = ctx.objects[g]
        m_id = ctx.attributes[m]
        sentences.append(Sentence(pat.id, g_id, m_id, render_filling(pat, g_id, m_id)))
    return SyntheticCorpus(tuple(sentences), context_id or repr(ctx), seed)


LEARN_NORMALIZE_MODES = ("max", "row", "freq", "none")


def learn_context(
    corpus: SyntheticCorpus,
    objects: Sequence[str],
    attributes: Sequence[str],
    normalize: str = "max",
) -> PooledContext:
    """Count object-attribute co-occurrences per sentence, then normalize.

    Every (position i, position j) pair inside a sentence with an object
    token at i and an attribute token at j counts once, so repeated tokens
    contribute multiplicatively. Unknown tokens are skipped. ``normalize``:
    'max' divides by the largest count, 'row' makes rows stochastic, 'freq'
    divides by the number of sentences, 'none' returns raw counts.
    """
    if not objects or not attributes:
        raise ValidationError("object and attribute vocabularies must be non-empty")
    if normalize not in LEARN_NORMALIZE_MODES:
        raise ValidationError(
            f"normalize must be one of {LEARN_NORMALIZE_MODES}, got {normalize!r}"
        )
    obj_index = {t: i for i, t in enumerate(objects)}
    att_index = {t: j for j, t in enumerate(attributes)}
    counts = np.zeros((len(objects), len(attributes)), dtype=float)
    for sent in corpus.sentences:
        hits_g: list[int] = []
        hits_m: list[int] = []
        for tok in sent.tokens:
            gi = obj_index.get(tok)
            if gi is not None:
                hits_g.append(gi)
            mj = att_index.get(tok)
            if mj is not None:
                hits_m.append(mj)
        for gi in hits_g:
            for mj in hits_m:
                counts[gi, mj] += 1.0

    if normalize == "none":
        scores = counts
    elif normalize == "freq":
        scores = counts / len(corpus.sentences) if corpus.sentences else counts
    elif normalize == "row":
        row_sums = counts.sum(axis=1, keepdims=True)
        safe = np.where(row_sums > 0, row_sums, 1.0)
        scores = counts / safe
    else:
        peak = counts.max() if counts.size else 0.0
        if peak > 0:
            scores = counts / peak
        else:
            scores = counts
    if counts.size and counts.max() == 0 and normalize != "none":
        warnings.warn("no co-occurrences counted; normalization skipped", RuntimeWarning)
    return PooledContext(tuple(objects), tuple(attributes), scores)


def context_distance(a, b, metric: str = "mean-abs") -> float:
    """Entrywise distance between two score matrices."""
    mat_a = np.asarray(getattr(a, "scores", a), dtype=float)
    mat_b = np.asarray(getattr(b, "scores", b), dtype=float)
    if mat_a.shape != mat_b.shape:
        raise ValidationError(f"shape mismatch: {mat_a.shape} vs {mat_b.shape}")
    if metric not in ("mean-abs", "max-abs"):
        raise ValidationError(f"metric must be 'mean-abs' or 'max-abs', got {metric!r}")
    if mat_a.size == 0:
        return 0.0
    diff = np.abs(mat_a - mat_b)
    return float(diff.mean() if metric == "mean-abs" else diff.max())


@dataclass(frozen=True)
class ConvergenceTable:
    """Rows of (corpus size, trial index, distance to the target matrix)."""

    rows: tuple[tuple[int, int, float], ...]

    def summary(self) -> list[tuple[int, float, float]]:
        """Per corpus size: (n, mean distance, std of distance)."""
        sizes = sorted({n for n, _, _ in self.rows})
        out = []
        for n in sizes:
            d = np.array([dist for size, _, dist in self.rows if size == n])
            out.append((n, float(d.mean()), float(d.std())))
        return out


def convergence_experiment(
    ctx: FormalContext,
    patterns: Sequence[Pattern],
    n_schedule: Sequence[int],
    trials: int,
    seed: int,
    noise_rate: float = 0.0,
    metric: str = "mean-abs",
) -> ConvergenceTable:
    """Distance between learned pair frequencies and the true pair distribution.

    The target is the noise-free sampling distribution (uniform over
    incident pairs), so noisy runs show a distance floor instead of
    converging to zero.
    """
    sched = [int(n) for n in n_schedule]
    if not sched or any(b <= a for a, b in zip(sched, sched[1:])):
        raise ValidationError("n_schedule must be a strictly increasing list of sizes")
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    pairs = ctx.incident_pairs()
    if not pairs:
        raise ValidationError("context has no incident pairs to sample from")
    target = ctx.incidence.astype(float) / len(pairs)

    # one child seed per (n, trial) cell keeps trials independent and the
    # table reproducible for a fixed top-level seed
    children = np.random.SeedSequence(seed).spawn(len(sched) * trials)
    rows: list[tuple[int, int, float]] = []
    for i, n in enumerate(sched):
        for t in range(trials):
            child = children[i * trials + t]
            cell_seed = int(child.generate_state(1)[0])
            corpus = generate_corpus(
                ctx, patterns, n, cell_seed, noise_rate=noise_rate
            )
            learned = learn_context(corpus, ctx.objects, ctx.attributes, normalize="freq")
            rows.append((n, t, context_distance(learned.scores, target, metric)))
    return ConvergenceTable(tuple(rows))


class FillResult(NamedTuple):
    tokens: tuple[str, ...]
    probs: np.ndarray
    mass: float


class ProbabilityProvider(ABC):
    """Distribution over a vocabulary for one masked slot of a filling."""

    @abstractmethod
    def fill(
        self, tokens: Sequence[str], mask_index: int, top_k: int | None = None
    ) -> FillResult:
        """Distribution for the mask at ``mask_index`` in ``tokens``."""


def _truncate(tokens: Sequence[str], probs: np.ndarray, top_k: int | None) -> FillResult:
    probs = np.asarray(probs, dtype=float)
    if top_k is None or top_k >= len(tokens):
        return FillResult(tuple(tokens), probs, float(probs.sum()))
    if top_k < 1:
        raise ValidationError(f"top_k must be positive, got {top_k}")
    order = np.argsort(-probs, kind="stable")[:top_k]
    kept_tokens = tuple(tokens[i] for i in order)
    kept = probs[order]
    return FillResult(kept_tokens, kept, float(kept.sum()))


class JointTableProvider(ProbabilityProvider):
    """Exact conditionals of an explicit joint table over one pattern.

    Queries with the other slot masked return the marginal, so the
    provider covers the chain's initial draw as well.
    """

    def __init__(self, pattern: Pattern, objects: Sequence[str], attributes: Sequence[str], joint) -> None:
        self.pattern = pattern
        self.objects = tuple(objects)
        self.attributes = tuple(attributes)
        table = np.array(joint, dtype=float)
        if table.shape != (len(self.objects), len(self.attributes)):
            raise ValidationError(
                f"joint shape {table.shape} does not match "
                f"({len(self.objects)}, {len(self.attributes)})"
            )
        if (table < 0).any():
            raise ValidationError("joint probabilities must be nonnegative")
        if abs(table.sum() - 1.0) > 1e-6:
            raise ValidationError(f"joint table sums to {table.sum():.8f}, expected 1")
        table.setflags(write=False)
        self.joint = table
        self._obj_pos = pattern.object_position
        self._att_pos = pattern.attribute_position

    def fill(
        self, tokens: Sequence[str], mask_index: int, top_k: int | None = None
    ) -> FillResult:
        tokens = tuple(tokens)
        if len(tokens) != len(self.pattern.template):
            raise ProviderError(
                f"filling length {len(tokens)} does not match pattern {self.pattern.id!r}"
            )
        for i, (got, want) in enumerate(zip(tokens, self.pattern.template)):
            if i in (self._obj_pos, self._att_pos):
                continue
            if got != want:
                raise ProviderError(f"token {got!r} at position {i} does not match the pattern")
        if mask_index not in (self._obj_pos, self._att_pos):
            raise ProviderError(f"mask_index {mask_index} is not a slot position")
        if tokens[mask_index] != MASK_TOKEN:
            raise ProviderError(f"mask_index {mask_index} does not point at a mask token")

        if mask_index == self._obj_pos:
            other = tokens[self._att_pos]
            if other == MASK_TOKEN:
                dist = self.joint.sum(axis=1)
            else:
                try:
                    j = self.attributes.index(other)
                except ValueError:
                    raise ProviderError(f"unknown attribute token {other!r}") from None
                col = self.joint[:, j]
                if col.sum() <= 0:
                    raise ProviderError(f"conditional undefined: attribute {other!r} has zero mass")
                dist = col / col.sum()
            return _truncate(self.objects, dist, top_k)

        other = tokens[self._obj_pos]
        if other == MASK_TOKEN:
            dist = self.joint.sum(axis=0)
        else:
            try:
                i = self.objects.index(other)
            except ValueError:
                raise ProviderError(f"unknown object token {other!r}") from None
            row = self.joint[i]
            if row.sum() <= 0:
                raise ProviderError(f"conditional undefined: object {other!r} has zero mass")
            dist = row / row.sum()
        return _truncate(self.attributes, dist, top_k)


class HttpProvider(ProbabilityProvider):
    """Client for the POST /fill protocol of an out-of-process provider."""

    def __init__(self, endpoint: str, timeout: float = 60.0) -> None:
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout

    def fill(
        self, tokens: Sequence[str], mask_index: int, top_k: int | None = None
    ) -> FillResult:
        payload = {"tokens": list(tokens), "mask_index": int(mask_index), "top_k": top_k}
        try:
            resp = requests.post(
                self.endpoint + "/fill", json=payload, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise ProviderError(f"provider request failed: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderError(
                f"provider returned status {resp.status_code}: {resp.text[:200]}"
            )
        try:
            body = resp.json()
        except ValueError:
            raise ProviderError("provider response is not valid JSON") from None
        for field in ("tokens", "probs", "mass"):
            if field not in body:
                raise ProviderError(f"provider response missing field {field!r}")
        out_tokens = tuple(str(t) for t in body["tokens"])
        probs = np.asarray(body["probs"], dtype=float)
        if probs.shape != (len(out_tokens),):
            raise ProviderError("provider fields 'tokens' and 'probs' have different lengths")
        mass = float(body["mass"])
        if abs(probs.sum() - mass) > 1e-6:
            raise ProviderError(
                f"provider field 'probs' sums to {probs.sum():.8f} but 'mass' reports {mass:.8f}"
            )
        return FillResult(out_tokens, probs, mass)


@dataclass(frozen=True)
class GibbsResult:
    chain: tuple[tuple[str, str], ...]
    empirical: PooledContext
    burn_in: int

    def object_marginal(self) -> dict[str, float]:
        kept = self.chain[self.burn_in:]
        out: dict[str, float] = {}
        for g, _ in kept:
            out[g] = out.get(g, 0.0) + 1.0
        return {g: c / len(kept) for g, c in out.items()}

    def attribute_marginal(self) -> dict[str, float]:
        kept = self.chain[self.burn_in:]
        out: dict[str, float] = {}
        for _, m in kept:
            out[m] = out.get(m, 0.0) + 1.0
        return {m: c / len(kept) for m, c in out.items()}


def _draw(result: FillResult, rng: np.random.Generator) -> str:
    if len(result.tokens) == 0:
        raise ProviderError("provider vocabulary is empty")
    total = float(result.probs.sum())
    if abs(total - 1.0) > 1e-6:
        raise ProviderError(f"provider distribution sums to {total:.8f}, expected 1")
    cum = np.cumsum(result.probs / total)
    i = int(np.searchsorted(cum, rng.random(), side="right"))
    return result.tokens[min(i, len(result.tokens) - 1)]


def gibbs_generate(
    provider: ProbabilityProvider,
    pattern: Pattern,
    steps: int,
    burn_in: int,
    seed: int,
) -> GibbsResult:
    """Alternating-conditional chain of (object, attribute) pairs.

    The initial object comes from the fully masked pattern. At step t the
    object is drawn given attribute t-1 and the attribute given object t-1,
    so both coordinates advance from the previous pair. Post-burn-in pair
    frequencies form the empirical context, restricted to tokens that were
    actually sampled.
    """
    if burn_in < 0 or steps <= burn_in:
        raise ValidationError("need steps > burn_in >= 0")
    rng = np.random.default_rng(seed)
    obj_pos = pattern.object_position
    att_pos = pattern.attribute_position

    g = _draw(provider.fill(render_filling(pattern), obj_pos), rng)
    m = _draw(provider.fill(render_filling(pattern, obj=g), att_pos), rng)
    chain: list[tuple[str, str]] = [(g, m)]
    for _ in range(1, steps):
        g_next = _draw(provider.fill(render_filling(pattern, attribute=m), obj_pos), rng)
        m_next = _draw(provider.fill(render_filling(pattern, obj=g), att_pos), rng)
        g, m = g_next, m_next
        chain.append((g, m))

    kept = chain[burn_in:]
    objs: list[str] = []
    atts: list[str] = []
    for g_tok, m_tok in kept:
        if g_tok not in objs:
            objs.append(g_tok)
        if m_tok not in atts:
            atts.append(m_tok)
    counts = np.zeros((len(objs), len(atts)))
    g_idx = {t: i for i, t in enumerate(objs)}
    m_idx = {t: j for j, t in enumerate(atts)}
    for g_tok, m_tok in kept:
        counts[g_idx[g_tok], m_idx[m_tok]] += 1.0
    empirical = PooledContext(tuple(objs), tuple(atts), counts / len(kept))
    return GibbsResult(tuple(chain), empirical, burn_in)
