"""Scoring reconstructed contexts against gold standards.

Reconstruction is scored as ranking (MRR, hit@k per gold pair) and concept
classification as multilabel prediction (micro-F1, mAP over the gold
lattice's concepts). Lattice-to-lattice similarity compares extent sets
and order agreement.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .concepts import enumerate_concepts
from .context import FormalContext
from .errors import ValidationError
from .lattice import ConceptLattice
from .pipeline import PooledContext

DEFAULT_KS = (1, 5, 10)


@dataclass(frozen=True)
class GoldContext:
    """A reference context plus dataset metadata (name, density, arity notes)."""

    context: FormalContext
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        meta = dict(self.metadata)
        object.__setattr__(self, "metadata", meta)
        stated = meta.get("density")
        if stated is not None:
            actual = self.context.density
            if abs(float(stated) - actual) > 0.01:
                raise ValidationError(
                    f"metadata density {float(stated):.4f} differs from actual "
                    f"{actual:.4f} by more than 0.01"
                )

    @property
    def name(self) -> str:
        return str(self.metadata.get("name", ""))


@dataclass(frozen=True)
class EvalReport:
    task: str
    aggregate: dict[str, float]
    per_query: tuple[dict, ...]
    diagnostics: dict = field(default_factory=dict)


def _align(scored: Sequence[str], gold: Sequence[str], kind: str):
    """Shared identifiers in gold order, plus index maps into both sides."""
    scored_pos = {t: i for i, t in enumerate(scored)}
    shared = [t for t in gold if t in scored_pos]
    dropped_gold = [t for t in gold if t not in scored_pos]
    dropped_scored = [t for t in scored if t not in set(gold)]
    return shared, scored_pos, dropped_gold, dropped_scored


def eval_reconstruction(
    scores: PooledContext,
    gold: GoldContext,
    direction: str,
    ks: Sequence[int] = DEFAULT_KS,
    filtered: bool = False,
) -> EvalReport:
    """Rank the true item for every gold pair and aggregate MRR and hit@k.

    'rank-attributes' ranks attributes for each gold pair's object,
    'rank-objects' the dual. ``filtered`` drops the query's other gold
    positives from the candidate list. Ties are broken by identifier
    order and counted in the diagnostics.
    """
    if direction not in ("rank-attributes", "rank-objects"):
        raise ValidationError(
            f"direction must be 'rank-attributes' or 'rank-objects', got {direction!r}"
        )
    ks = sorted(set(int(k) for k in ks))
    if not ks or ks[0] < 1:
        raise ValidationError("ks must contain positive cutoffs")

    gctx = gold.context
    objs, obj_pos, lost_obj_gold, lost_obj_scored = _align(scores.objects, gctx.objects, "object")
    atts, att_pos, lost_att_gold, lost_att_scored = _align(
        scores.attributes, gctx.attributes, "attribute"
    )
    if not objs or not atts:
        raise ValidationError("no shared identifiers between scores and gold")

    gold_obj_idx = {t: i for i, t in enumerate(gctx.objects)}
    gold_att_idx = {t: j for j, t in enumerate(gctx.attributes)}
    pairs = [
        (g, m)
        for g in objs
        for m in atts
        if gctx.incidence[gold_obj_idx[g], gold_att_idx[m]]
    ]
    if not pairs:
        raise ValidationError("gold context has no incident pairs among shared identifiers")

    per_query: list[dict] = []
    ties = 0
    rr_sum = 0.0
    hit_counts = {k: 0 for k in ks}
    for g, m in pairs:
        if direction == "rank-attributes":
            query, target = g, m
            candidates = atts
            row = scores.scores[obj_pos[g]]
            cand_scores = {t: float(row[att_pos[t]]) for t in candidates}
            positives = {
                t for t in candidates if gctx.incidence[gold_obj_idx[g], gold_att_idx[t]]
            }
        else:
            query, target = m, g
            candidates = objs
            col = scores.scores[:, att_pos[m]]
            cand_scores = {t: float(col[obj_pos[t]]) for t in candidates}
            positives = {
                t for t in candidates if gctx.incidence[gold_obj_idx[t], gold_att_idx[m]]
            }
        pool = [t for t in candidates if t == target or not (filtered and t in positives)]
        target_score = cand_scores[target]
        target_pos = pool.index(target)
        rank = 1
        tied = False
        for i, t in enumerate(pool):
            if t == target:
                continue
            s = cand_scores[t]
            if s > target_score or (s == target_score and i < target_pos):
                rank += 1
            if s == target_score:
                tied = True
        ties += tied
        rr_sum += 1.0 / rank
        hits = {k: rank <= k for k in ks}
        for k in ks:
            hit_counts[k] += hits[k]
        per_query.append(
            {
                "query": query,
                "target": target,
                "rank": rank,
                "tied": tied,
                "hits": {str(k): bool(v) for k, v in hits.items()},
            }
        )

    n = len(pairs)
    aggregate = {"mrr": rr_sum / n}
    for k in ks:
        aggregate[f"hit@{k}"] = hit_counts[k] / n
    diagnostics = {
        "n_queries": n,
        "tied_queries": ties,
        "direction": direction,
        "filtered": filtered,
        "gold_only_objects": lost_obj_gold,
        "gold_only_attributes": lost_att_gold,
        "scored_only_objects": lost_obj_scored,
        "scored_only_attributes": lost_att_scored,
    }
    return EvalReport("reconstruction", aggregate, tuple(per_query), diagnostics)


def _average_precision(ranked_relevant: Sequence[bool]) -> float:
    hits = 0
    total = 0.0
    for i, rel in enumerate(ranked_relevant, start=1):
        if rel:
            hits += 1
            total += hits / i
    return total / hits if hits else 0.0


def eval_concept_classification(
    scores: PooledContext, gold: GoldContext, alpha: float
) -> EvalReport:
    """Score membership prediction for every nontrivial gold concept.

    An object is predicted to belong to a concept when its score clears
    alpha on every intent attribute. micro-F1 aggregates all
    (object, concept) decisions; mAP averages per-concept average
    precision of the min-over-intent score ranking.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha}")
    s = scores.scores
    if s.size and (s.min() < 0.0 or s.max() > 1.0):
        raise ValidationError("scores outside [0, 1]; normalize before classification")

    gctx = gold.context
    objs, obj_pos, lost_obj_gold, _ = _align(scores.objects, gctx.objects, "object")
    atts, att_pos, lost_att_gold, _ = _align(scores.attributes, gctx.attributes, "attribute")
    if not objs or not atts:
        raise ValidationError("no shared identifiers between scores and gold")
    gold_obj_idx = {t: i for i, t in enumerate(gctx.objects)}

    concepts = [
        c for c in enumerate_concepts(gctx) if c.extent and c.intent
    ]
    # drop concepts whose intent uses attributes the scored side lacks
    att_names = set(atts)
    concepts = [c for c in concepts if set(c.attribute_ids()) <= att_names]
    if not concepts:
        raise ValidationError("gold context yields no nontrivial concepts to classify")

    tp = fp = fn = 0
    per_query: list[dict] = []
    ap_values: list[float] = []
    macro_f1: list[float] = []
    for c in concepts:
        intent_cols = [att_pos[m] for m in c.attribute_ids()]
        extent_names = set(c.object_ids())
        min_scores = {g: float(min(s[obj_pos[g], j] for j in intent_cols)) for g in objs}
        predicted = {g for g in objs if all(s[obj_pos[g], j] > alpha for j in intent_cols)}
        actual = {g for g in objs if g in extent_names}
        c_tp = len(predicted & actual)
        c_fp = len(predicted - actual)
        c_fn = len(actual - predicted)
        tp += c_tp
        fp += c_fp
        fn += c_fn
        if c_tp + c_fp + c_fn == 0:
            macro_f1.append(1.0)
        else:
            macro_f1.append(2 * c_tp / (2 * c_tp + c_fp + c_fn))

        order = sorted(objs, key=lambda g: (-min_scores[g], obj_pos[g]))
        concept_id = ",".join(c.attribute_ids())
        if actual:
            ap = _average_precision([g in actual for g in order])
            ap_values.append(ap)
        else:
            ap = None
        per_query.append(
            {
                "concept": concept_id,
                "ap": ap,
                "tp": c_tp,
                "fp": c_fp,
                "fn": c_fn,
            }
        )

    denom = 2 * tp + fp + fn
    micro = 2 * tp / denom if denom else 1.0
    aggregate = {
        "micro_f1": micro,
        "map": float(np.mean(ap_values)) if ap_values else 0.0,
    }
    diagnostics = {
        "alpha": alpha,
        "n_concepts": len(concepts),
        "macro_f1": float(np.mean(macro_f1)),
        "gold_only_objects": lost_obj_gold,
        "gold_only_attributes": lost_att_gold,
    }
    return EvalReport("classification", aggregate, tuple(per_query), diagnostics)


@dataclass(frozen=True)
class LatticeComparison:
    jaccard: float
    order_agreement: float
    n_shared: int
    n_only_a: int
    n_only_b: int


def compare_lattices(a: ConceptLattice, b: ConceptLattice) -> LatticeComparison:
    """Jaccard over concept extents plus order agreement on shared concepts.

    Extents are compared as sets of object identifiers; order agreement is
    the fraction of shared-concept pairs whose order (from the covering
    relation's closure) matches across the two lattices.
    """
    if set(a.context.objects) != set(b.context.objects) or set(
        a.context.attributes
    ) != set(b.context.attributes):
        raise ValidationError("lattices cover different object/attribute universes")

    def extent_map(lat: ConceptLattice) -> dict[frozenset[str], int]:
        return {
            frozenset(c.object_ids()): i for i, c in enumerate(lat.concepts)
        }

    map_a = extent_map(a)
    map_b = extent_map(b)
    shared = sorted(map_a.keys() & map_b.keys(), key=sorted)
    union = map_a.keys() | map_b.keys()
    jaccard = len(shared) / len(union) if union else 1.0

    if len(shared) < 2:
        agreement = 1.0
    else:
        order_a = a.order_pairs()
        order_b = b.order_pairs()
        agree = 0
        total = 0
        for i, e1 in enumerate(shared):
            for e2 in shared[i + 1:]:
                total += 1
                rel_a = (
                    (map_a[e1], map_a[e2]) in order_a,
                    (map_a[e2], map_a[e1]) in order_a,
                )
                rel_b = (
                    (map_b[e1], map_b[e2]) in order_b,
                    (map_b[e2], map_b[e1]) in order_b,
                )
                agree += rel_a == rel_b
        agreement = agree / total
    return LatticeComparison(
        jaccard=jaccard,
        order_agreement=agreement,
        n_shared=len(shared),
        n_only_a=len(map_a.keys() - map_b.keys()),
        n_only_b=len(map_b.keys() - map_a.keys()),
    )
