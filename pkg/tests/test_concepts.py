import numpy as np
import pytest
from hypothesis import given, settings

from fclat import (
    CapExceededError,
    FormalConcept,
    FormalContext,
    TriadicContext,
    ValidationError,
    closure,
    enumerate_concepts,
    is_triadic_concept,
    leq,
)

from oracles import all_concepts_naive, closure_naive, is_triadic_concept_naive
from strategies import contexts, make_context

IDENTITY3 = make_context(np.eye(3, dtype=bool))

# a hand-built bird/fish context: fly, swim, hunt
ANIMALS = FormalContext(
    ["eagle", "owl", "duck", "penguin", "shark", "swan"],
    ["fly", "swim", "hunt"],
    np.array(
        [
            [1, 0, 1],  # eagle
            [1, 0, 1],  # owl
            [1, 1, 0],  # duck
            [0, 1, 1],  # penguin
            [0, 1, 1],  # shark
            [1, 1, 0],  # swan
        ],
        dtype=bool,
    ),
)


def concept_set(ctx):
    return {(c.extent, c.intent) for c in enumerate_concepts(ctx)}


def test_non_closed_pair_rejected():
    with pytest.raises(ValidationError, match="not closed"):
        FormalConcept(IDENTITY3, {0, 1}, {0})


def test_closure_of_two_identity_objects_is_top():
    c = closure(IDENTITY3, {0, 1})
    assert c.extent == {0, 1, 2}
    assert c.intent == frozenset()
    # cross-checked against the subset-enumeration oracle
    assert (c.extent, c.intent) == closure_naive(IDENTITY3.incidence.tolist(), {0, 1})


def test_closure_of_full_object_set_is_top():
    c = closure(ANIMALS, set(range(6)))
    assert c.extent == set(range(6))
    assert c.intent == ANIMALS.derive_attributes(set(range(6)))


def test_closure_fixed_point():
    c = closure(IDENTITY3, {0})
    assert c.extent == {0} and c.intent == {0}


def test_identity_context_has_n_plus_2_concepts():
    assert len(enumerate_concepts(IDENTITY3)) == 5


def test_all_true_context_has_single_concept():
    ctx = make_context(np.ones((2, 2), dtype=bool))
    cs = enumerate_concepts(ctx)
    assert len(cs) == 1
    assert cs[0].extent == {0, 1} and cs[0].intent == {0, 1}


def test_animal_context_matches_powerset_oracle():
    got = concept_set(ANIMALS)
    want = all_concepts_naive(ANIMALS.incidence.tolist())
    assert got == want


def test_enumeration_is_deterministic_and_lectic():
    a = enumerate_concepts(ANIMALS)
    b = enumerate_concepts(ANIMALS)
    assert [(c.extent, c.intent) for c in a] == [(c.extent, c.intent) for c in b]
    n_attrs = len(ANIMALS.attributes)

    def key(c):
        return sum(1 << (n_attrs - 1 - m) for m in c.intent)

    keys = [key(c) for c in a]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)


def test_enumeration_cap():
    n = 65
    ctx = FormalContext(
        [f"g{i}" for i in range(n)], ["m"], np.ones((n, 1), dtype=bool)
    )
    with pytest.raises(CapExceededError, match="context too large for exact enumeration"):
        enumerate_concepts(ctx)
    # a custom cap is honored
    assert len(enumerate_concepts(ctx, cap=65)) == 1


@settings(max_examples=50, deadline=None)
@given(contexts(max_objects=8, max_attributes=7))
def test_enumeration_equals_brute_force(ctx):
    assert concept_set(ctx) == all_concepts_naive(ctx.incidence.tolist())


def test_leq_examples():
    cs = {c.intent: c for c in enumerate_concepts(IDENTITY3)}
    top = cs[frozenset()]
    atom0 = cs[frozenset({0})]
    atom1 = cs[frozenset({1})]
    assert leq(atom0, top)
    assert not leq(top, atom0)
    assert not leq(atom0, atom1) and not leq(atom1, atom0)
    assert leq(top, top)


def test_triadic_full_cube_is_concept():
    t = TriadicContext(["a", "b"], ["x", "y"], ["p", "q"], np.ones((2, 2, 2), dtype=bool))
    assert is_triadic_concept(t, {0, 1}, {0, 1}, {0, 1})
    assert not is_triadic_concept(t, {0}, {0, 1}, {0, 1})


def test_triadic_random_tensor_matches_exhaustive_oracle():
    rng = np.random.default_rng(4242)
    tensor = rng.random((3, 3, 2)) < 0.6
    t = TriadicContext(["g0", "g1", "g2"], ["m0", "m1", "m2"], ["b0", "b1"], tensor)
    listed = tensor.tolist()
    subsets3 = [set(s) for s in ((), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2))]
    subsets2 = [set(s) for s in ((), (0,), (1,), (0, 1))]
    for a1 in subsets3:
        for a2 in subsets3:
            for a3 in subsets2:
                assert is_triadic_concept(t, a1, a2, a3) == is_triadic_concept_naive(
                    listed, a1, a2, a3
                ), (a1, a2, a3)


def test_triadic_index_out_of_range():
    t = TriadicContext(["a"], ["x"], ["p"], np.ones((1, 1, 1), dtype=bool))
    with pytest.raises(IndexError, match="condition index 3"):
        is_triadic_concept(t, {0}, {0}, {3})
