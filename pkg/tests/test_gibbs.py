import numpy as np
import pytest

from fclat import (
    JointTableProvider,
    Pattern,
    ProviderError,
    ValidationError,
    gibbs_generate,
    render_filling,
)
from fclat.synth import FillResult, ProbabilityProvider

PAT = Pattern("p0", ("the", "[OBJ]", "can", "[ATTR]", "."))

# full-support joint whose rows/columns are proportional, so the pair
# distribution equals the product of its marginals
UNIFORM3 = np.full((3, 3), 1.0 / 9.0)
OBJECTS = ("g0", "g1", "g2")
ATTRIBUTES = ("m0", "m1", "m2")


def uniform_provider():
    return JointTableProvider(PAT, OBJECTS, ATTRIBUTES, UNIFORM3)


class PointMassProvider(ProbabilityProvider):
    """Always returns probability 1 on a single token."""

    def fill(self, tokens, mask_index, top_k=None):
        if mask_index == PAT.object_position:
            return FillResult(("g0",), np.array([1.0]), 1.0)
        return FillResult(("m0",), np.array([1.0]), 1.0)


class BrokenSumProvider(ProbabilityProvider):
    def fill(self, tokens, mask_index, top_k=None):
        return FillResult(("a", "b"), np.array([0.4, 0.4]), 0.8)


class EmptyVocabProvider(ProbabilityProvider):
    def fill(self, tokens, mask_index, top_k=None):
        return FillResult((), np.array([]), 0.0)


def test_point_mass_chain_is_constant():
    res = gibbs_generate(PointMassProvider(), PAT, steps=50, burn_in=0, seed=0)
    assert set(res.chain) == {("g0", "m0")}
    assert res.empirical.scores.tolist() == [[1.0]]


def test_chain_is_seed_reproducible():
    a = gibbs_generate(uniform_provider(), PAT, steps=200, burn_in=10, seed=42)
    b = gibbs_generate(uniform_provider(), PAT, steps=200, burn_in=10, seed=42)
    assert a.chain == b.chain
    c = gibbs_generate(uniform_provider(), PAT, steps=200, burn_in=10, seed=43)
    assert a.chain != c.chain


def test_empirical_pairs_match_uniform_joint():
    res = gibbs_generate(uniform_provider(), PAT, steps=20_000, burn_in=500, seed=7)
    emp = res.empirical
    assert set(emp.objects) == set(OBJECTS)
    assert set(emp.attributes) == set(ATTRIBUTES)
    # total variation against the constructed joint
    tv = 0.0
    for i, g in enumerate(emp.objects):
        for j, m in enumerate(emp.attributes):
            tv += abs(emp.scores[i, j] - 1.0 / 9.0)
    assert tv / 2 < 0.05


def test_object_marginal_matches_joint_marginal():
    joint = np.array([[0.30, 0.10, 0.05], [0.05, 0.20, 0.05], [0.05, 0.05, 0.15]])
    prov = JointTableProvider(PAT, OBJECTS, ATTRIBUTES, joint)
    res = gibbs_generate(prov, PAT, steps=30_000, burn_in=1_000, seed=11)
    marg = res.object_marginal()
    true = joint.sum(axis=1)
    tv = sum(abs(marg.get(g, 0.0) - true[i]) for i, g in enumerate(OBJECTS)) / 2
    assert tv < 0.05


def test_rejects_bad_step_counts():
    with pytest.raises(ValidationError, match="steps > burn_in"):
        gibbs_generate(uniform_provider(), PAT, steps=10, burn_in=10, seed=0)
    with pytest.raises(ValidationError, match="steps > burn_in"):
        gibbs_generate(uniform_provider(), PAT, steps=10, burn_in=-1, seed=0)


def test_rejects_non_normalized_provider():
    with pytest.raises(ProviderError, match="sums to 0.8"):
        gibbs_generate(BrokenSumProvider(), PAT, steps=10, burn_in=0, seed=0)


def test_rejects_empty_vocabulary():
    with pytest.raises(ProviderError, match="vocabulary is empty"):
        gibbs_generate(EmptyVocabProvider(), PAT, steps=10, burn_in=0, seed=0)


# -- JointTableProvider protocol ------------------------------------------------


def test_provider_conditional_given_attribute():
    joint = np.array([[0.5, 0.0], [0.25, 0.25]])
    prov = JointTableProvider(PAT, ("g0", "g1"), ("m0", "m1"), joint)
    tokens = render_filling(PAT, attribute="m0")
    res = prov.fill(tokens, PAT.object_position)
    assert res.tokens == ("g0", "g1")
    assert np.allclose(res.probs, [2 / 3, 1 / 3])


def test_provider_marginal_when_both_masked():
    prov = uniform_provider()
    res = prov.fill(render_filling(PAT), PAT.object_position)
    assert np.allclose(res.probs, [1 / 3, 1 / 3, 1 / 3])


def test_provider_top_k_truncation_reports_mass():
    joint = np.array([[0.5, 0.0], [0.3, 0.2]])
    prov = JointTableProvider(PAT, ("g0", "g1"), ("m0", "m1"), joint)
    res = prov.fill(render_filling(PAT, attribute="m0"), PAT.object_position, top_k=1)
    assert res.tokens == ("g0",)
    assert res.mass == pytest.approx(0.625)


def test_provider_rejects_non_mask_query():
    prov = uniform_provider()
    tokens = render_filling(PAT, "g0", "m0")
    with pytest.raises(ProviderError, match="mask"):
        prov.fill(tokens, PAT.object_position)


def test_provider_rejects_off_slot_mask_index():
    prov = uniform_provider()
    with pytest.raises(ProviderError, match="slot"):
        prov.fill(render_filling(PAT), 0)


def test_provider_rejects_unknown_filler():
    prov = uniform_provider()
    tokens = render_filling(PAT, obj="zebra")
    with pytest.raises(ProviderError, match="unknown object"):
        prov.fill(tokens, PAT.attribute_position)


def test_provider_rejects_mismatched_template():
    prov = uniform_provider()
    with pytest.raises(ProviderError, match="does not match"):
        prov.fill(("a", "totally", "different", "set", "."), PAT.object_position)


def test_provider_validates_joint_table():
    with pytest.raises(ValidationError, match="sums to"):
        JointTableProvider(PAT, ("g0",), ("m0",), [[0.5]])
    with pytest.raises(ValidationError, match="nonnegative"):
        JointTableProvider(PAT, ("g0", "g1"), ("m0",), [[1.5], [-0.5]])
