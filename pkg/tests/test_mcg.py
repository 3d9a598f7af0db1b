import random

import pytest
from hypothesis import given, strategies as st

from curvetop.fixtures import (REFERENCE_COMMUTING, cusp_graph, reference_graph,
                               smooth_graph, tacnode_graph)
from curvetop.graph import DualGraph, GraphError, classify
from curvetop.mcg import (
    EQUAL_ABELIANIZED, EQUAL_SYNTACTIC, TwistParam, branch_permutation_map, compare_endos,
    dehn_twist_endo, far_side, generator_catalogue, identity_endo, inner_automorphism,
    preserves_relators_abelian, reduce_with_commutations, twist_word)
from curvetop.pi1 import Word, presentation
from curvetop.random_curves import random_curve
from curvetop.resolution import resolve


def W(*items):
    return Word.of(items)


# catalogue -----------------------------------------------------------------------------


def test_reference_catalogue():
    cat = generator_catalogue(reference_graph())
    assert [(b.rupture, b.strands, len(b.generators), b.effectively_trivial)
            for b in cat.artin] == [("E3", 2, 1, True), ("E5", 2, 1, True)]
    assert len(cat.twists) == 1
    assert cat.twists[0].cut_edge == ("E3", "E5")
    assert cat.twists[0].basis == ("c1", "c2")


def test_cusp_catalogue():
    cat = generator_catalogue(cusp_graph())
    assert len(cat.artin) == 1 and cat.artin[0].valence == 3 and cat.artin[0].effectively_trivial
    assert cat.twists == ()


def test_valence_five_block():
    # four smooth transverse branches: one (-1)-curve with four arrows
    g = DualGraph.build(
        {"E1": -1}, ["S1", "S2", "S3", "S4"],
        [("E1", "S1"), ("E1", "S2"), ("E1", "S3"), ("E1", "S4")])
    (block,) = generator_catalogue(g).artin
    assert block.valence == 4 and len(block.generators) == 3
    g5 = DualGraph.build({"E1": -1}, [f"S{i}" for i in range(1, 6)],
                         [("E1", f"S{i}") for i in range(1, 6)])
    (block,) = generator_catalogue(g5).artin
    assert block.valence == 5 and len(block.generators) == 6
    assert not block.effectively_trivial


curves = st.integers(min_value=0, max_value=2 ** 32).map(
    lambda s: random_curve(random.Random(s), max_branches=4))


@given(curves)
def test_catalogue_counts_two_ways(branches):
    g = resolve(branches)
    cls = classify(g)
    expected = sum((len(g.neighbors(r)) - 1) * (len(g.neighbors(r)) - 2) // 2
                   for r in cls.rupture) + 2 * len(cls.chains)
    cat = generator_catalogue(g)
    assert cat.generator_count == expected
    assert len(cat.artin) == len(cls.rupture) and len(cat.twists) == len(cls.chains)


# word reduction -------------------------------------------------------------------------------


def test_reduction_examples():
    assert reduce_with_commutations(W(("c1", 1), ("a1", 1), ("c1", -1)),
                                    [("c1", "a1")]) == W(("a1", 1))
    kept = reduce_with_commutations(W(("c2", 1), ("a1", 1), ("c2", -1)), REFERENCE_COMMUTING)
    assert len(kept) == 3
    assert reduce_with_commutations(W(("x", 1), ("y", 1), ("x", -1), ("y", -1)),
                                    [("x", "y")]) == Word()


def _scramble(rng, word, gens, pairs):
    """Random walk through words equal to ``word`` modulo the commutations."""
    letters = [(g, 1 if e > 0 else -1) for g, e in word.syllables for _ in range(abs(e))]
    for _ in range(30):
        move = rng.random()
        if move < 0.5 and len(letters) > 1:
            i = rng.randrange(len(letters) - 1)
            if frozenset((letters[i][0], letters[i + 1][0])) in pairs:
                letters[i], letters[i + 1] = letters[i + 1], letters[i]
        else:
            g = rng.choice(gens)
            i = rng.randrange(len(letters) + 1)
            letters[i:i] = [(g, 1), (g, -1)]
    return Word.of(letters)


@given(st.integers(0, 2 ** 32))
def test_reduction_is_a_normal_form(seed):
    rng = random.Random(seed)
    gens = ["a", "b", "c", "d", "e"]
    pairs = {frozenset(p) for p in [("a", "b"), ("b", "c"), ("c", "d"), ("a", "e")]}
    word = Word.of((rng.choice(gens), rng.choice([-2, -1, 1, 2])) for _ in range(8))
    target = reduce_with_commutations(word, pairs)
    for _ in range(3):
        other = _scramble(rng, word, gens, pairs)
        assert reduce_with_commutations(other, pairs) == target
    assert reduce_with_commutations(target, pairs) == target
    assert len(target) <= len(word)


# twists ------------------------------------------------------------------------------------------


def test_reference_twist_images():
    g = reference_graph()
    pres = presentation(g)
    p, q = 2, 3
    endo = dehn_twist_endo(g, pres, TwistParam("C1", p, q)).as_dict()
    for near in ("a1", "b1", "c1"):
        assert endo[near] == Word.gen(near)
    assert endo["c2"] == Word.gen("c2")
    assert endo["b2"] == W(("c1", p), ("b2", 1), ("c1", -p))
    assert endo["d"] == W(("c1", p), ("d", 1), ("c1", -p))


def test_far_side_reference():
    assert far_side(reference_graph(), ("E3", "E5")) == {"E5", "E4", "S"}


def test_zero_twist_is_identity():
    g = reference_graph()
    pres = presentation(g)
    endo = dehn_twist_endo(g, pres, TwistParam("C1", 0, 0))
    assert endo == identity_endo(pres)


def test_unknown_chain():
    g = cusp_graph()
    with pytest.raises(GraphError, match="unknown chain"):
        dehn_twist_endo(g, presentation(g), TwistParam("C1", 1, 0))


def test_inner_examples():
    pres = presentation(reference_graph())
    assert inner_automorphism(pres, Word()) == identity_endo(pres)
    inner = inner_automorphism(pres, W(("c1", 2), ("c2", 3)))
    assert reduce_with_commutations(inner["b2"], REFERENCE_COMMUTING, pres.generators) == \
        W(("c1", 2), ("b2", 1), ("c1", -2))
    inner_c1 = inner_automorphism(pres, Word.gen("c1"))
    assert reduce_with_commutations(inner_c1["a1"], REFERENCE_COMMUTING) == Word.gen("a1")


@pytest.mark.parametrize("p, q", [(2, 3), (1, 1), (-1, 4), (0, 1)])
def test_twist_versus_inner(p, q):
    g = reference_graph()
    pres = presentation(g)
    endo = dehn_twist_endo(g, pres, TwistParam("C1", p, q))
    inner = inner_automorphism(pres, twist_word(pres, ("E3", "E5"), p, q))
    verdict = compare_endos(endo, inner, pres)
    assert {x for x, v in verdict.items() if v == EQUAL_SYNTACTIC} == {"c1", "c2", "b2", "d"}
    assert {x for x, v in verdict.items() if v == EQUAL_ABELIANIZED} == {"a1", "b1"}


def test_pure_first_coordinate_twist_is_inner():
    g = reference_graph()
    pres = presentation(g)
    endo = dehn_twist_endo(g, pres, TwistParam("C1", 1, 0))
    inner = inner_automorphism(pres, Word.gen("c1"))
    assert set(compare_endos(endo, inner, pres).values()) == {EQUAL_SYNTACTIC}


def test_identity_versus_identity():
    pres = presentation(reference_graph())
    verdict = compare_endos(identity_endo(pres), identity_endo(pres), pres)
    assert set(verdict.values()) == {EQUAL_SYNTACTIC}


@given(st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4))
def test_twists_compose_additively(p, q, p2, q2):
    g = reference_graph()
    pres = presentation(g)
    pairs = pres.commuting_pairs()
    first = dehn_twist_endo(g, pres, TwistParam("C1", p, q))
    second = dehn_twist_endo(g, pres, TwistParam("C1", p2, q2))
    total = dehn_twist_endo(g, pres, TwistParam("C1", p + p2, q + q2))
    composed = second.compose(first)
    for gen in pres.generators:
        assert reduce_with_commutations(composed[gen], pairs, pres.generators) == total[gen]


@given(curves, st.integers(-3, 3), st.integers(-3, 3))
def test_twists_preserve_relators_in_h1(branches, p, q):
    g = resolve(branches)
    pres = presentation(g)
    for chain in classify(g).chains:
        endo = dehn_twist_endo(g, pres, TwistParam(chain.id, p, q))
        assert preserves_relators_abelian(endo, pres)


# branch permutations ---------------------------------------------------------------------------


def test_branch_permutation_examples():
    tac = branch_permutation_map(tacnode_graph())
    assert (tac.group_order, tac.image_order, tac.injective) == (2, 2, True)
    ref = branch_permutation_map(reference_graph())
    assert (ref.group_order, ref.injective) == (1, True)
    assert branch_permutation_map(smooth_graph()).injective


@given(curves)
def test_branch_permutation_injective(branches):
    assert branch_permutation_map(resolve(branches)).injective
