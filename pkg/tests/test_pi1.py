import random

import pytest
from hypothesis import given, strategies as st

from curvetop.fixtures import (REFERENCE_COMMUTING, REFERENCE_RELATIONS, cusp_graph,
                               reference_graph, smooth_graph, tacnode_graph)
from curvetop.lattice import multiplicity_vector
from curvetop.pi1 import (
    PresentationError, Relator, Word, abelianization, check_relations_abelian, commutator,
    peripheral_subgroups, presentation, relation_matrix)
from curvetop.random_curves import random_curve
from curvetop.resolution import resolve


def sides(pres, rel):
    lhs, rhs = pres.normalized(rel)
    return frozenset((lhs.syllables, rhs.syllables))


def test_reference_relations():
    pres = presentation(reference_graph())
    got = {sides(pres, r) for r in pres.product_relators()}
    assert got == {frozenset((l, r)) for l, r in REFERENCE_RELATIONS}
    pairs = {frozenset(r.edge) for r in pres.commutator_relators()}
    assert pairs == {frozenset(p) for p in REFERENCE_COMMUTING}


def test_reference_star_orders_follow_edges():
    pres = presentation(reference_graph())
    stars = dict(pres.star_orders)
    assert stars["c1"] == ("a1", "b1", "c2")
    assert stars["c2"] == ("c1", "b2", "d")


def test_cusp_presentation():
    pres = presentation(cusp_graph())
    words = [str(r.word) for r in pres.product_relators()]
    assert words == ["c a^-3", "c b^-2", "a b s c^-1"]
    assert {frozenset(r.edge) for r in pres.commutator_relators()} == {
        frozenset(("c", "a")), frozenset(("c", "b")), frozenset(("c", "s"))}


def test_smooth_presentation_is_infinite_cyclic():
    g = smooth_graph()
    pres = presentation(g)
    assert [str(r.word) for r in pres.relators] == ["s e^-1", "e s e^-1 s^-1"]
    h1 = abelianization(pres, g)
    assert h1.rank == 1 and h1.image("e") == (1,)


def test_peripheral_pairs():
    (p,) = peripheral_subgroups(reference_graph())
    assert (p.branch, p.meridian, p.parallel) == ("S", "d", "c2")
    tac = peripheral_subgroups(tacnode_graph())
    assert [(p.branch, p.parallel) for p in tac] == [("S1", "E2"), ("S2", "E2")]
    (p,) = peripheral_subgroups(smooth_graph())
    assert (p.meridian, p.parallel) == ("s", "e")


def test_reference_abelianization():
    g = reference_graph()
    h1 = abelianization(presentation(g), g)
    assert h1.rank == 1 and h1.torsion == ()
    assert {x: h1.image(x)[0] for x in ("a1", "b1", "c1", "b2", "c2")} == {
        "a1": 4, "b1": 6, "c1": 12, "b2": 13, "c2": 26}


def test_cusp_abelianization():
    h1 = abelianization(presentation(cusp_graph()))
    assert [h1.image(x)[0] for x in "abc"] == [2, 3, 6]


def test_check_relations():
    assert check_relations_abelian(presentation(reference_graph()))
    assert check_relations_abelian(presentation(cusp_graph()))


@pytest.mark.parametrize("index", range(10))
def test_perturbed_exponent_detected(index):
    pres = presentation(reference_graph())
    rels = list(pres.relators)
    rel = rels[index]
    g, e = rel.word.syllables[0]
    bumped = Word.of([(g, e + 1)] + list(rel.word.syllables[1:]))
    rels[index] = Relator(bumped, rel.kind, rel.component, rel.edge)
    assert not check_relations_abelian(pres.with_relators(rels))


def test_torsion_detected():
    # a lone (-2)-curve with no arrows: H1 = Z/2
    from curvetop.pi1 import Presentation
    pres = Presentation(("e",), (Relator(Word.gen("e", -2), "product", "e"),),
                        (("e", ()),), ("e",), (), (("e", "E1"),), (("e", -2),))
    with pytest.raises(PresentationError, match="torsion"):
        abelianization(pres)


def test_word_basics():
    w = Word.of([("a", 1), ("b", 2), ("b", -2), ("a", 1)])
    assert w.syllables == (("a", 2),)
    assert (w * w.inverse()).syllables == ()
    assert str(commutator("x", "y")) == "x y x^-1 y^-1"
    assert len(commutator("x", "y")) == 4
    assert Word.gen("a").substitute({"a": Word.of([("b", 1), ("c", 1)])}) == \
        Word.of([("b", 1), ("c", 1)])


def test_json_and_text_rendering():
    pres = presentation(cusp_graph())
    doc = pres.to_dict()
    assert doc["generators"] == ["a", "b", "c", "s"]
    assert doc["relators"][0] == [["c", 1], ["a", -3]]
    assert "c a^-3 = 1" in pres.to_text()


curves = st.integers(min_value=0, max_value=2 ** 32).map(
    lambda s: random_curve(random.Random(s), max_branches=4))


@given(curves)
def test_presentation_invariants(branches):
    g = resolve(branches)
    pres = presentation(g)
    assert len(pres.product_relators()) == len(g.exceptional_ids())
    assert len(pres.commutator_relators()) == len(g.edges)
    assert len(pres.generators) - len(pres.product_relators()) == len(branches)
    for r in pres.relators:
        s = r.word.syllables
        assert all(a[0] != b[0] for a, b in zip(s, s[1:]))
    h1 = abelianization(pres, g)
    assert h1.rank == len(branches) and h1.torsion == ()
    mv = multiplicity_vector(g)
    for k, s_id in enumerate(mv.strict):
        for i, e_id in enumerate(mv.exceptional):
            assert h1.image(e_id)[pres.strict.index(s_id)] == mv.columns[k][i]
    assert check_relations_abelian(pres, h1)
    assert len(relation_matrix(pres)) == len(g.exceptional_ids())
