"""Built-in curves and the reference-curve regression.

The reference curve is ``y (y^2 - x^3)^2 - x^8``.  Its graph is rebuilt
from the transcribed 5x5 intersection matrix rather than from branch data.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from curvetop.graph import DualGraph, classify, natural_key, validate
from curvetop.lattice import (
    determinant, is_negative_definite, leading_minors, multiplicity_vector)
from curvetop.resolution import parse_branches, resolve

REFERENCE_MATRIX = (
    (-3, 0, 1, 0, 0),
    (0, -2, 1, 0, 0),
    (1, 1, -3, 0, 1),
    (0, 0, 0, -2, 1),
    (0, 0, 1, 1, -1),
)
REFERENCE_LABELS = {"E1": "a1", "E2": "b1", "E3": "c1", "E4": "b2", "E5": "c2", "S": "d"}

# normalized relations: (left side, right side) as syllable tuples
REFERENCE_RELATIONS = (
    ((("c1", 1),), (("a1", 3),)),
    ((("c1", 1),), (("b1", 2),)),
    ((("a1", 1), ("b1", 1), ("c2", 1)), (("c1", 3),)),
    ((("c2", 1),), (("b2", 2),)),
    ((("c1", 1), ("b2", 1), ("d", 1)), (("c2", 1),)),
)
REFERENCE_COMMUTING = (("c1", "a1"), ("c1", "b1"), ("c1", "c2"), ("c2", "b2"), ("c2", "d"))
REFERENCE_MULTIPLICITIES = (4, 6, 12, 13, 26)


def graph_from_matrix(matrix: Sequence[Sequence[int]], ids: Sequence[str],
                      strict: Sequence[tuple[str, str]],
                      labels: dict[str, str] | None = None) -> DualGraph:
    """Graph from an intersection matrix; ``strict`` lists (arrow, curve) pairs."""
    n = len(matrix)
    edges = [(ids[i], ids[j]) for i in range(n) for j in range(i + 1, n) if matrix[i][j]]
    edges += [(d, s) for s, d in strict]
    return DualGraph.build({ids[i]: matrix[i][i] for i in range(n)},
                           [s for s, _ in strict], edges, labels)


def reference_graph() -> DualGraph:
    return graph_from_matrix(REFERENCE_MATRIX, [f"E{i}" for i in range(1, 6)],
                             [("S", "E5")], REFERENCE_LABELS)


CUSP_DOC = {"branches": [{"name": "S", "series": [{"coeff": "1", "exponent": "3/2"}]}]}
TACNODE_DOC = {"branches": [
    {"name": "S1", "series": [{"coeff": "1", "exponent": "2"}]},
    {"name": "S2", "series": [{"coeff": "-1", "exponent": "2"}]},
]}
SMOOTH_DOC = {"branches": [{"name": "S", "series": [{"coeff": "1", "exponent": "1"}]}]}

CUSP_LABELS = {"E1": "a", "E2": "b", "E3": "c", "S": "s"}
SMOOTH_LABELS = {"E1": "e", "S": "s"}


def with_labels(graph: DualGraph, labels: dict[str, str]) -> DualGraph:
    return DualGraph.build(
        {v.id: v.self_intersection for v in graph.vertices if v.exceptional},
        graph.strict_ids(), graph.edges, labels)


def cusp_graph(labelled: bool = True) -> DualGraph:
    g = resolve(parse_branches(CUSP_DOC))
    return with_labels(g, CUSP_LABELS) if labelled else g


def tacnode_graph() -> DualGraph:
    return resolve(parse_branches(TACNODE_DOC))


def smooth_graph(labelled: bool = True) -> DualGraph:
    g = resolve(parse_branches(SMOOTH_DOC))
    return with_labels(g, SMOOTH_LABELS) if labelled else g


BUILTIN = {
    "reference": reference_graph,
    "cusp": cusp_graph,
    "tacnode": tacnode_graph,
    "smooth": smooth_graph,
}


def builtin_graph(name: str) -> DualGraph:
    try:
        return BUILTIN[name]()
    except KeyError:
        raise ValueError(f"unknown built-in curve {name!r}; "
                         f"choose from {', '.join(sorted(BUILTIN))}") from None


# regression ------------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    expected: str
    actual: str

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


def _sides(lhs, rhs) -> frozenset:
    return frozenset((tuple(lhs), tuple(rhs)))


def verify_reference() -> list[Check]:
    """Known facts about the reference curve, recomputed from scratch."""
    from curvetop.mcg import (TwistParam, compare_endos, dehn_twist_endo,
                              generator_catalogue, inner_automorphism, twist_word)
    from curvetop.pi1 import abelianization, check_relations_abelian, presentation

    g = reference_graph()
    checks = []
    ee = [list(r) for r in REFERENCE_MATRIX]
    checks.append(Check("determinant", "-1", str(determinant(ee))))
    checks.append(Check("leading minors", "-3 6 -13 26 -1",
                        " ".join(map(str, leading_minors(ee)))))
    checks.append(Check("negative definite", "True", str(is_negative_definite(ee))))
    checks.append(Check("valid minimal graph", "True", str(validate(g).ok)))

    cls = classify(g)
    checks.append(Check("rupture components", "E3 E5", " ".join(cls.rupture)))
    dead = " ".join(f"{{{','.join(d.tail)}}}@{d.attach}" for d in cls.dead_branches)
    checks.append(Check("dead branches", "{E1}@E3 {E2}@E3 {E4}@E5", dead))
    chains = " ".join(f"{c.end0}-{c.end1}:length={c.length}" for c in cls.chains)
    checks.append(Check("chains", "E3-E5:length=0", chains))

    nu = multiplicity_vector(g).total
    checks.append(Check("multiplicity vector", "4 6 12 13 26", " ".join(map(str, nu))))

    pres = presentation(g)
    got = {_sides(*(tuple(w.syllables) for w in pres.normalized(r)))
           for r in pres.product_relators()}
    want = {_sides(l, r) for l, r in REFERENCE_RELATIONS}
    checks.append(Check("product relations", "match", "match" if got == want else
                        f"mismatch: {sorted(map(sorted, got))}"))
    comm = {frozenset(r.edge) for r in pres.commutator_relators()}
    checks.append(Check("commutator relations", "match",
                        "match" if comm == {frozenset(p) for p in REFERENCE_COMMUTING}
                        else "mismatch"))

    h1 = abelianization(pres, g)
    checks.append(Check("H1 rank", "1", str(h1.rank)))
    checks.append(Check("H1 torsion", "none", " ".join(map(str, h1.torsion)) or "none"))
    images = " ".join(f"{x}:{h1.image(x)[0]}" for x in ("a1", "b1", "c1", "b2", "c2"))
    checks.append(Check("meridians in H1 (times d)", "a1:4 b1:6 c1:12 b2:13 c2:26", images))
    checks.append(Check("relators vanish in H1", "True", str(check_relations_abelian(pres))))

    cat = generator_catalogue(g)
    artin = " ".join(f"{b.rupture}:strands={b.strands},gens={len(b.generators)},"
                     f"trivial={b.effectively_trivial}" for b in cat.artin)
    checks.append(Check("Artin blocks",
                        "E3:strands=2,gens=1,trivial=True E5:strands=2,gens=1,trivial=True",
                        artin))
    checks.append(Check("twist blocks", "1", str(len(cat.twists))))

    chain = cls.chains[0]
    verdicts = {}
    for p, q in ((2, 3), (1, 0)):
        endo = dehn_twist_endo(g, pres, TwistParam(chain.id, p, q))
        inner = inner_automorphism(pres, twist_word(pres, chain.cut_edge, p, q))
        verdicts[(p, q)] = compare_endos(endo, inner, pres, summary=h1)
    v = verdicts[(2, 3)]
    syn = " ".join(sorted((x for x, s in v.items() if s == "equal_syntactic"), key=natural_key))
    ab = " ".join(sorted((x for x, s in v.items() if s == "equal_abelianized"), key=natural_key))
    checks.append(Check("twist (2,3) vs inner: equal_syntactic", "b2 c1 c2 d", syn))
    checks.append(Check("twist (2,3) vs inner: equal_abelianized", "a1 b1", ab))
    all_syn = all(s == "equal_syntactic" for s in verdicts[(1, 0)].values())
    checks.append(Check("twist (1,0) vs inner(c1): all equal_syntactic", "True", str(all_syn)))
    return checks

