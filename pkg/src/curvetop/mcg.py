"""Mapping-class generators and their action on the presentation.

Each rupture vertex contributes a pure braid block (strand count one less
than its valence, taken modulo the center); each chain contributes a rank-2
family of Dehn twists, acting on generators beyond the cut edge by
conjugation.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from curvetop.graph import DualGraph, GraphError, TreeAutomorphism, classify, \
    natural_key, tree_automorphisms
from curvetop.pi1 import H1Summary, Presentation, PresentationError, Word, abelianization

EQUAL_SYNTACTIC = "equal_syntactic"
EQUAL_ABELIANIZED = "equal_abelianized"
UNVERIFIED = "unverified"
DIFFERENT = "different"


# catalogue ---------------------------------------------------------------------


@dataclass(frozen=True)
class ArtinBlock:
    rupture: str
    valence: int
    generators: tuple[str, ...]
    modulo_center: bool = True

    @property
    def strands(self) -> int:
        return self.valence - 1

    @property
    def effectively_trivial(self) -> bool:
        # the pure braid group on <= 2 strands is its own center
        return self.strands <= 2


@dataclass(frozen=True)
class TwistBlock:
    chain: str
    cut_edge: tuple[str, str]
    basis: tuple[str, str]  # generator names of the cut-edge ends


@dataclass(frozen=True)
class McgCatalogue:
    artin: tuple[ArtinBlock, ...]
    twists: tuple[TwistBlock, ...]

    @property
    def generator_count(self) -> int:
        return sum(len(b.generators) for b in self.artin) + 2 * len(self.twists)

    def to_dict(self) -> dict:
        return {
            "artin_blocks": [{
                "rupture": b.rupture, "valence": b.valence, "strands": b.strands,
                "generators": list(b.generators), "modulo_center": b.modulo_center,
                "effectively_trivial": b.effectively_trivial} for b in self.artin],
            "twist_blocks": [{
                "chain": t.chain, "cut_edge": list(t.cut_edge), "basis": list(t.basis)}
                for t in self.twists],
            "generator_count": self.generator_count,
        }


def artin_generator_labels(strands: int) -> tuple[str, ...]:
    """``A(i,j)``: the pure braid where strand ``j`` loops around strand ``i``."""
    return tuple(f"A({i},{j})" for i in range(1, strands + 1)
                 for j in range(i + 1, strands + 1))


def generator_catalogue(graph: DualGraph) -> McgCatalogue:
    cls = classify(graph)
    names = graph.names()
    artin = tuple(
        ArtinBlock(r, len(graph.neighbors(r)),
                   artin_generator_labels(len(graph.neighbors(r)) - 1))
        for r in cls.rupture)
    twists = tuple(
        TwistBlock(c.id, c.cut_edge, (names[c.cut_edge[0]], names[c.cut_edge[1]]))
        for c in cls.chains)
    return McgCatalogue(artin, twists)


# word reduction ------------------------------------------------------------------


def _pairs(comm_pairs: Iterable) -> set[frozenset[str]]:
    return {frozenset(p) for p in comm_pairs}


def reduce_with_commutations(word: Word, comm_pairs: Iterable,
                             order: Sequence[str] | None = None) -> Word:
    """Normal form modulo free reduction and the given commutations.

    Syllables are merged with an earlier syllable of the same generator
    whenever everything in between commutes with it; the result is then
    rewritten to the lexicographically least arrangement (generators ranked
    by ``order``, else naturally) reachable by swapping commuting neighbours.
    """
    pairs = _pairs(comm_pairs)

    def commute(x: str, y: str) -> bool:
        return frozenset((x, y)) in pairs

    stack: list[list] = []
    for g, e in word.syllables:
        i = len(stack) - 1
        while i >= 0 and stack[i][0] != g and commute(stack[i][0], g):
            i -= 1
        if i >= 0 and stack[i][0] == g:
            stack[i][1] += e
            if not stack[i][1]:
                del stack[i]
        else:
            stack.append([g, e])

    if order is not None:
        rank = {g: k for k, g in enumerate(order)}
        key = lambda g: (0, rank[g]) if g in rank else (1, natural_key(g))
    else:
        key = lambda g: (1, natural_key(g))
    rest = [tuple(s) for s in stack]
    out: list[tuple[str, int]] = []
    while rest:
        best = None
        for i, (g, _) in enumerate(rest):
            if all(commute(h, g) for h, _ in rest[:i]):
                if best is None or key(g) < key(rest[best][0]):
                    best = i
        out.append(rest.pop(best))
    return Word.of(out)


# endomorphisms -------------------------------------------------------------------


@dataclass(frozen=True)
class EndoMap:
    images: tuple[tuple[str, Word], ...]

    def as_dict(self) -> dict[str, Word]:
        return dict(self.images)

    def __getitem__(self, g: str) -> Word:
        return self.as_dict()[g]

    def apply(self, word: Word) -> Word:
        return word.substitute(self.as_dict())

    def compose(self, other: "EndoMap") -> "EndoMap":
        """``self ∘ other``."""
        return EndoMap(tuple((g, self.apply(w)) for g, w in other.images))

    def to_dict(self) -> dict:
        return {g: w.to_json() for g, w in self.images}


@dataclass(frozen=True)
class TwistParam:
    chain: str
    p: int
    q: int


def far_side(graph: DualGraph, cut_edge: tuple[str, str]) -> set[str]:
    """Components on the ``cut_edge[1]`` side once the cut edge is removed."""
    d0, d1 = cut_edge
    adj = graph.adjacency()
    seen = {d1}
    queue = deque([d1])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen and not (v == d1 and w == d0):
                seen.add(w)
                queue.append(w)
    return seen


def twist_word(pres: Presentation, cut_edge: tuple[str, str], p: int, q: int) -> Word:
    return Word.of([(pres.generator_of(cut_edge[0]), p), (pres.generator_of(cut_edge[1]), q)])


def dehn_twist_endo(graph: DualGraph, pres: Presentation, t: TwistParam) -> EndoMap:
    cls = classify(graph)
    try:
        chain = cls.chain(t.chain)
    except GraphError:
        raise GraphError(f"unknown chain {t.chain!r}") from None
    far = {pres.generator_of(v) for v in far_side(graph, chain.cut_edge)}
    w = twist_word(pres, chain.cut_edge, t.p, t.q)
    pairs = pres.commuting_pairs()
    images = []
    for g in pres.generators:
        img = Word.gen(g)
        if g in far:
            img = reduce_with_commutations(w * img * w.inverse(), pairs, pres.generators)
        images.append((g, img))
    return EndoMap(tuple(images))


def inner_automorphism(pres: Presentation, w: Word) -> EndoMap:
    return EndoMap(tuple((g, w * Word.gen(g) * w.inverse()) for g in pres.generators))


def identity_endo(pres: Presentation) -> EndoMap:
    return inner_automorphism(pres, Word())


def compare_endos(e1: EndoMap, e2: EndoMap, pres: Presentation,
                  comm_pairs: Iterable | None = None,
                  summary: H1Summary | None = None) -> dict[str, str]:
    """Per-generator verdict.

    Reduced images that coincide are ``equal_syntactic``.  Otherwise the
    images are compared in ``H1``: ``equal_abelianized`` or ``different``;
    ``unverified`` when no abelianization is available.
    """
    pairs = _pairs(pres.commuting_pairs() if comm_pairs is None else comm_pairs)
    if summary is None:
        try:
            summary = abelianization(pres)
        except PresentationError:
            summary = None
    a, b = e1.as_dict(), e2.as_dict()
    if set(a) != set(b):
        raise ValueError("endomorphisms have different generator sets")
    out = {}
    for g in pres.generators:
        ra = reduce_with_commutations(a[g], pairs, pres.generators)
        rb = reduce_with_commutations(b[g], pairs, pres.generators)
        if ra == rb:
            out[g] = EQUAL_SYNTACTIC
        elif summary is None:
            out[g] = UNVERIFIED
        elif summary.image_of_word(ra) == summary.image_of_word(rb):
            out[g] = EQUAL_ABELIANIZED
        else:
            out[g] = DIFFERENT
    return out


def preserves_relators_abelian(endo: EndoMap, pres: Presentation,
                               summary: H1Summary | None = None) -> bool:
    summary = summary or abelianization(pres)
    return all(not any(summary.image_of_word(endo.apply(r.word))) for r in pres.relators)


# branch permutations --------------------------------------------------------------


@dataclass(frozen=True)
class BranchPermutationData:
    automorphisms: tuple[TreeAutomorphism, ...]
    permutations: tuple[tuple[tuple[str, str], ...], ...]

    @property
    def group_order(self) -> int:
        return len(self.automorphisms)

    @property
    def image_order(self) -> int:
        return len(set(self.permutations))

    @property
    def injective(self) -> bool:
        return self.image_order == self.group_order

    def to_dict(self) -> dict:
        return {
            "group_order": self.group_order,
            "image_order": self.image_order,
            "injective": self.injective,
            "automorphisms": [
                {"mapping": dict(a.mapping), "branch_permutation": dict(p)}
                for a, p in zip(self.automorphisms, self.permutations)],
        }


def branch_permutation_map(graph: DualGraph) -> BranchPermutationData:
    autos = tree_automorphisms(graph)
    perms = tuple(
        tuple(sorted(a.strict_permutation(graph).items(), key=lambda kv: natural_key(kv[0])))
        for a in autos)
    return BranchPermutationData(tuple(autos), perms)
