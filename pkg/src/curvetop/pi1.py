"""Presentation of the fundamental group of the tube complement.

One generator per component (the meridian of that component), a product
relator around each exceptional curve, and a commutator for each edge.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from curvetop.graph import DualGraph, require_valid
from curvetop.lattice import (
    LatticeError, cokernel, multiplicity_vector, solve_integral)

Syllable = tuple[str, int]


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class Word:
    """Freely reduced word: adjacent syllables have distinct generators."""

    syllables: tuple[Syllable, ...] = ()

    @classmethod
    def of(cls, items: Iterable[Syllable]) -> "Word":
        out: list[list] = []
        for g, e in items:
            if not e:
                continue
            if out and out[-1][0] == g:
                out[-1][1] += e
                if not out[-1][1]:
                    out.pop()
            else:
                out.append([g, e])
        return cls(tuple((g, e) for g, e in out))

    @classmethod
    def gen(cls, g: str, e: int = 1) -> "Word":
        return cls.of([(g, e)])

    def __mul__(self, other: "Word") -> "Word":
        return Word.of(self.syllables + other.syllables)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.syllables)))

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.syllables)

    def __bool__(self) -> bool:
        return bool(self.syllables)

    def generators(self) -> set[str]:
        return {g for g, _ in self.syllables}

    def abelianized(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g, e in self.syllables:
            out[g] = out.get(g, 0) + e
        return {g: e for g, e in out.items() if e}

    def substitute(self, images: dict[str, "Word"]) -> "Word":
        out = Word()
        for g, e in self.syllables:
            img = images.get(g, Word.gen(g))
            piece = img if e > 0 else img.inverse()
            for _ in range(abs(e)):
                out = out * piece
        return out

    def to_json(self) -> list[list]:
        return [[g, e] for g, e in self.syllables]

    def __str__(self) -> str:
        if not self.syllables:
            return "1"
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.syllables)


def commutator(x: str, y: str) -> Word:
    """``[x, y] = x y x^-1 y^-1``."""
    return Word.of([(x, 1), (y, 1), (x, -1), (y, -1)])


@dataclass(frozen=True)
class Relator:
    word: Word
    kind: str  # "product" or "commutator"
    component: str | None = None  # exceptional vertex of a product relator
    edge: tuple[str, str] | None = None


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Relator, ...]
    star_orders: tuple[tuple[str, tuple[str, ...]], ...]
    exceptional: tuple[str, ...] = ()  # generator names of exceptional curves
    strict: tuple[str, ...] = ()
    component_of: tuple[tuple[str, str], ...] = ()  # generator -> component id
    self_intersections: tuple[tuple[str, int], ...] = field(default=())

    def product_relators(self) -> list[Relator]:
        return [r for r in self.relators if r.kind == "product"]

    def commutator_relators(self) -> list[Relator]:
        return [r for r in self.relators if r.kind == "commutator"]

    def commuting_pairs(self) -> set[frozenset[str]]:
        return {frozenset(r.edge) for r in self.commutator_relators()}

    def generator_of(self, component_id: str) -> str:
        for g, c in self.component_of:
            if c == component_id:
                return g
        raise PresentationError(f"no generator for component {component_id!r}")

    def normalized(self, rel: Relator) -> tuple[Word, Word]:
        """Product relator as ``neighbours = c_E^{-(E,E)}``."""
        if rel.kind != "product":
            raise PresentationError("only product relators have a normalized form")
        g = rel.component
        lhs = Word.of([s for s in rel.word.syllables if s[0] != g])
        power = dict(self.self_intersections)[g]
        return lhs, Word.gen(g, -power)

    def with_relators(self, relators: Sequence[Relator]) -> "Presentation":
        return Presentation(self.generators, tuple(relators), self.star_orders,
                            self.exceptional, self.strict, self.component_of,
                            self.self_intersections)

    def to_dict(self) -> dict:
        return {
            "generators": list(self.generators),
            "relators": [r.word.to_json() for r in self.relators],
            "star_orders": {g: list(order) for g, order in self.star_orders},
        }

    def to_text(self) -> str:
        lines = [f"generators: {' '.join(self.generators)}"]
        for r in self.relators:
            if r.kind == "product":
                lhs, rhs = self.normalized(r)
                lines.append(f"{r.word} = 1    ({lhs} = {rhs})")
            else:
                lines.append(f"{r.word} = 1")
        return "\n".join(lines) + "\n"


def presentation(graph: DualGraph) -> Presentation:
    require_valid(graph)
    names = graph.names()
    if len(set(names.values())) != len(names):
        raise PresentationError("component labels must be distinct")
    relators: list[Relator] = []
    stars = []
    selfs = []
    for e in graph.exceptional_ids():
        star = tuple(names[d] for d in graph.neighbors(e))
        stars.append((names[e], star))
        power = graph.self_intersection(e)
        selfs.append((names[e], power))
        word = Word.of([(d, 1) for d in star] + [(names[e], power)])
        relators.append(Relator(word, "product", component=names[e]))
    for a, b in graph.edges:
        relators.append(Relator(commutator(names[a], names[b]), "commutator",
                                edge=(names[a], names[b])))
    return Presentation(
        tuple(names[v] for v in graph.ids()), tuple(relators), tuple(stars),
        tuple(names[v] for v in graph.exceptional_ids()),
        tuple(names[v] for v in graph.strict_ids()),
        tuple((names[v], v) for v in graph.ids()),
        tuple(selfs))


@dataclass(frozen=True)
class PeripheralPair:
    branch: str
    meridian: str
    parallel: str


def peripheral_subgroups(graph: DualGraph, pres: Presentation | None = None
                         ) -> list[PeripheralPair]:
    require_valid(graph)
    names = graph.names()
    out = []
    for s in graph.strict_ids():
        (d,) = graph.neighbors(s)
        out.append(PeripheralPair(s, names[s], names[d]))
    return out


@dataclass(frozen=True)
class H1Summary:
    """``H1`` is free on the strict-transform meridians.

    ``expressions`` gives each exceptional meridian as an integer
    combination of them.
    """

    rank: int
    torsion: tuple[int, ...]
    strict: tuple[str, ...]
    expressions: tuple[tuple[str, tuple[int, ...]], ...]

    def image(self, generator: str) -> tuple[int, ...]:
        if generator in self.strict:
            return tuple(int(s == generator) for s in self.strict)
        return dict(self.expressions)[generator]

    def image_of_word(self, word: Word) -> tuple[int, ...]:
        total = [0] * len(self.strict)
        for g, e in word.syllables:
            for k, v in enumerate(self.image(g)):
                total[k] += e * v
        return tuple(total)

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "torsion": list(self.torsion),
            "basis": list(self.strict),
            "expressions": {g: list(v) for g, v in self.expressions},
        }


def relation_matrix(pres: Presentation) -> list[list[int]]:
    """Abelianized product relators; columns follow ``pres.generators``."""
    index = {g: i for i, g in enumerate(pres.generators)}
    rows = []
    for rel in pres.product_relators():
        row = [0] * len(pres.generators)
        for g, e in rel.word.abelianized().items():
            row[index[g]] += e
        rows.append(row)
    return rows


def abelianization(pres: Presentation, graph: DualGraph | None = None) -> H1Summary:
    """Smith form of the relation matrix, then solve for exceptional meridians.

    With ``graph`` given, the solution is checked against
    :func:`curvetop.lattice.multiplicity_vector`.
    """
    rows = relation_matrix(pres)
    rank, torsion = cokernel(rows, len(pres.generators))
    if torsion:
        raise PresentationError(f"H1 has torsion {list(torsion)}")
    index = {g: i for i, g in enumerate(pres.generators)}
    exc = [index[g] for g in pres.exceptional]
    ee = [[row[j] for j in exc] for row in rows]
    columns = []
    for s in pres.strict:
        rhs = [-row[index[s]] for row in rows]
        try:
            columns.append(solve_integral(ee, rhs))
        except LatticeError as exc_:
            raise PresentationError(f"cannot express meridians: {exc_}") from None
    expressions = tuple(
        (g, tuple(col[i] for col in columns)) for i, g in enumerate(pres.exceptional))
    summary = H1Summary(rank, torsion, pres.strict, expressions)
    if graph is not None:
        mv = multiplicity_vector(graph)
        names = graph.names()
        for k, s in enumerate(mv.strict):
            for i, e in enumerate(mv.exceptional):
                if summary.image(names[e])[pres.strict.index(names[s])] != mv.columns[k][i]:
                    raise PresentationError("H1 solution disagrees with multiplicity vector")
    return summary


def check_relations_abelian(pres: Presentation, summary: H1Summary | None = None) -> bool:
    """Every relator maps to zero in ``H1`` under the meridian assignment."""
    if summary is None:
        # reference assignment from the recorded stars, not from the relators
        # under test, so a corrupted relator cannot vouch for itself
        selfs = dict(pres.self_intersections)
        reference = [
            Relator(Word.of([(d, 1) for d in star] + [(g, selfs[g])]), "product", g)
            for g, star in pres.star_orders]
        try:
            summary = abelianization(pres.with_relators(reference))
        except PresentationError:
            return False
    return all(not any(summary.image_of_word(r.word)) for r in pres.relators)
