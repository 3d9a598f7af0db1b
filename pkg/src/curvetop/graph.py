"""Weighted dual graphs of minimal embedded resolutions.

A dual graph has one vertex per irreducible component of the total
transform: exceptional curves carry their self-intersection, strict
transforms (one per branch of the curve) are drawn as arrows.
"""
from __future__ import annotations

import itertools
import json
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

EXCEPTIONAL = "exceptional"
STRICT = "strict_transform"
KINDS = (EXCEPTIONAL, STRICT)


class GraphError(ValueError):
    """Raised when an operation receives a graph it cannot work with."""


class GraphParseError(GraphError):
    """Malformed graph document.

    ``path`` names the offending field (``vertices[2].self_intersection``),
    ``line``/``column`` locate JSON syntax errors.
    """

    def __init__(self, message: str, path: str = "", line: int | None = None,
                 column: int | None = None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path:
            where.append(path)
        if line is not None:
            where.append(f"line {line} column {column}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


def natural_key(ident: str) -> tuple:
    """Sort key placing ``E2`` before ``E10``."""
    return tuple(int(tok) if tok.isdigit() else tok
                 for tok in re.split(r"(\d+)", ident))


@dataclass(frozen=True)
class Component:
    id: str
    kind: str
    self_intersection: int | None = None
    label: str | None = None

    @property
    def exceptional(self) -> bool:
        return self.kind == EXCEPTIONAL

    @property
    def name(self) -> str:
        """Display / generator name: the label when one is set."""
        return self.label or self.id


@dataclass(frozen=True)
class DualGraph:
    """Vertices and edges in serialization order.

    Edge order is significant: it fixes the cyclic order of the star of
    each vertex used when writing presentations.
    """

    vertices: tuple[Component, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))

    @classmethod
    def build(cls, exceptional: dict[str, int], strict: Iterable[str],
              edges: Iterable[tuple[str, str]],
              labels: dict[str, str] | None = None) -> "DualGraph":
        labels = labels or {}
        verts = [Component(v, EXCEPTIONAL, e, labels.get(v))
                 for v, e in exceptional.items()]
        verts += [Component(s, STRICT, None, labels.get(s)) for s in strict]
        return cls(tuple(verts), tuple(edges))

    # lookups ------------------------------------------------------------

    def component(self, ident: str) -> Component:
        for v in self.vertices:
            if v.id == ident:
                return v
        raise GraphError(f"unknown component {ident!r}")

    def ids(self) -> list[str]:
        return [v.id for v in self.vertices]

    def exceptional_ids(self) -> list[str]:
        return [v.id for v in self.vertices if v.kind == EXCEPTIONAL]

    def strict_ids(self) -> list[str]:
        return [v.id for v in self.vertices if v.kind == STRICT]

    def self_intersection(self, ident: str) -> int:
        comp = self.component(ident)
        if comp.kind != EXCEPTIONAL:
            raise GraphError(f"{ident!r} is not an exceptional component")
        return comp.self_intersection

    def neighbors(self, ident: str) -> list[str]:
        """Adjacent ids in edge-serialization order."""
        out = []
        for a, b in self.edges:
            if a == ident:
                out.append(b)
            elif b == ident:
                out.append(a)
        return out

    def adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {v.id: [] for v in self.vertices}
        for a, b in self.edges:
            if a in adj:
                adj[a].append(b)
            if b in adj:
                adj[b].append(a)
        return adj

    def is_exceptional(self, ident: str) -> bool:
        return self.component(ident).kind == EXCEPTIONAL

    def names(self) -> dict[str, str]:
        return {v.id: v.name for v in self.vertices}


def valence(graph: DualGraph, ident: str) -> int:
    """Number of components adjacent to ``ident``; strict transforms count."""
    graph.component(ident)
    return len(graph.neighbors(ident))


# validation ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def add(self, code: str, message: str) -> None:
        self.violations.append(Violation(code, message))

    def __bool__(self) -> bool:
        return self.ok


def _components_of(ids: Sequence[str], adj: dict[str, list[str]]) -> int:
    seen: set[str] = set()
    count = 0
    for start in ids:
        if start in seen:
            continue
        count += 1
        stack = [start]
        seen.add(start)
        while stack:
            cur = stack.pop()
            for nxt in adj.get(cur, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return count


def validate(graph: DualGraph) -> ValidationReport:
    """Check the dual-graph invariants; violations are returned, not raised."""
    from curvetop import lattice

    report = ValidationReport()
    ids = graph.ids()
    known = set(ids)
    if len(known) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1}, key=natural_key)
        report.add("duplicate_id", f"duplicate component ids: {', '.join(dupes)}")

    for v in graph.vertices:
        if v.kind not in KINDS:
            report.add("bad_kind", f"{v.id}: unknown kind {v.kind!r}")
        elif v.kind == EXCEPTIONAL:
            if v.self_intersection is None:
                report.add("missing_self_intersection",
                           f"{v.id}: exceptional component without self_intersection")
            elif v.self_intersection > -1:
                report.add("bad_self_intersection",
                           f"{v.id}: self-intersection {v.self_intersection} must be <= -1")
        elif v.self_intersection is not None:
            report.add("bad_self_intersection",
                       f"{v.id}: strict transform carries a self_intersection")

    if not graph.exceptional_ids():
        report.add("no_exceptional", "graph has no exceptional component")

    seen_edges: set[frozenset] = set()
    edges_ok = True
    for a, b in graph.edges:
        if a not in known or b not in known:
            report.add("unknown_vertex", f"edge ({a}, {b}) references an unknown component")
            edges_ok = False
            continue
        if a == b:
            report.add("loop", f"edge ({a}, {b}) is a loop")
            edges_ok = False
            continue
        key = frozenset((a, b))
        if key in seen_edges:
            report.add("multi_edge", f"components {a} and {b} meet more than once")
            edges_ok = False
        seen_edges.add(key)
    if not edges_ok or report.codes() & {"duplicate_id", "bad_kind"}:
        return report

    adj = graph.adjacency()
    n_parts = _components_of(ids, adj)
    if ids and (n_parts != 1 or len(graph.edges) != len(ids) - 1):
        report.add("not_a_tree", "graph is not a tree"
                   + (" (disconnected)" if n_parts != 1 else " (contains a cycle)"))

    by_id = {v.id: v for v in graph.vertices}
    for s in graph.strict_ids():
        deg = len(adj[s])
        if deg != 1:
            report.add("strict_degree", f"strict transform {s} has degree {deg}, expected 1")
        for nb in adj[s]:
            if by_id[nb].kind == STRICT:
                report.add("strict_adjacent", f"strict transforms {s} and {nb} are adjacent")

    exc = graph.exceptional_ids()
    if len(exc) > 1:
        for e in exc:
            comp = by_id[e]
            if comp.self_intersection == -1 and len(adj[e]) <= 2:
                report.add("non_minimal",
                           f"{e}: (-1)-component of valence {len(adj[e])} can be blown down")
    if report.codes() & {"missing_self_intersection", "bad_self_intersection"}:
        return report

    if "not_a_tree" not in report.codes() and exc:
        ee = lattice.intersection_matrix(graph, check=False).ee
        det = lattice.determinant(ee)
        if abs(det) != 1:
            report.add("not_unimodular", f"det(E,E) = {det}, expected +-1")
        if not lattice.is_negative_definite(ee):
            report.add("not_negative_definite", "intersection form is not negative definite")

    for s in graph.strict_ids():
        nbs = adj[s]
        if len(nbs) == 1 and by_id[nbs[0]].kind == EXCEPTIONAL and len(adj[nbs[0]]) < 3 \
                and len(exc) > 1:
            report.notes.append(
                f"strict transform {s} attaches to non-rupture component {nbs[0]}")
    return report


def require_valid(graph: DualGraph) -> None:
    report = validate(graph)
    if not report.ok:
        raise GraphError("invalid dual graph: "
                         + "; ".join(v.message for v in report.violations))


# classification -----------------------------------------------------------


@dataclass(frozen=True)
class ChainRecord:
    """Chain D0, D1..Dl, D(l+1) of valence-2 components between rupture vertices."""

    id: str
    end0: str
    end1: str
    interior: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.interior)

    @property
    def members(self) -> tuple[str, ...]:
        return (self.end0, *self.interior, self.end1)

    @property
    def cut_edge(self) -> tuple[str, str]:
        return (self.end0, self.interior[0] if self.interior else self.end1)


@dataclass(frozen=True)
class DeadBranchRecord:
    id: str
    attach: str
    tail: tuple[str, ...]

    @property
    def members(self) -> tuple[str, ...]:
        return (self.attach, *self.tail)


@dataclass(frozen=True)
class BranchChainRecord:
    """Path from a rupture vertex to a strict transform through valence-2 curves."""

    rupture: str
    interior: tuple[str, ...]
    strict: str


@dataclass(frozen=True)
class Classification:
    rupture: tuple[str, ...]
    chains: tuple[ChainRecord, ...]
    dead_branches: tuple[DeadBranchRecord, ...]
    strict_pairs: tuple[tuple[str, str], ...]
    branch_chains: tuple[BranchChainRecord, ...] = ()
    degenerate: bool = False
    flags: tuple[str, ...] = ()

    def chain(self, ident: str) -> ChainRecord:
        for c in self.chains:
            if ident in (c.id, f"{c.end0}-{c.end1}", f"{c.end1}-{c.end0}"):
                return c
        raise GraphError(f"unknown chain {ident!r}")

    def dead_branch(self, ident: str) -> DeadBranchRecord:
        for d in self.dead_branches:
            if d.id == ident:
                return d
        raise GraphError(f"unknown dead branch {ident!r}")


def classify(graph: DualGraph) -> Classification:
    """Split the tree into rupture vertices, chains, dead branches and arrows."""
    require_valid(graph)
    adj = graph.adjacency()
    exc = set(graph.exceptional_ids())
    rupture = sorted((v for v in exc if len(adj[v]) >= 3), key=natural_key)
    rset = set(rupture)
    strict_pairs = sorted(((s, adj[s][0]) for s in graph.strict_ids()),
                          key=lambda p: natural_key(p[0]))
    flags = []
    if not rupture:
        if graph.strict_ids():
            flags.append("no rupture component: curve is smooth or a node")
        return Classification((), (), (), tuple(strict_pairs), (), True, tuple(flags))

    chains: dict[tuple, tuple[str, str, tuple[str, ...]]] = {}
    dead: list[tuple[str, tuple[str, ...]]] = []
    arrows: list[BranchChainRecord] = []
    for r in rupture:
        for first in adj[r]:
            path: list[str] = []
            prev, cur = r, first
            while cur in exc and cur not in rset and len(adj[cur]) == 2:
                path.append(cur)
                prev, cur = cur, next(x for x in adj[cur] if x != prev)
            if cur in rset:
                a, b, inner = r, cur, tuple(path)
                if natural_key(b) < natural_key(a):
                    a, b, inner = b, a, inner[::-1]
                chains.setdefault((a, b, inner), (a, b, inner))
            elif cur in exc:
                # valence-1 exceptional end
                dead.append((r, tuple(path) + (cur,)))
            else:
                arrows.append(BranchChainRecord(r, tuple(path), cur))
                if path:
                    flags.append(f"strict transform {cur} attaches to non-rupture "
                                 f"component {path[-1]}")

    chain_recs = tuple(
        ChainRecord(f"C{i}", a, b, inner)
        for i, (a, b, inner) in enumerate(
            sorted(chains.values(),
                   key=lambda c: (natural_key(c[0]), natural_key(c[1]),
                                  [natural_key(x) for x in c[2]])), 1))
    dead_recs = tuple(
        DeadBranchRecord(f"M{i}", a, tail)
        for i, (a, tail) in enumerate(
            sorted(dead, key=lambda d: (natural_key(d[0]), natural_key(d[1][0]))), 1))
    arrows.sort(key=lambda a: natural_key(a.strict))
    return Classification(tuple(rupture), chain_recs, dead_recs, tuple(strict_pairs),
                          tuple(arrows), False, tuple(flags))


@dataclass(frozen=True)
class JsjGraph:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]  # (chain id, end0, end1)


def jsj_graph(source: DualGraph | Classification) -> JsjGraph:
    """Rupture vertices joined by one edge per chain (multigraph semantics)."""
    cls = source if isinstance(source, Classification) else classify(source)
    return JsjGraph(tuple(cls.rupture),
                    tuple((c.id, c.end0, c.end1) for c in cls.chains))


# automorphisms ------------------------------------------------------------


@dataclass(frozen=True)
class TreeAutomorphism:
    mapping: tuple[tuple[str, str], ...]

    @classmethod
    def from_dict(cls, mapping: dict[str, str]) -> "TreeAutomorphism":
        return cls(tuple(sorted(mapping.items(), key=lambda kv: natural_key(kv[0]))))

    def as_dict(self) -> dict[str, str]:
        return dict(self.mapping)

    def __call__(self, ident: str) -> str:
        return self.as_dict()[ident]

    def compose(self, other: "TreeAutomorphism") -> "TreeAutomorphism":
        """``self ∘ other``."""
        mine = self.as_dict()
        return TreeAutomorphism.from_dict({k: mine[v] for k, v in other.mapping})

    def inverse(self) -> "TreeAutomorphism":
        return TreeAutomorphism.from_dict({v: k for k, v in self.mapping})

    def is_identity(self) -> bool:
        return all(k == v for k, v in self.mapping)

    def strict_permutation(self, graph: DualGraph) -> dict[str, str]:
        mine = self.as_dict()
        return {s: mine[s] for s in graph.strict_ids()}


def _tree_centers(ids: list[str], adj: dict[str, list[str]]) -> list[str]:
    degree = {v: len(adj[v]) for v in ids}
    leaves = [v for v in ids if degree[v] <= 1]
    remaining = len(ids)
    removed: set[str] = set()
    while remaining > 2:
        remaining -= len(leaves)
        nxt = []
        for leaf in leaves:
            removed.add(leaf)
            for nb in adj[leaf]:
                if nb not in removed:
                    degree[nb] -= 1
                    if degree[nb] == 1:
                        nxt.append(nb)
        leaves = nxt
    return sorted((v for v in ids if v not in removed), key=natural_key)


def tree_automorphisms(graph: DualGraph) -> list[TreeAutomorphism]:
    """All automorphisms of the weighted tree (kinds and weights preserved).

    Enumeration goes through AHU-style canonical labels of the tree rooted at
    its center, so only label-preserving child bijections are explored.
    """
    require_valid(graph)
    adj = graph.adjacency()
    ids = graph.ids()
    by_id = {v.id: v for v in graph.vertices}
    centers = _tree_centers(ids, adj)
    root = "\0root"
    children: dict[str, list[str]] = {}
    if len(centers) == 1:
        top = centers[0]
        blocked = {top: None}
    else:
        top = root
        children[root] = list(centers)
        blocked = {centers[0]: centers[1], centers[1]: centers[0]}

    def build(v: str, parent: str | None) -> None:
        kids = [w for w in adj[v] if w != parent]
        children[v] = kids
        for w in kids:
            build(w, v)

    if top == root:
        for c in centers:
            build(c, blocked[c])
    else:
        build(top, None)

    canon: dict[str, tuple] = {}

    def label(v: str) -> tuple:
        if v not in canon:
            kids = sorted(label(w) for w in children[v])
            if v == root:
                weight = ("root",)
            else:
                comp = by_id[v]
                weight = (comp.kind, comp.self_intersection or 0)
            canon[v] = (weight, tuple(kids))
        return canon[v]

    label(top)

    def isos(u: str, w: str) -> Iterator[dict[str, str]]:
        groups: dict[tuple, list[str]] = defaultdict(list)
        for c in children[u]:
            groups[canon[c]].append(c)
        targets: dict[tuple, list[str]] = defaultdict(list)
        for c in children[w]:
            targets[canon[c]].append(c)
        per_group = []
        for key in sorted(groups):
            src = groups[key]
            options = []
            for perm in itertools.permutations(targets[key]):
                sub = [list(isos(a, b)) for a, b in zip(src, perm)]
                for combo in itertools.product(*sub):
                    merged: dict[str, str] = {}
                    for part in combo:
                        merged.update(part)
                    options.append(merged)
            per_group.append(options)
        for combo in itertools.product(*per_group):
            mapping = {u: w}
            for part in combo:
                mapping.update(part)
            yield mapping

    result = []
    for m in isos(top, top):
        m.pop(root, None)
        result.append(TreeAutomorphism.from_dict(m))
    result.sort(key=lambda a: (not a.is_identity(),
                               [natural_key(v) for _, v in a.mapping]))
    return result


# serialization ------------------------------------------------------------


def to_dict(graph: DualGraph) -> dict:
    verts = []
    for v in graph.vertices:
        item: dict = {"id": v.id, "kind": v.kind}
        if v.kind == EXCEPTIONAL:
            item["self_intersection"] = v.self_intersection
        if v.label is not None:
            item["label"] = v.label
        verts.append(item)
    return {"vertices": verts, "edges": [list(e) for e in graph.edges]}


def to_json(graph: DualGraph, indent: int | None = 2) -> str:
    return json.dumps(to_dict(graph), indent=indent)


def from_dict(doc: object) -> DualGraph:
    if not isinstance(doc, dict):
        raise GraphParseError("graph document must be a JSON object", "$")
    for key in ("vertices", "edges"):
        if key not in doc:
            raise GraphParseError(f"missing field {key!r}", key)
        if not isinstance(doc[key], list):
            raise GraphParseError(f"field {key!r} must be an array", key)
    verts = []
    for i, item in enumerate(doc["vertices"]):
        path = f"vertices[{i}]"
        if not isinstance(item, dict):
            raise GraphParseError("vertex must be an object", path)
        ident = item.get("id")
        if not isinstance(ident, str) or not ident:
            raise GraphParseError("missing or empty field 'id'", f"{path}.id")
        kind = item.get("kind")
        if kind not in KINDS:
            raise GraphParseError(f"field 'kind' must be one of {KINDS}", f"{path}.kind")
        label = item.get("label")
        if label is not None and not isinstance(label, str):
            raise GraphParseError("field 'label' must be a string", f"{path}.label")
        si = item.get("self_intersection")
        if kind == EXCEPTIONAL:
            if si is None:
                raise GraphParseError("exceptional vertex requires field 'self_intersection'",
                                      f"{path}.self_intersection")
            if isinstance(si, str):
                try:
                    si = int(si)
                except ValueError:
                    raise GraphParseError("self_intersection must be an integer",
                                          f"{path}.self_intersection") from None
            if isinstance(si, bool) or not isinstance(si, int):
                raise GraphParseError("self_intersection must be an integer",
                                      f"{path}.self_intersection")
        elif si is not None:
            raise GraphParseError("strict transform must not carry self_intersection",
                                  f"{path}.self_intersection")
        verts.append(Component(ident, kind, si, label))
    edges = []
    for i, e in enumerate(doc["edges"]):
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(x, str) for x in e)):
            raise GraphParseError("edge must be a pair of vertex ids", f"edges[{i}]")
        edges.append((e[0], e[1]))
    return DualGraph(tuple(verts), tuple(edges))


def from_json(text: str) -> DualGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(f"invalid JSON: {exc.msg}", line=exc.lineno,
                              column=exc.colno) from None
    return from_dict(doc)


def to_dot(graph: DualGraph) -> str:
    """Graphviz rendering; strict transforms are arrows out of their component."""
    def q(s: str) -> str:
        return '"' + s.replace('"', '\\"') + '"'

    lines = ["digraph dual {", "  edge [dir=none];"]
    for v in graph.vertices:
        if v.kind == EXCEPTIONAL:
            lines.append(f"  {q(v.id)} [label={q(f'{v.name} ({v.self_intersection})')}];")
        else:
            lines.append(f"  {q(v.id)} [label={q(v.name)}, shape=plaintext];")
    by_id = {v.id: v for v in graph.vertices}
    for a, b in graph.edges:
        ka, kb = by_id[a].kind, by_id[b].kind
        if ka == STRICT and kb != STRICT:
            lines.append(f"  {q(b)} -> {q(a)} [dir=forward];")
        elif kb == STRICT and ka != STRICT:
            lines.append(f"  {q(a)} -> {q(b)} [dir=forward];")
        else:
            lines.append(f"  {q(a)} -> {q(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
