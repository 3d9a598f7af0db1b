"""Minimal embedded resolution from Newton-Puiseux branch data.

Each branch ``y = sum c_i x^{e_i}`` is parametrized exactly as
``x = t^n, y = sum c_i t^{n e_i}`` (``n`` the common denominator).  A point
blow-up in local coordinates ``(u, v)`` is a chart substitution on these
parametrizations:

* chart A, ``v = u * v1``: the branch lands at ``v1 = c`` on the new curve
  ``{u = 0}``, local coordinates ``(u, v/u - c)``;
* chart B, ``u = u1 * v``: the branch lands at the point at infinity, the new
  curve is ``{v = 0}``, local coordinates ``(u/v, v)``.

Coefficients of the resulting power series are computed lazily with exact
rationals, so deciding which chart a branch enters only ever needs finitely
many coefficients and never a truncation guess.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from curvetop.graph import EXCEPTIONAL, STRICT, Component, DualGraph

MAX_BLOWUPS = 5000


class ResolutionError(ValueError):
    pass


class BranchParseError(ResolutionError):
    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{message} ({path})" if path else message)


# branch data --------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    exponent: Fraction


@dataclass(frozen=True)
class BranchSpec:
    """A branch: a Puiseux series in ``x``, or one of the axes.

    ``line`` is ``"x=0"`` or ``"y=0"`` for the coordinate axes, ``None``
    for a series branch.
    """

    name: str
    series: tuple[Term, ...] = ()
    line: str | None = None

    @property
    def denominator(self) -> int:
        n = 1
        for term in self.series:
            n = n * term.exponent.denominator // math.gcd(n, term.exponent.denominator)
        return n

    def exponents_scaled(self) -> list[tuple[int, Fraction]]:
        """``(n * e_i, c_i)`` pairs: the ``t``-exponents of ``y(t)``."""
        n = self.denominator
        return [(int(term.exponent * n), term.coeff) for term in self.series]


def _parse_rational(value: object, path: str) -> Fraction:
    if isinstance(value, bool):
        raise BranchParseError("expected a number or a 'p/q' string", path)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise BranchParseError(f"cannot parse rational {value!r}", path) from None
    raise BranchParseError("expected a number or a 'p/q' string", path)


def parse_branches(document: str | dict) -> list[BranchSpec]:
    """Validate a branch document ``{"branches": [...]}``."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise BranchParseError(
                f"invalid JSON: {exc.msg} (line {exc.lineno} column {exc.colno})") from None
    if not isinstance(document, dict) or not isinstance(document.get("branches"), list):
        raise BranchParseError("document must be an object with a 'branches' array",
                               "branches")
    out: list[BranchSpec] = []
    names: set[str] = set()
    for i, item in enumerate(document["branches"]):
        path = f"branches[{i}]"
        if not isinstance(item, dict):
            raise BranchParseError("branch must be an object", path)
        name = item.get("name")
        if not isinstance(name, str) or not name:
            raise BranchParseError("missing branch name", f"{path}.name")
        if name in names:
            raise BranchParseError(f"duplicate branch name {name!r}", f"{path}.name")
        names.add(name)
        line = item.get("line")
        series = item.get("series", [])
        if line is not None:
            if line not in ("x=0", "y=0"):
                raise BranchParseError("line must be 'x=0' or 'y=0'", f"{path}.line")
            if series:
                raise BranchParseError("a line branch takes no series", f"{path}.series")
            out.append(BranchSpec(name, (), line))
            continue
        if not isinstance(series, list) or not series:
            raise BranchParseError("series must be a nonempty array", f"{path}.series")
        terms: list[Term] = []
        for j, term in enumerate(series):
            tpath = f"{path}.series[{j}]"
            if not isinstance(term, dict):
                raise BranchParseError("term must be an object", tpath)
            if "coeff" not in term or "exponent" not in term:
                raise BranchParseError("term needs 'coeff' and 'exponent'", tpath)
            coeff = _parse_rational(term["coeff"], f"{tpath}.coeff")
            exponent = _parse_rational(term["exponent"], f"{tpath}.exponent")
            if exponent <= 0:
                raise BranchParseError("exponent must be positive", f"{tpath}.exponent")
            if coeff == 0:
                raise BranchParseError("coefficient must be nonzero", f"{tpath}.coeff")
            if terms and exponent <= terms[-1].exponent:
                raise BranchParseError("exponents must be strictly increasing",
                                       f"{tpath}.exponent")
            terms.append(Term(coeff, exponent))
        out.append(BranchSpec(name, tuple(terms)))
    if not out:
        raise BranchParseError("at least one branch is required", "branches")
    return out


def branches_to_dict(branches: Sequence[BranchSpec]) -> dict:
    items = []
    for b in branches:
        if b.line:
            items.append({"name": b.name, "line": b.line})
        else:
            items.append({"name": b.name, "series": [
                {"coeff": str(t.coeff), "exponent": str(t.exponent)} for t in b.series]})
    return {"branches": items}


# lazy exact power series ----------------------------------------------------


class Series:
    """Power series in ``t`` over Q; coefficients are produced on demand."""

    def __init__(self) -> None:
        self._coeffs: list[Fraction] = []

    def _next(self, k: int) -> Fraction:
        raise NotImplementedError

    def __getitem__(self, k: int) -> Fraction:
        while len(self._coeffs) <= k:
            self._coeffs.append(self._next(len(self._coeffs)))
        return self._coeffs[k]

    def order(self, limit: int | None = None) -> int | None:
        """First index with a nonzero coefficient (``None`` past ``limit``).

        Without ``limit`` this loops forever on the zero series, so callers
        only use it on series known to be nonzero.
        """
        if isinstance(self, Poly):
            return self.exact_order()
        k = 0
        while limit is None or k <= limit:
            if self[k]:
                return k
            k += 1
        return None


class Poly(Series):
    """Finite series; the common case while every division is by a monomial."""

    def __init__(self, terms: dict[int, Fraction]):
        super().__init__()
        self.terms = {k: Fraction(c) for k, c in terms.items() if c}

    def _next(self, k: int) -> Fraction:
        return self.terms.get(k, Fraction(0))

    def __getitem__(self, k: int) -> Fraction:
        return self.terms.get(k, Fraction(0))

    def exact_order(self) -> int | None:
        return min(self.terms) if self.terms else None

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def monomial(self) -> tuple[int, Fraction] | None:
        if len(self.terms) == 1:
            (k, c), = self.terms.items()
            return k, c
        return None


class Quotient(Series):
    """``num / den`` where ``ord(num) >= ord(den) = shift``."""

    def __init__(self, num: Series, den: Series, shift: int):
        super().__init__()
        self.num, self.den, self.shift = num, den, shift
        self.lead = den[shift]

    def _next(self, k: int) -> Fraction:
        s = self.shift
        acc = self.num[k + s]
        for j in range(k):
            b = self.den[s + k - j]
            if b:
                acc -= self[j] * b
        return acc / self.lead


class Shifted(Series):
    """``base - c``."""

    def __init__(self, base: Series, c: Fraction):
        super().__init__()
        self.base, self.c = base, c

    def _next(self, k: int) -> Fraction:
        return self.base[k] - self.c if k == 0 else self.base[k]


def divide(num: Series, den: Series, shift: int) -> Series:
    if isinstance(den, Poly) and isinstance(num, Poly):
        mono = den.monomial()
        if mono is not None:
            k0, c0 = mono
            return Poly({k - k0: c / c0 for k, c in num.terms.items()})
    if isinstance(num, Poly) and num.is_zero:
        return num
    return Quotient(num, den, shift)


def subtract(base: Series, c: Fraction) -> Series:
    if not c:
        return base
    if isinstance(base, Poly):
        terms = dict(base.terms)
        terms[0] = terms.get(0, Fraction(0)) - c
        return Poly(terms)
    return Shifted(base, c)


def compare_orders(u: Series, v: Series) -> tuple[int, bool, bool]:
    """Smallest ``k`` where ``u`` or ``v`` is nonzero, and which of them are.

    At least one of ``u``, ``v`` must be nonzero (a branch is never contained
    in both coordinate axes).
    """
    pu = u.exact_order() if isinstance(u, Poly) else None
    pv = v.exact_order() if isinstance(v, Poly) else None
    if isinstance(u, Poly) and isinstance(v, Poly):
        if pu is None and pv is None:
            raise ResolutionError("degenerate branch: both coordinates vanish")
        k = min(x for x in (pu, pv) if x is not None)
        return k, pu == k, pv == k
    k = 0
    while True:
        a, b = u[k], v[k]
        if a or b:
            return k, bool(a), bool(b)
        k += 1


# blow-up simulation ---------------------------------------------------------


@dataclass
class _Branch:
    name: str
    u: Series
    v: Series


@dataclass
class _Point:
    branches: list[_Branch]
    divisors: dict[str, str]  # axis 'u' ({u=0}) / 'v' ({v=0}) -> exceptional id
    origin: bool = False


@dataclass(frozen=True)
class BlowUpStep:
    """One blow-up: the new curve and the graph right after it."""

    index: int
    created: str
    through: tuple[str, ...]
    n_branches: int
    graph: DualGraph
    measure_before: int | None
    measure_after: int | None


@dataclass
class ResolutionTrace:
    steps: list[BlowUpStep] = field(default_factory=list)
    intersection_totals: dict[tuple[str, str], int] = field(default_factory=dict)
    delta_totals: dict[str, int] = field(default_factory=dict)
    pair_residuals: dict[tuple[str, str], int] = field(default_factory=dict)
    delta_residuals: dict[str, int] = field(default_factory=dict)


def _initial_branch(spec: BranchSpec) -> _Branch:
    if spec.line == "x=0":
        return _Branch(spec.name, Poly({}), Poly({1: Fraction(1)}))
    if spec.line == "y=0":
        return _Branch(spec.name, Poly({1: Fraction(1)}), Poly({}))
    n = spec.denominator
    return _Branch(spec.name, Poly({n: Fraction(1)}),
                   Poly({m: c for m, c in spec.exponents_scaled()}))


def _multiplicity(b: _Branch) -> int:
    k, _, _ = compare_orders(b.u, b.v)
    return k


def _needs_blowup(p: _Point) -> bool:
    if p.origin:
        return True
    if len(p.branches) != 1:
        return True
    b = p.branches[0]
    if _multiplicity(b) > 1 or len(p.divisors) == 2:
        return True
    axis, = p.divisors
    coord = b.u if axis == "u" else b.v
    return not coord[1]


# exact intersection data from the Puiseux expansions --------------------------


def _conjugate_coeff_equal(c1: Fraction, c2: Fraction, turn: Fraction) -> bool:
    """Is ``c1 == c2 * exp(2 pi i turn)`` for rational ``c1``, ``c2``?"""
    if not c1 and not c2:
        return True
    if not c1 or not c2:
        return False
    frac = turn - math.floor(turn)
    if frac == 0:
        return c1 == c2
    if frac == Fraction(1, 2):
        return c1 == -c2
    return False


def _series_contact(s1: BranchSpec, s2: BranchSpec, j: int) -> Fraction | None:
    """``ord_x(phi_1 - phi_2^{(j)})`` for the j-th conjugate of branch 2."""
    c1 = {t.exponent: t.coeff for t in s1.series}
    c2 = {t.exponent: t.coeff for t in s2.series}
    for e in sorted(set(c1) | set(c2)):
        turn = j * e
        if not _conjugate_coeff_equal(c1.get(e, Fraction(0)), c2.get(e, Fraction(0)), turn):
            return e
    return None


def intersection_multiplicity(b1: BranchSpec, b2: BranchSpec) -> int:
    """Intersection number of two distinct branches at the origin.

    Series branches use the conjugate-sum formula
    ``I = n1 * sum_j ord_x(phi_1 - phi_2^{(j)})``.
    """
    if b1.line and b2.line:
        if b1.line == b2.line:
            raise ResolutionError(
                f"insufficient truncation: branches {b1.name} and {b2.name} coincide")
        return 1
    if b1.line or b2.line:
        line, other = (b1, b2) if b1.line else (b2, b1)
        n = other.denominator
        if line.line == "x=0":
            return n
        return other.exponents_scaled()[0][0]
    n1, n2 = b1.denominator, b2.denominator
    total = Fraction(0)
    for j in range(n2):
        e = _series_contact(b1, b2, j)
        if e is None:
            raise ResolutionError(
                f"insufficient truncation: branches {b1.name} and {b2.name} coincide")
        total += e
    value = total * n1
    assert value.denominator == 1
    return int(value)


def delta_invariant(b: BranchSpec) -> int:
    """delta of a branch, from the conductor ``c = sum_k j(k) - (n - 1)``.

    ``j(k) = ord_t(y(t) - y(zeta^k t))`` for the n-th roots of unity.
    """
    if b.line:
        return 0
    n = b.denominator
    exps = [m for m, _ in b.exponents_scaled()]
    total = 0
    for k in range(1, n):
        total += min(m for m in exps if (k * m) % n)
    conductor = total - (n - 1)
    assert conductor % 2 == 0
    return conductor // 2


def check_distinct(branches: Sequence[BranchSpec]) -> None:
    for i, a in enumerate(branches):
        for b in branches[i + 1:]:
            intersection_multiplicity(a, b)


class _Resolver:
    def __init__(self, branches: Sequence[BranchSpec], track: bool):
        self.specs = list(branches)
        self.track = track
        self.self_int: dict[str, int] = {}
        self.edges: list[tuple[str, str]] = []
        self.counter = 0
        self.trace = ResolutionTrace()
        if track:
            for i, a in enumerate(self.specs):
                self.trace.delta_totals[a.name] = delta_invariant(a)
                for b in self.specs[i + 1:]:
                    self.trace.intersection_totals[(a.name, b.name)] = \
                        intersection_multiplicity(a, b)
            self.pair_left = dict(self.trace.intersection_totals)
            self.delta_left = dict(self.trace.delta_totals)

    # measure --------------------------------------------------------------

    def _point_measure(self, p: _Point) -> int:
        names = [b.name for b in p.branches]
        total = 0
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                total += self.pair_left[(a, b) if (a, b) in self.pair_left else (b, a)]
        for b in p.branches:
            total += self.delta_left[b.name]
            for axis in p.divisors:
                coord = b.u if axis == "u" else b.v
                total += 2 * (coord.order() - 1)
            if len(p.divisors) == 2:
                total += 1
        if p.origin:
            total += 1 + sum(2 * _multiplicity(b) for b in p.branches)
        return total

    def _measure(self, points: Iterable[_Point]) -> int:
        return sum(self._point_measure(p) for p in points)

    # graph bookkeeping -------------------------------------------------------

    def _new_curve(self, through: Iterable[str]) -> str:
        self.counter += 1
        if self.counter > MAX_BLOWUPS:
            raise ResolutionError("insufficient truncation: branches never separate")
        e = f"E{self.counter}"
        self.self_int[e] = -1
        through = list(through)
        for d in through:
            self.self_int[d] -= 1
        if len(through) == 2:
            a, b = through
            self.edges = [x for x in self.edges if set(x) != {a, b}]
        for d in through:
            self.edges.append((d, e))
        return e

    def _graph(self, strict: Sequence[str] = ()) -> DualGraph:
        verts = [Component(e, EXCEPTIONAL, s) for e, s in self.self_int.items()]
        verts += [Component(s, STRICT) for s in strict]
        return DualGraph(tuple(verts), tuple(self.edges))

    # main loop -------------------------------------------------------------

    def run(self) -> tuple[DualGraph, ResolutionTrace]:
        check_distinct(self.specs)
        start = _Point([_initial_branch(s) for s in self.specs], {}, origin=True)
        queue: deque[_Point] = deque([start])
        attached: list[tuple[str, str]] = []
        while queue:
            p = queue.popleft()
            if not _needs_blowup(p):
                (axis, d), = p.divisors.items()
                attached.append((d, p.branches[0].name))
                continue
            before = self._measure([p, *queue]) if self.track else None
            through = [p.divisors[a] for a in ("u", "v") if a in p.divisors]
            if self.track:
                mult = {b.name: _multiplicity(b) for b in p.branches}
            e = self._new_curve(through)
            children = self._split(p, e)
            if self.track:
                names = [b.name for b in p.branches]
                for i, a in enumerate(names):
                    self.delta_left[a] -= mult[a] * (mult[a] - 1) // 2
                    for b in names[i + 1:]:
                        key = (a, b) if (a, b) in self.pair_left else (b, a)
                        self.pair_left[key] -= mult[a] * mult[b]
            queue.extend(children)
            after = self._measure(queue) if self.track else None
            self.trace.steps.append(BlowUpStep(
                self.counter, e, tuple(through), len(p.branches), self._graph(),
                before, after))
        for d, s in attached:
            self.edges.append((d, s))
        graph = self._graph([s.name for s in self.specs])
        if self.track:
            self.trace.pair_residuals = dict(self.pair_left)
            self.trace.delta_residuals = dict(self.delta_left)
        return graph, self.trace

    def _split(self, p: _Point, e: str) -> list[_Point]:
        zero: list[_Branch] = []
        finite: dict[Fraction, list[_Branch]] = {}
        infinity: list[_Branch] = []
        for b in p.branches:
            k, u_hit, v_hit = compare_orders(b.u, b.v)
            if u_hit:
                v1 = divide(b.v, b.u, k)
                c = v1[0]
                if c:
                    finite.setdefault(c, []).append(_Branch(b.name, b.u, subtract(v1, c)))
                else:
                    zero.append(_Branch(b.name, b.u, v1))
            else:
                infinity.append(_Branch(b.name, divide(b.u, b.v, k), b.v))
        out = []
        if zero:
            divs = {"u": e}
            if "v" in p.divisors:
                divs["v"] = p.divisors["v"]
            out.append(_Point(zero, divs))
        for c in sorted(finite):
            out.append(_Point(finite[c], {"u": e}))
        if infinity:
            divs = {"v": e}
            if "u" in p.divisors:
                divs["u"] = p.divisors["u"]
            out.append(_Point(infinity, divs))
        return out


def resolve(branches: Sequence[BranchSpec]) -> DualGraph:
    """Dual graph of the minimal embedded resolution of the union of branches."""
    graph, _ = _Resolver(branches, track=False).run()
    return graph


def resolve_traced(branches: Sequence[BranchSpec]) -> tuple[DualGraph, ResolutionTrace]:
    """Like :func:`resolve`, recording every step and the complexity measure.

    The measure at a point sums remaining pairwise intersection numbers and
    delta invariants of the branches through it (totals from the Puiseux
    data, minus what earlier blow-ups consumed), twice the tangency excess
    with the exceptional curves through it, and one per branch through a
    corner; the origin carries a bonus so the mandatory first blow-up counts.
    """
    return _Resolver(branches, track=True).run()


def iter_steps(branches: Sequence[BranchSpec]) -> Iterator[BlowUpStep]:
    _, trace = resolve_traced(branches)
    yield from trace.steps


@dataclass(frozen=True)
class ResolutionReport:
    graph: DualGraph
    classification: object
    multiplicities: object


def resolve_and_report(branches: Sequence[BranchSpec]) -> ResolutionReport:
    from curvetop.graph import classify
    from curvetop.lattice import multiplicity_vector

    graph = resolve(branches)
    return ResolutionReport(graph, classify(graph), multiplicity_vector(graph))
