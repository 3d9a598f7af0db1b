"""Meridian calculus on chains and dead branches.

Vectors are integer pairs in the basis ``(c0, c1)`` of the first homology of
the thickened torus around a chain.  ``det`` is the 2x2 determinant, which
plays the role of the intersection form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from curvetop.graph import DualGraph, GraphError, classify
from curvetop.lattice import determinant, tridiagonal

Vec = tuple[int, int]


class MeridianError(ValueError):
    pass


class OracleError(MeridianError):
    """The brute-force search found no chain, or more than one."""


def det(u: Vec, v: Vec) -> int:
    return u[0] * v[1] - u[1] * v[0]


def fmt_vec(v: Vec) -> str:
    return f"({v[0]},{v[1]})"


def parse_vec(text: str) -> Vec:
    parts = text.replace("(", "").replace(")", "").split(",")
    if len(parts) != 2:
        raise MeridianError(f"expected 'x,y', got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise MeridianError(f"expected integers in {text!r}") from None


# chains ---------------------------------------------------------------------


@dataclass(frozen=True)
class MeridianSequence:
    vectors: tuple[Vec, ...]
    relaxed: bool = False  # produced from non-minimal data


def chain_meridians(e: Sequence[int], relaxed: bool = False) -> MeridianSequence:
    """``c0=(1,0)``, ``c1=(0,1)``, ``c_{j+1} = -c_{j-1} - e_j c_j``."""
    e = list(e)
    non_minimal = any(x > -2 for x in e)
    if non_minimal and not relaxed:
        raise MeridianError("self-intersections must be <= -2 (use relaxed mode)")
    out: list[Vec] = [(1, 0), (0, 1)]
    for ej in e:
        p, c = out[-2], out[-1]
        out.append((-p[0] - ej * c[0], -p[1] - ej * c[1]))
    return MeridianSequence(tuple(out), non_minimal)


@dataclass(frozen=True)
class ChainCoefficients:
    """``c0 = a * c_l + b * c_{l+1}``; ``|a|`` equals the tridiagonal determinant."""

    a: int
    b: int

    @property
    def abs_a(self) -> int:
        return abs(self.a)


def _coefficients(vectors: Sequence[Vec]) -> ChainCoefficients:
    cl, cl1 = vectors[-2], vectors[-1]
    c0 = vectors[0]
    # Cramer with det(cl, cl1) == 1
    return ChainCoefficients(det(c0, cl1), det(cl, c0))


def chain_coefficients(e: Sequence[int], relaxed: bool = False) -> ChainCoefficients:
    seq = chain_meridians(e, relaxed)
    coeffs = _coefficients(seq.vectors)
    expected = abs(determinant(tridiagonal(e))) if e else 1
    if coeffs.abs_a != expected:
        raise MeridianError(f"|a|={coeffs.abs_a} disagrees with |det A|={expected}")
    if coeffs.a == 0:
        raise MeridianError("degenerate chain: a = 0 (non-minimal data)")
    return coeffs


def dead_branch_meridian(e: Sequence[int]) -> tuple[Vec, ChainCoefficients]:
    """Exceptional meridian ``c_{l+1}`` of a dead branch and its coefficients.

    ``e`` lists self-intersections from the rupture side outwards.
    """
    if not e:
        raise MeridianError("a dead branch has at least one component")
    seq = chain_meridians(e)
    return seq.vectors[-1], chain_coefficients(e)


# Hirzebruch-Jung chains -----------------------------------------------------------


def _check_pair(a: Vec, b: Vec) -> int:
    d = det(a, b)
    if d <= 0:
        raise MeridianError(f"det({fmt_vec(a)},{fmt_vec(b)}) = {d} <= 0")
    for v in (a, b):
        if math.gcd(v[0], v[1]) != 1:
            raise MeridianError(f"vector {fmt_vec(v)} is not primitive")
    return d


def _unit_partner(c: Vec) -> Vec:
    """Some ``x`` with ``det(c, x) = 1``."""
    p, q = c
    # extended Euclid: s*p + r*q = 1 -> x = (-r, s)
    old_r, r = p, q
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_s, s = s, old_s - k * s
        old_t, t = t, old_t - k * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return (-old_t, old_s)


def hj_chain(a: Vec, b: Vec) -> list[Vec]:
    """Unimodular chain from ``a`` to ``b`` with every ``det(c_{k-1}, c_{k+1}) > 1``.

    Greedy continued-fraction step: from ``c`` take the partner ``x`` with
    ``det(c, x) = 1`` that leaves the smallest nonnegative ``det(x, b)``.
    """
    _check_pair(a, b)
    out = [a]
    c = a
    while True:
        d = det(c, b)
        if d == 1:
            out.append(b)
            return out
        x0 = _unit_partner(c)
        t = -(det(x0, b) // d)  # ceil(-det(x0,b)/d)
        c = (x0[0] + t * c[0], x0[1] + t * c[1])
        out.append(c)


def satisfies_chain_conditions(chain: Sequence[Vec]) -> bool:
    if len(chain) < 2:
        return False
    if any(det(chain[j], chain[j + 1]) != 1 for j in range(len(chain) - 1)):
        return False
    return all(det(chain[k - 1], chain[k + 1]) > 1 for k in range(1, len(chain) - 1))


def brute_force_chain(a: Vec, b: Vec, bound: int | None = None) -> list[Vec]:
    """Exhaustive search for the chain conditions among vectors with
    ``|coordinate| <= bound``; raises :class:`OracleError` unless exactly one
    chain exists.

    The search stays in the closed cone spanned by ``a`` and ``b``: inside it
    every step with ``det = 1`` turns strictly counterclockwise, so the search
    graph is acyclic.
    """
    _check_pair(a, b)
    if bound is None:
        bound = max(abs(a[0]), abs(a[1]), abs(b[0]), abs(b[1]))

    def in_cone(x: Vec) -> bool:
        return det(a, x) >= 0 and det(x, b) >= 0

    def partners(c: Vec) -> list[Vec]:
        x0 = _unit_partner(c)
        # t-range keeping x0 + t*c inside the box
        lo, hi = -(10 ** 9), 10 ** 9
        for x, step in zip(x0, c):
            if step:
                ends = sorted(((-bound - x) / step, (bound - x) / step))
                lo = max(lo, math.ceil(ends[0]))
                hi = min(hi, math.floor(ends[1]))
            elif abs(x) > bound:
                return []
        out = []
        for t in range(lo, hi + 1):
            x = (x0[0] + t * c[0], x0[1] + t * c[1])
            if in_cone(x):
                out.append(x)
        return out

    memo: dict[tuple[Vec | None, Vec], list[list[Vec]]] = {}
    partner_cache: dict[Vec, list[Vec]] = {}

    def completions(prev: Vec | None, cur: Vec) -> list[list[Vec]]:
        key = (prev, cur)
        if key in memo:
            return memo[key]
        found: list[list[Vec]] = []
        if cur not in partner_cache:
            partner_cache[cur] = partners(cur)
        for x in partner_cache[cur]:
            if prev is not None and det(prev, x) <= 1:
                continue
            if x == b:
                found.append([b])
            elif x != cur:
                found.extend([x, *rest] for rest in completions(cur, x))
            if len(found) > 1:
                break
        memo[key] = found
        return found

    sols = completions(None, a)
    if not sols:
        raise OracleError(f"no chain within bound {bound} (inconclusive)")
    if len(sols) > 1:
        raise OracleError(f"chain not unique within bound {bound}")
    return [a, *sols[0]]


# Seifert blocks ------------------------------------------------------------------


@dataclass(frozen=True)
class ExceptionalFiber:
    dead_branch: str
    meridian: Vec
    coefficients: ChainCoefficients


@dataclass(frozen=True)
class SeifertBlock:
    rupture: str
    boundary_count: int
    fibers: tuple[ExceptionalFiber, ...]


def seifert_block(graph: DualGraph, rupture_id: str) -> SeifertBlock:
    cls = classify(graph)
    if rupture_id not in cls.rupture:
        raise GraphError(f"{rupture_id!r} is not a rupture component")
    fibers = []
    for dead in cls.dead_branches:
        if dead.attach != rupture_id:
            continue
        e = [graph.self_intersection(x) for x in dead.tail]
        vec, coeffs = dead_branch_meridian(e)
        fibers.append(ExceptionalFiber(dead.id, vec, coeffs))
    boundary = len(graph.neighbors(rupture_id)) - len(fibers)
    return SeifertBlock(rupture_id, boundary, tuple(fibers))


def chain_self_intersections(graph: DualGraph, chain_id: str) -> list[int]:
    chain = classify(graph).chain(chain_id)
    return [graph.self_intersection(x) for x in chain.interior]
