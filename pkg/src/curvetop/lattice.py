"""Exact integer linear algebra on the intersection lattice.

Everything here works on plain ``list[list[int]]`` matrices with Python's
unbounded integers; no floating point is involved anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from curvetop.graph import DualGraph, GraphError, require_valid

Matrix = list[list[int]]


class LatticeError(ValueError):
    pass


class NonUnimodularError(LatticeError):
    def __init__(self, det: int):
        self.det = det
        super().__init__(f"intersection matrix is not unimodular (det = {det})")


def _copy(m: Sequence[Sequence[int]]) -> Matrix:
    return [list(map(int, row)) for row in m]


def _check_square(m: Sequence[Sequence[int]]) -> int:
    n = len(m)
    if any(len(row) != n for row in m):
        raise LatticeError("matrix is not square")
    return n


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    cols = list(zip(*b)) if b else []
    if not cols and a:
        return [[] for _ in a]
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def transpose(m: Sequence[Sequence[int]]) -> Matrix:
    return [list(col) for col in zip(*m)]


def is_symmetric(m: Sequence[Sequence[int]]) -> bool:
    n = _check_square(m)
    return all(m[i][j] == m[j][i] for i in range(n) for j in range(i))


def determinant(m: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free elimination with row swaps."""
    n = _check_square(m)
    if n == 0:
        return 1
    a = _copy(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def leading_minors(m: Sequence[Sequence[int]]) -> list[int]:
    """Leading principal minors, read off Bareiss pivots (no pivoting).

    Stops early at the first vanishing minor.
    """
    n = _check_square(m)
    a = _copy(m)
    minors = []
    prev = 1
    for k in range(n):
        minors.append(a[k][k])
        if a[k][k] == 0:
            break
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return minors


def is_negative_definite(m: Sequence[Sequence[int]]) -> bool:
    if not is_symmetric(m):
        raise LatticeError("matrix is not symmetric")
    minors = leading_minors(m)
    n = len(m)
    return len(minors) == n and all(
        (d < 0) if k % 2 == 0 else (d > 0) for k, d in enumerate(minors))


def solve_scaled(a: Sequence[Sequence[int]], rhs: Sequence[int]) -> tuple[list[int], int]:
    """Return ``(y, d)`` with ``a @ y == d * rhs`` and ``d == det(a)``.

    Fraction-free Gaussian elimination on the augmented matrix followed by
    fraction-free back substitution; every division is exact.
    """
    n = _check_square(a)
    if len(rhs) != n:
        raise LatticeError("right-hand side has wrong length")
    aug = [list(map(int, row)) + [int(b)] for row, b in zip(a, rhs)]
    sign = 1
    prev = 1
    for k in range(n):
        if aug[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if aug[i][k] != 0), None)
            if swap is None:
                raise LatticeError("matrix is singular")
            aug[k], aug[swap] = aug[swap], aug[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                aug[i][j] = (aug[i][j] * aug[k][k] - aug[i][k] * aug[k][j]) // prev
            aug[i][k] = 0
        prev = aug[k][k]
    det_u = aug[n - 1][n - 1] if n else 1
    # back substitution: y_i = det_u * x_i is integral
    y = [0] * n
    for i in range(n - 1, -1, -1):
        acc = det_u * aug[i][n] - sum(aug[i][j] * y[j] for j in range(i + 1, n))
        q, r = divmod(acc, aug[i][i])
        if r:
            raise LatticeError("inexact division in back substitution")
        y[i] = q
    # the row swaps flip det sign but leave the solution unchanged
    if sign < 0:
        y = [-v for v in y]
    return y, sign * det_u


def solve_integral(a: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[int]:
    y, d = solve_scaled(a, rhs)
    out = []
    for v in y:
        q, r = divmod(v, d)
        if r:
            raise LatticeError("system has no integral solution")
        out.append(q)
    return out


# intersection matrices ------------------------------------------------------


@dataclass(frozen=True)
class IntersectionMatrix:
    exceptional: tuple[str, ...]
    strict: tuple[str, ...]
    ee: tuple[tuple[int, ...], ...]
    es: tuple[tuple[int, ...], ...]

    def ee_list(self) -> Matrix:
        return [list(r) for r in self.ee]

    def es_list(self) -> Matrix:
        return [list(r) for r in self.es]

    def relation_matrix(self) -> Matrix:
        """Rows: exceptional curves; columns: all components (E then S)."""
        return [list(a) + list(b) for a, b in zip(self.ee, self.es)]


def intersection_matrix(graph: DualGraph, check: bool = True) -> IntersectionMatrix:
    if check:
        require_valid(graph)
    exc = graph.exceptional_ids()
    strict = graph.strict_ids()
    ei = {e: i for i, e in enumerate(exc)}
    si = {s: i for i, s in enumerate(strict)}
    ee = [[0] * len(exc) for _ in exc]
    es = [[0] * len(strict) for _ in exc]
    for e in exc:
        ee[ei[e]][ei[e]] = graph.self_intersection(e)
    for a, b in graph.edges:
        if a in ei and b in ei:
            ee[ei[a]][ei[b]] = ee[ei[b]][ei[a]] = 1
        elif a in ei and b in si:
            es[ei[a]][si[b]] = 1
        elif b in ei and a in si:
            es[ei[b]][si[a]] = 1
    return IntersectionMatrix(tuple(exc), tuple(strict),
                              tuple(map(tuple, ee)), tuple(map(tuple, es)))


@dataclass(frozen=True)
class MultiplicityVector:
    """Vanishing orders of each branch equation along each exceptional curve."""

    exceptional: tuple[str, ...]
    strict: tuple[str, ...]
    columns: tuple[tuple[int, ...], ...]  # one column per strict transform

    @property
    def total(self) -> tuple[int, ...]:
        """Orders of the full (reduced) equation: sum over branches."""
        if not self.columns:
            return tuple(0 for _ in self.exceptional)
        return tuple(sum(col[i] for col in self.columns) for i in range(len(self.exceptional)))

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.exceptional, self.total))

    def branch(self, strict_id: str) -> dict[str, int]:
        return dict(zip(self.exceptional, self.columns[self.strict.index(strict_id)]))


def multiplicity_vector(graph: DualGraph) -> MultiplicityVector:
    """Solve ``ee @ nu = -es`` column by column."""
    im = intersection_matrix(graph)
    ee = im.ee_list()
    det = determinant(ee)
    if abs(det) != 1:
        raise NonUnimodularError(det)
    cols = []
    for k in range(len(im.strict)):
        rhs = [-row[k] for row in im.es]
        nu = solve_integral(ee, rhs)
        if any(v < 1 for v in nu):
            raise LatticeError(f"non-positive multiplicity for branch {im.strict[k]}: {nu}")
        cols.append(tuple(nu))
    return MultiplicityVector(im.exceptional, im.strict, tuple(cols))


# Smith normal form ---------------------------------------------------------


@dataclass(frozen=True)
class SmithForm:
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular."""

    d: Matrix
    u: Matrix
    v: Matrix

    @property
    def factors(self) -> tuple[int, ...]:
        out = []
        for i in range(min(len(self.d), len(self.d[0]) if self.d else 0)):
            if self.d[i][i]:
                out.append(self.d[i][i])
        return tuple(out)


def smith_normal_form(m: Sequence[Sequence[int]]) -> SmithForm:
    """Deterministic SNF; pivot = smallest nonzero |entry|, ties row-major."""
    a = _copy(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = identity(rows)
    v = identity(cols)

    def row_op(dst: int, src: int, q: int) -> None:  # row dst -= q * row src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def col_op(dst: int, src: int, q: int) -> None:
        for r in a:
            r[dst] -= q * r[src]
        for r in v:
            r[dst] -= q * r[src]

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    for k in range(min(rows, cols)):
        while True:
            best = None
            for i in range(k, rows):
                for j in range(k, cols):
                    x = a[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
            if best is None:
                return SmithForm(a, u, v)
            _, pi, pj = best
            if pi != k:
                swap_rows(pi, k)
            if pj != k:
                swap_cols(pj, k)
            p = a[k][k]
            for i in range(k + 1, rows):
                if a[i][k]:
                    row_op(i, k, a[i][k] // p)
            for j in range(k + 1, cols):
                if a[k][j]:
                    col_op(j, k, a[k][j] // p)
            if any(a[i][k] for i in range(k + 1, rows)) or any(a[k][j] for j in range(k + 1, cols)):
                continue
            bad = next((i for i in range(k + 1, rows)
                        if any(a[i][j] % p for j in range(k + 1, cols))), None)
            if bad is not None:
                row_op(k, bad, -1)
                continue
            break
        if a[k][k] < 0:
            a[k] = [-x for x in a[k]]
            u[k] = [-x for x in u[k]]
    return SmithForm(a, u, v)


def cokernel(relations: Sequence[Sequence[int]], n_generators: int | None = None
             ) -> tuple[int, tuple[int, ...]]:
    """Free rank and torsion of ``Z^cols / rowspace(relations)``."""
    cols = n_generators if n_generators is not None else (len(relations[0]) if relations else 0)
    if not relations:
        return cols, ()
    factors = smith_normal_form(relations).factors
    return cols - len(factors), tuple(f for f in factors if f != 1)


def tridiagonal(e: Sequence[int]) -> Matrix:
    """Intersection matrix of a linear chain with self-intersections ``e``."""
    n = len(e)
    return [[e[i] if i == j else int(abs(i - j) == 1) for j in range(n)] for i in range(n)]


def matrix_to_json(m: Sequence[Sequence[int]]) -> list[list[str]]:
    return [[str(x) for x in row] for row in m]


def matrix_from_json(doc: Sequence[Sequence[str]]) -> Matrix:
    try:
        return [[int(x) for x in row] for row in doc]
    except (TypeError, ValueError) as exc:
        raise LatticeError(f"matrix entries must be decimal strings: {exc}") from None


__all__ = [
    "GraphError", "IntersectionMatrix", "LatticeError", "MultiplicityVector",
    "NonUnimodularError", "SmithForm", "cokernel", "determinant", "intersection_matrix",
    "is_negative_definite", "leading_minors", "multiplicity_vector", "smith_normal_form",
    "solve_integral", "solve_scaled", "tridiagonal",
]
