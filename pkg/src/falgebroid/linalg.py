"""Small exact linear algebra over Fractions and over polynomial entries."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .poly import MultiPoly

Matrix = tuple[tuple[Fraction, ...], ...]


class SingularMatrix(ArithmeticError):
    pass


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def transpose(m: Sequence[Sequence]) -> Matrix:
    return tuple(zip(*m))


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    bt = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def matvec(a: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def _eliminate(a: list[list[Fraction]], rhs: list[list[Fraction]] | None):
    """In-place Gauss-Jordan; returns the determinant."""
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            if rhs is not None:
                rhs[col], rhs[pivot] = rhs[pivot], rhs[col]
            det = -det
        p = a[col][col]
        det *= p
        inv = 1 / p
        a[col] = [x * inv for x in a[col]]
        if rhs is not None:
            rhs[col] = [x * inv for x in rhs[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                if rhs is not None:
                    rhs[r] = [x - f * y for x, y in zip(rhs[r], rhs[col])]
    return det


def det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    return _eliminate([list(map(Fraction, row)) for row in m], None)


def solve(m: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Unique solution of ``m x = b``; raises SingularMatrix otherwise."""
    a = [list(map(Fraction, row)) for row in m]
    rhs = [[Fraction(x)] for x in b]
    if not _eliminate(a, rhs):
        raise SingularMatrix("matrix is singular")
    return tuple(r[0] for r in rhs)


def inverse(m: Sequence[Sequence[Fraction]]) -> Matrix:
    n = len(m)
    a = [list(map(Fraction, row)) for row in m]
    rhs = [list(row) for row in identity(n)]
    if not _eliminate(a, rhs):
        raise SingularMatrix("matrix is singular")
    return tuple(tuple(row) for row in rhs)


def poly_det(m: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Determinant of a square polynomial matrix by memoised Laplace expansion."""
    n = len(m)
    if n == 0:
        raise ValueError("empty matrix")
    nvars = m[0][0].n

    @lru_cache(maxsize=None)
    def minor(row: int, cols: frozenset[int]) -> MultiPoly:
        if row == n:
            return MultiPoly.const(nvars, 1)
        total = MultiPoly.zero(nvars)
        ordered = sorted(cols)
        for pos, c in enumerate(ordered):
            entry = m[row][c]
            if entry.is_zero():
                continue
            sub = minor(row + 1, cols - {c})
            term = entry * sub
            total = total - term if pos % 2 else total + term
        return total

    return minor(0, frozenset(range(n)))


def poly_adjugate(m: Sequence[Sequence[MultiPoly]]) -> tuple[tuple[MultiPoly, ...], ...]:
    """Adjugate matrix: ``adj(m)[i][j] = (-1)^(i+j) det(m without row j, col i)``."""
    n = len(m)
    nvars = m[0][0].n
    if n == 1:
        return ((MultiPoly.const(nvars, 1),),)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = [[m[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
            cof = poly_det(sub)
            out[i][j] = -cof if (i + j) % 2 else cof
    return tuple(tuple(row) for row in out)
