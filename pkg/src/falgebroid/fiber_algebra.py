"""Pointwise (fibre) algebras: the tangent algebra at a rational point."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import linalg
from .poly import MultiPoly, as_point
from .report import CheckReport, combine, fail, ok

AlgebraElement = tuple[Fraction, ...]


class NotInvertible(ArithmeticError):
    """An element has a singular multiplication operator.

    ``stage`` names the position in a product chain when the failure
    happened inside one.
    """

    def __init__(self, message: str, stage: int | None = None, element=None):
        super().__init__(message)
        self.stage = stage
        self.element = element


def element(coords: Sequence) -> AlgebraElement:
    return as_point(coords)


def basis_element(n: int, i: int) -> AlgebraElement:
    return tuple(Fraction(int(k == i)) for k in range(n))


@dataclass(frozen=True)
class FiberAlgebra:
    """Structure constants ``c[i][j][k]`` (``e_i e_j = sum_k c[i][j][k] e_k``) and a unit."""

    n: int
    c: tuple[tuple[tuple[Fraction, ...], ...], ...]
    unit: AlgebraElement

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(tuple(tuple(Fraction(x) for x in row) for row in plane) for plane in self.c))
        object.__setattr__(self, "unit", element(self.unit))
        if len(self.c) != self.n or len(self.unit) != self.n:
            raise ValueError("dimension mismatch")

    def multiply(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> AlgebraElement:
        return multiply(self, x, y)

    def mult_operator(self, x: Sequence[Fraction]) -> linalg.Matrix:
        """Matrix ``M_x`` with ``(M_x)[k][j] = sum_i c[i][j][k] x^i`` so that ``M_x y = x y``."""
        n = self.n
        return tuple(
            tuple(sum((self.c[i][j][k] * x[i] for i in range(n) if x[i]), Fraction(0)) for j in range(n))
            for k in range(n)
        )

    def invert(self, x: Sequence[Fraction]) -> AlgebraElement:
        return invert(self, x)

    def power(self, x: Sequence[Fraction], k: int) -> AlgebraElement:
        if k < 0:
            return self.power(self.invert(x), -k)
        out = self.unit
        for _ in range(k):
            out = self.multiply(out, x)
        return out

    def twisted(self, w: Sequence[Fraction]) -> FiberAlgebra:
        """Algebra with product ``x o y = x y w``; its unit is ``w^{-1}``."""
        n = self.n
        w = element(w)
        cols = [self.multiply(basis_element(n, i), w) for i in range(n)]
        c = tuple(
            tuple(self.multiply(basis_element(n, i), cols[j]) for j in range(n))
            for i in range(n)
        )
        return FiberAlgebra(n, c, self.invert(w))

    def dual(self, e: Sequence[Fraction]) -> FiberAlgebra:
        """Dual product ``x * y = x y e^{-1}``; ``e`` becomes the unit."""
        return self.twisted(self.invert(e))

    @cached_property
    def basis(self) -> list[AlgebraElement]:
        return [basis_element(self.n, i) for i in range(self.n)]


def algebra_at(tensor, pt: Sequence) -> FiberAlgebra:
    """Fibre algebra of a StructureTensor at a rational point; unit is ``e_1``."""
    pt = as_point(pt)
    if len(pt) != tensor.n:
        raise ValueError(f"point has {len(pt)} coordinates, expected {tensor.n}")
    return FiberAlgebra(tensor.n, tensor.evaluate_mixed(pt), basis_element(tensor.n, 0))


def multiply(A: FiberAlgebra, x: Sequence[Fraction], y: Sequence[Fraction]) -> AlgebraElement:
    n = A.n
    if len(x) != n or len(y) != n:
        raise ValueError("dimension mismatch")
    out = [Fraction(0)] * n
    for i in range(n):
        if not x[i]:
            continue
        for j in range(n):
            if not y[j]:
                continue
            s = x[i] * y[j]
            row = A.c[i][j]
            for k in range(n):
                if row[k]:
                    out[k] += row[k] * s
    return tuple(out)


def invert(A: FiberAlgebra, x: Sequence[Fraction]) -> AlgebraElement:
    """Solve ``M_x u = unit``."""
    if len(x) != A.n:
        raise ValueError("dimension mismatch")
    try:
        return linalg.solve(A.mult_operator(x), A.unit)
    except linalg.SingularMatrix:
        raise NotInvertible(f"element {tuple(map(str, x))} is not invertible", element=tuple(x)) from None


def multiplication_operator(tensor, x_field) -> tuple[tuple[MultiPoly, ...], ...]:
    """Polynomial matrix of multiplication by a vector field ``x(t)``."""
    n = tensor.n
    nvars = tensor.c_mixed[0][0][0].n
    out = []
    for k in range(n):
        row = []
        for j in range(n):
            acc = MultiPoly.zero(nvars)
            for i in range(n):
                c = tensor.c_mixed[i][j][k]
                if c and x_field[i]:
                    acc = acc + c * x_field[i]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def discriminant_det(tensor, spec) -> MultiPoly:
    """``det M_{E(t)}``; the discriminant is its zero set."""
    return linalg.poly_det(multiplication_operator(tensor, spec.euler_field))


# -- semisimplicity --------------------------------------------------------

def charpoly(m: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    """Coefficients (highest degree first) of ``det(lambda I - m)`` via Faddeev-LeVerrier."""
    n = len(m)
    coeffs = [Fraction(1)]
    mk = [[Fraction(0)] * n for _ in range(n)]  # M_0 = 0
    c_prev = Fraction(1)
    for k in range(1, n + 1):
        # M_k = m M_{k-1} + c_{k-1} I ; c_k = -tr(m M_k)/k
        mk = [[sum((m[i][l] * mk[l][j] for l in range(n)), Fraction(0)) + (c_prev if i == j else 0)
               for j in range(n)] for i in range(n)]
        amk = linalg.matmul(m, mk)
        c_prev = -sum(amk[i][i] for i in range(n)) / k
        coeffs.append(c_prev)
    return coeffs


def _trim(p: list[Fraction]) -> list[Fraction]:
    i = 0
    while i < len(p) and p[i] == 0:
        i += 1
    return p[i:]


def _poly_rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = _trim(list(a))
    b = _trim(b)
    while len(a) >= len(b) and a:
        f = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= f * b[i]
        a = _trim(a)
    return a


def univariate_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _poly_rem(a, b)
    return [x / a[0] for x in a] if a else a


def is_squarefree(p: list[Fraction]) -> bool:
    p = _trim(p)
    deg = len(p) - 1
    dp = [c * (deg - i) for i, c in enumerate(p[:-1])]
    return len(univariate_gcd(p, dp)) == 1


def is_semisimple(A: FiberAlgebra, trials: int = 16, seed: int = 0) -> bool:
    """Squarefree characteristic polynomial of some sampled ``M_z``.

    For ``n <= 2`` the answer is exact: any non-scalar element generates
    the algebra, so one discriminant test decides it.
    """
    n = A.n
    if n == 1:
        return True
    if n == 2:
        for z in A.basis:
            m = A.mult_operator(z)
            if any(m[i][j] != (m[0][0] if i == j else 0) for i in range(2) for j in range(2)):
                return is_squarefree(charpoly(m))
        return False  # every element is scalar: degenerate algebra
    rng = random.Random(seed)
    for _ in range(trials):
        z = tuple(Fraction(rng.randint(-20, 20)) for _ in range(n))
        if is_squarefree(charpoly(A.mult_operator(z))):
            return True
    return False


def has_nilpotent_basis_combination(A: FiberAlgebra, bound: int = 3) -> AlgebraElement | None:
    """Brute-force search for a nonzero ``x`` with ``x^2 = 0`` among small integer combinations."""
    n = A.n
    zero = (Fraction(0),) * n
    for coords in itertools.product(range(-bound, bound + 1), repeat=n):
        x = element(coords)
        if x != zero and multiply(A, x, x) == zero:
            return x
    return None


def check_frobenius_algebra(A: FiberAlgebra, g: Sequence[Sequence]) -> CheckReport:
    """Commutativity, associativity, unit and invariance of ``g`` on basis triples."""
    g = linalg.as_matrix(g)
    n = A.n
    B = A.basis
    parts = []

    def gform(x, y):
        return sum((x[i] * g[i][j] * y[j] for i in range(n) for j in range(n)), Fraction(0))

    bad = next(((i, j) for i, j in itertools.product(range(n), repeat=2)
                if multiply(A, B[i], B[j]) != multiply(A, B[j], B[i])), None)
    parts.append(fail("commutative", index=bad) if bad else ok("commutative"))

    bad = next(((i, j, k) for i, j, k in itertools.product(range(n), repeat=3)
                if multiply(A, multiply(A, B[i], B[j]), B[k]) != multiply(A, B[i], multiply(A, B[j], B[k]))),
               None)
    parts.append(fail("associative", index=bad) if bad else ok("associative"))

    bad = next((i for i in range(n)
                if multiply(A, A.unit, B[i]) != B[i] or multiply(A, B[i], A.unit) != B[i]), None)
    parts.append(fail("unit", index=bad) if bad is not None else ok("unit"))

    bad = next(((i, j, k) for i, j, k in itertools.product(range(n), repeat=3)
                if gform(multiply(A, B[i], B[j]), B[k]) != gform(B[i], multiply(A, B[j], B[k]))), None)
    parts.append(fail("invariant_metric", index=bad) if bad else ok("invariant_metric"))
    return combine("frobenius_algebra", parts)


def check_algebra_axioms(A: FiberAlgebra, name: str = "algebra") -> CheckReport:
    """Commutative, associative, unital; no metric."""
    identity = linalg.identity(A.n)
    report = check_frobenius_algebra(A, identity)
    parts = tuple(p for p in report.parts if p.name != "invariant_metric")
    return combine(name, parts)
