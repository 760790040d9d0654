"""Brackets, anchors, the Hertling-Manin defect and algebroid axiom checks."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import linalg
from .fields import (PolyOneForm, PolyVectorField, Product, Section, differential,
                     lie_bracket, lie_derivative_form, multiply)
from .poly import DimensionError, MultiPoly
from .report import CheckReport, combine, fail, ok
from .sampling import default_test_functions

Bracket = Callable[[Section, Section], Section]

COORDINATE_LIE = "coordinate_lie"
ANCHOR_PULLBACK = "anchor_pullback"
POISSON_KOSZUL = "poisson_koszul"
BRACKET_RULES = (COORDINATE_LIE, ANCHOR_PULLBACK, POISSON_KOSZUL)


class AlgebroidError(ValueError):
    """The requested bracket rule cannot be realised for this data."""


@dataclass(frozen=True)
class Anchor:
    """``rho(alpha)^i = sum_j matrix[i][j] alpha_j`` (an n x r matrix)."""

    matrix: tuple[tuple[MultiPoly, ...], ...]

    @classmethod
    def constant(cls, m: Sequence[Sequence], nvars: int) -> Anchor:
        return cls(tuple(tuple(MultiPoly.const(nvars, x) for x in row) for row in m))

    @classmethod
    def identity(cls, n: int) -> Anchor:
        return cls.constant(linalg.identity(n), n)

    @property
    def n(self) -> int:
        return len(self.matrix)

    @property
    def r(self) -> int:
        return len(self.matrix[0])

    def __call__(self, section: Section) -> PolyVectorField:
        if section.rank != self.r:
            raise DimensionError(f"section of rank {section.rank}, anchor expects {self.r}")
        out = []
        for row in self.matrix:
            acc = MultiPoly.zero(section.nvars)
            for m, s in zip(row, section):
                if m and s:
                    acc = acc + m * s
            out.append(acc)
        return PolyVectorField(out)

    def is_constant(self) -> bool:
        return all(x.is_constant() for row in self.matrix for x in row)

    def constant_matrix(self) -> linalg.Matrix:
        if not self.is_constant():
            raise AlgebroidError("anchor is not constant")
        return tuple(tuple(x.constant_term() for x in row) for row in self.matrix)

    def scaled(self, c) -> Anchor:
        return Anchor(tuple(tuple(x.scale(c) for x in row) for row in self.matrix))


@dataclass(frozen=True)
class PoissonBivector:
    """Antisymmetric ``Pi^{ij}(t)``; the Jacobi condition is tested, never assumed."""

    components: tuple[tuple[MultiPoly, ...], ...]

    def __post_init__(self):
        comps = tuple(tuple(row) for row in self.components)
        object.__setattr__(self, "components", comps)
        n = len(comps)
        for i, j in itertools.product(range(n), repeat=2):
            if comps[i][j] != -comps[j][i]:
                raise ValueError(f"bivector not antisymmetric at ({i}, {j})")

    @classmethod
    def from_upper(cls, n: int, entries: dict[tuple[int, int], MultiPoly]) -> PoissonBivector:
        """Build from entries ``Pi^{ij}`` with ``i < j``."""
        m = [[MultiPoly.zero(n) for _ in range(n)] for _ in range(n)]
        for (i, j), p in entries.items():
            m[i][j] = p
            m[j][i] = -p
        return cls(tuple(map(tuple, m)))

    @property
    def n(self) -> int:
        return len(self.components)

    def sharp(self, alpha: PolyOneForm) -> PolyVectorField:
        """``(Pi# alpha)^j = sum_i alpha_i Pi^{ij}``."""
        n = self.n
        out = []
        for j in range(n):
            acc = MultiPoly.zero(n)
            for i in range(n):
                if alpha[i] and self.components[i][j]:
                    acc = acc + alpha[i] * self.components[i][j]
            out.append(acc)
        return PolyVectorField(out)

    def pair(self, alpha: PolyOneForm, beta: PolyOneForm) -> MultiPoly:
        """``Pi(alpha, beta) = sum_ij alpha_i Pi^{ij} beta_j``."""
        n = self.n
        acc = MultiPoly.zero(n)
        for i, j in itertools.product(range(n), repeat=2):
            if alpha[i] and beta[j] and self.components[i][j]:
                acc = acc + alpha[i] * self.components[i][j] * beta[j]
        return acc

    def poisson_bracket(self, f: MultiPoly, g: MultiPoly) -> MultiPoly:
        return self.pair(differential(f), differential(g))

    def anchor(self) -> Anchor:
        n = self.n
        return Anchor(tuple(tuple(self.components[i][j] for i in range(n)) for j in range(n)))


def koszul_bracket(pi: PoissonBivector, alpha: PolyOneForm, beta: PolyOneForm) -> PolyOneForm:
    """``L_{Pi# alpha} beta - L_{Pi# beta} alpha - d Pi(alpha, beta)``.

    The exact-form bracket is then ``[df, dg] = d{f, g}``.
    """
    if alpha.rank != pi.n or beta.rank != pi.n:
        raise DimensionError("dimension mismatch")
    return (lie_derivative_form(pi.sharp(alpha), beta)
            - lie_derivative_form(pi.sharp(beta), alpha)
            - differential(pi.pair(alpha, beta)))


def pullback_bracket(anchor: Anchor, alpha: Section, beta: Section) -> Section:
    """``rho^{-1} [rho alpha, rho beta]`` for a constant invertible anchor."""
    inv = _constant_inverse(anchor)
    v = lie_bracket(anchor(alpha), anchor(beta))
    return type(alpha)(_apply_constant(inv, v))


def _constant_inverse(anchor: Anchor) -> linalg.Matrix:
    try:
        m = anchor.constant_matrix()
        if len(m) != len(m[0]):
            raise AlgebroidError("anchor is not square")
        return linalg.inverse(m)
    except linalg.SingularMatrix:
        raise AlgebroidError("anchor matrix is singular") from None


def _apply_constant(m: linalg.Matrix, comps: Sequence[MultiPoly]) -> list[MultiPoly]:
    out = []
    for row in m:
        acc = MultiPoly.zero(comps[0].n)
        for x, c in zip(row, comps):
            if x and c:
                acc = acc + c.scale(x)
        out.append(acc)
    return out


# -- Hertling-Manin defect ---------------------------------------------------

def defect(bracket: Bracket, mult: Callable[[Section, Section], Section],
           x: Section, y: Section, z: Section) -> Section:
    """``P_x(y, z) = [x, y z] - [x, y] z - y [x, z]``."""
    return bracket(x, mult(y, z)) - mult(bracket(x, y), z) - mult(y, bracket(x, z))


def hm_defect(product: Product, x: PolyVectorField, y: PolyVectorField, z: PolyVectorField) -> PolyVectorField:
    if not (len(product) == x.rank == y.rank == z.rank):
        raise DimensionError("dimension mismatch")
    return defect(lie_bracket, lambda a, b: multiply(product, a, b), x, y, z)


def hm_residual(bracket: Bracket, mult, x, y, z, w) -> Section:
    """``P_{x y}(z, w) - x P_y(z, w) - y P_x(z, w)``."""
    return (defect(bracket, mult, mult(x, y), z, w)
            - mult(x, defect(bracket, mult, y, z, w))
            - mult(y, defect(bracket, mult, x, z, w)))


def _hm_tuples(sections: Sequence[Section]) -> Iterable[tuple[tuple[int, ...], tuple[Section, ...]]]:
    # Both sides are symmetric in (x, y) and (z, w) once the product is
    # commutative, which every caller checks separately.
    idx = range(len(sections))
    pairs = list(itertools.combinations_with_replacement(idx, 2))
    for (a, b), (c, d) in itertools.product(pairs, repeat=2):
        yield (a, b, c, d), (sections[a], sections[b], sections[c], sections[d])


def check_hertling_manin(product: Product,
                         extra_tuples: Sequence[tuple[PolyVectorField, ...]] = (),
                         basis: bool = True,
                         name: str = "hertling_manin") -> CheckReport:
    """HM identity on every coordinate-basis 4-tuple and on each supplied 4-tuple."""
    n = len(product)
    nvars = product[0][0][0].n
    mult = lambda a, b: multiply(product, a, b)
    if basis:
        B = PolyVectorField.basis_all(n, nvars)
        for idx in itertools.product(range(n), repeat=4):
            r = hm_residual(lie_bracket, mult, *(B[i] for i in idx))
            if not r.is_zero():
                return fail(name, basis_tuple=idx, residual=r)
    for k, tup in enumerate(extra_tuples):
        r = hm_residual(lie_bracket, mult, *tup)
        if not r.is_zero():
            return fail(name, sample_tuple=k, residual=r)
    return ok(name, detail=f"{n ** 4 if basis else 0} basis tuples, {len(extra_tuples)} sampled tuples")


# -- F-algebroids --------------------------------------------------------------

@dataclass(frozen=True)
class FAlgebroidSpec:
    n: int
    r: int
    product: tuple[tuple[tuple[MultiPoly, ...], ...], ...]
    unit: Section
    anchor: Anchor
    bracket_rule: str
    bivector: PoissonBivector | None = None
    section_kind: type = field(default=None)

    def __post_init__(self):
        if self.bracket_rule not in BRACKET_RULES:
            raise AlgebroidError(f"unknown bracket rule {self.bracket_rule!r}")
        if self.section_kind is None:
            kind = PolyVectorField if self.bracket_rule == COORDINATE_LIE else PolyOneForm
            object.__setattr__(self, "section_kind", kind)
        if len(self.product) != self.r or self.unit.rank != self.r:
            raise DimensionError("rank mismatch")
        if self.anchor.n != self.n or self.anchor.r != self.r:
            raise DimensionError("anchor shape mismatch")
        for i, j in itertools.combinations(range(self.r), 2):
            if self.product[i][j] != self.product[j][i]:
                raise ValueError(f"product not symmetric in lower indices ({i}, {j})")

    def bracket(self) -> Bracket:
        rule = self.bracket_rule
        if rule == COORDINATE_LIE:
            if self.r != self.n:
                raise AlgebroidError("coordinate Lie bracket needs rank equal to dimension")
            return lie_bracket
        if rule == ANCHOR_PULLBACK:
            anchor = self.anchor
            _constant_inverse(anchor)
            return lambda a, b: pullback_bracket(anchor, a, b)
        if self.bivector is None:
            raise AlgebroidError("poisson_koszul bracket needs a bivector")
        pi = self.bivector
        return lambda a, b: koszul_bracket(pi, a, b)

    def mult(self, a: Section, b: Section) -> Section:
        return multiply(self.product, a, b)

    def basis(self) -> list[Section]:
        return self.section_kind.basis_all(self.r, self.n)


def _first(name: str, items, test) -> CheckReport:
    for idx, payload in items:
        residual = test(*payload)
        if residual is not None and not residual.is_zero():
            return fail(name, tuple=idx, residual=residual)
    return ok(name)


def _bracket_parts(bracket: Bracket, anchor: Anchor, sections: list[Section],
                   functions: Sequence[MultiPoly]) -> list[CheckReport]:
    idx = range(len(sections))
    S = sections
    parts = [
        _first("bracket_antisymmetry",
               ((p, (S[p[0]], S[p[1]])) for p in itertools.combinations_with_replacement(idx, 2)),
               lambda a, b: bracket(a, b) + bracket(b, a)),
        _first("bracket_jacobi",
               ((t, (S[t[0]], S[t[1]], S[t[2]])) for t in itertools.combinations(idx, 3)),
               lambda a, b, c: bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))),
    ]

    def leibniz(a, b, f):
        return bracket(a, b.scale(f)) - b.scale(anchor(a).apply(f)) - bracket(a, b).scale(f)

    parts.append(_first(
        "leibniz",
        (((p, q, k), (S[p], S[q], f)) for p, q in itertools.product(idx, repeat=2)
         for k, f in enumerate(functions)),
        leibniz))
    parts.append(_first(
        "anchor_bracket_homomorphism",
        ((p, (S[p[0]], S[p[1]])) for p in itertools.combinations(idx, 2)),
        lambda a, b: anchor(bracket(a, b)) - lie_bracket(anchor(a), anchor(b))))
    return parts


def check_f_algebroid(spec: FAlgebroidSpec, base_product: Product,
                      test_sections: Sequence[Section] = (),
                      test_functions: Sequence[MultiPoly] | None = None) -> CheckReport:
    """Lie-bracket axioms, product axioms and conditions (a)-(d), over basis plus test data."""
    bracket = spec.bracket()
    if test_functions is None:
        test_functions = default_test_functions(spec.n)
    sections = spec.basis() + list(test_sections)
    idx = range(len(sections))
    S = sections
    mult = spec.mult
    base_mult = lambda a, b: multiply(base_product, a, b)

    parts = []
    parts.append(_first(
        "product_commutative",
        ((p, (S[p[0]], S[p[1]])) for p in itertools.combinations(idx, 2)),
        lambda a, b: mult(a, b) - mult(b, a)))
    parts.append(_first(
        "product_associative",
        ((t, (S[t[0]], S[t[1]], S[t[2]])) for t in itertools.product(idx, repeat=3)),
        lambda a, b, c: mult(mult(a, b), c) - mult(a, mult(b, c))))
    parts.append(_first(
        "product_unit",
        ((p, (S[p],)) for p in idx),
        lambda a: mult(spec.unit, a) - a))

    bparts = _bracket_parts(bracket, spec.anchor, sections, test_functions)
    parts.extend(bparts[:2])

    parts.append(_first(
        "hm_defect_identity",
        _hm_tuples(sections),
        lambda a, b, c, d: hm_residual(bracket, mult, a, b, c, d)))
    parts.append(_first(
        "anchor_product_homomorphism",
        ((p, (S[p[0]], S[p[1]])) for p in itertools.combinations_with_replacement(idx, 2)),
        lambda a, b: spec.anchor(mult(a, b)) - base_mult(spec.anchor(a), spec.anchor(b))))
    parts.extend(bparts[2:])
    return combine("f_algebroid", parts)


def check_lie_algebroid(r: int, bracket: Bracket, anchor: Anchor,
                        test_sections: Sequence[Section] = (),
                        test_functions: Sequence[MultiPoly] | None = None,
                        section_kind: type = PolyOneForm) -> CheckReport:
    """Antisymmetry, Jacobi, Leibniz and the anchor homomorphism."""
    nvars = anchor.matrix[0][0].n
    if test_functions is None:
        test_functions = default_test_functions(nvars)
    sections = section_kind.basis_all(r, nvars) + list(test_sections)
    return combine("lie_algebroid", _bracket_parts(bracket, anchor, sections, test_functions))


def tangent_lie_algebroid(n: int) -> tuple[Bracket, Anchor]:
    return lie_bracket, Anchor.identity(n)


def poisson_lie_algebroid(pi: PoissonBivector) -> tuple[Bracket, Anchor]:
    return (lambda a, b: koszul_bracket(pi, a, b)), pi.anchor()


def tangent_f_algebroid(spec, tensor) -> FAlgebroidSpec:
    """Identity anchor, coordinate bracket, product ``C^k_ij``, unit ``e``."""
    n = spec.n
    return FAlgebroidSpec(
        n=n, r=n, product=tensor.c_mixed, unit=PolyVectorField.basis(n, n, 0),
        anchor=Anchor.identity(n), bracket_rule=COORDINATE_LIE,
    )


def so3_bivector() -> PoissonBivector:
    """Linear Poisson structure of so(3): ``Pi^{12} = t3, Pi^{23} = t1, Pi^{31} = t2``."""
    t1, t2, t3 = (MultiPoly.var(3, i) for i in range(3))
    return PoissonBivector.from_upper(3, {(0, 1): t3, (1, 2): t1, (0, 2): -t2})
