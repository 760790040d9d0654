"""Polynomial vector fields and one-forms in flat coordinates."""
from __future__ import annotations

from typing import Iterable, Sequence

from .poly import DimensionError, MultiPoly

# product[i][j][k]: coefficient of the k-th basis section in e_i * e_j
Product = Sequence[Sequence[Sequence[MultiPoly]]]


class Section:
    """A section written in a coordinate frame: a tuple of polynomial components."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[MultiPoly]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a section needs at least one component")
        nvars = comps[0].n
        if any(c.n != nvars for c in comps):
            raise DimensionError("components live in different polynomial rings")
        self.components = comps

    @classmethod
    def zero(cls, rank: int, nvars: int):
        return cls(MultiPoly.zero(nvars) for _ in range(rank))

    @classmethod
    def basis(cls, rank: int, nvars: int, i: int):
        return cls(MultiPoly.const(nvars, int(k == i)) for k in range(rank))

    @classmethod
    def basis_all(cls, rank: int, nvars: int):
        return [cls.basis(rank, nvars, i) for i in range(rank)]

    @property
    def rank(self) -> int:
        return len(self.components)

    @property
    def nvars(self) -> int:
        return self.components[0].n

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> MultiPoly:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def _check(self, other: Section):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.rank != self.rank:
            raise DimensionError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other):
        self._check(other)
        return type(self)(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        self._check(other)
        return type(self)(a - b for a, b in zip(self, other))

    def __neg__(self):
        return type(self)(-a for a in self)

    def scale(self, f) -> Section:
        """Multiply every component by a function (polynomial or constant)."""
        return type(self)(a * f for a in self)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Section):
            return NotImplemented
        return type(self) is type(other) and self.components == other.components

    def __hash__(self):
        return hash((type(self).__name__, self.components))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({', '.join(str(c) for c in self)})"


class PolyVectorField(Section):
    """Vector field ``sum_i X^i(t) d/dt^i``."""

    def apply(self, f: MultiPoly) -> MultiPoly:
        """Directional derivative ``X f``."""
        total = MultiPoly.zero(f.n)
        for i, xi in enumerate(self.components):
            if xi:
                total = total + xi * f.diff(i)
        return total


class PolyOneForm(Section):
    """One-form ``sum_i alpha_i(t) dt^i``."""


def differential(f: MultiPoly) -> PolyOneForm:
    return PolyOneForm(f.diff(i) for i in range(f.n))


def lie_bracket(x: PolyVectorField, y: PolyVectorField) -> PolyVectorField:
    """``[X, Y]^j = sum_i X^i d_i Y^j - Y^i d_i X^j``."""
    if x.rank != y.rank:
        raise DimensionError(f"dimension mismatch: {x.rank} vs {y.rank}")
    if x.rank != x.nvars:
        raise DimensionError("vector field rank must equal the number of coordinates")
    return PolyVectorField(x.apply(yj) - y.apply(xj) for xj, yj in zip(x, y))


def lie_derivative_form(x: PolyVectorField, beta: PolyOneForm) -> PolyOneForm:
    """``(L_X beta)_j = sum_i X^i d_i beta_j + beta_i d_j X^i``."""
    n = x.nvars
    out = []
    for j in range(n):
        acc = x.apply(beta[j])
        for i in range(n):
            if beta[i]:
                acc = acc + beta[i] * x[i].diff(j)
        out.append(acc)
    return PolyOneForm(out)


def multiply(product: Product, x: Section, y: Section) -> Section:
    """Fibrewise product of two sections from structure functions."""
    r = len(product)
    if x.rank != r or y.rank != r:
        raise DimensionError(f"sections of rank {x.rank}, {y.rank} against product of rank {r}")
    nvars = x.nvars
    out = [MultiPoly.zero(nvars) for _ in range(r)]
    for i in range(r):
        if not x[i]:
            continue
        for j in range(r):
            if not y[j]:
                continue
            xy = x[i] * y[j]
            row = product[i][j]
            for k in range(r):
                if row[k]:
                    out[k] = out[k] + row[k] * xy
    return type(x)(out)


def pairing(alpha: PolyOneForm, x: PolyVectorField) -> MultiPoly:
    total = MultiPoly.zero(x.nvars)
    for a, v in zip(alpha, x):
        total = total + a * v
    return total
