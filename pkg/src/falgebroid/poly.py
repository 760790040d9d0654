"""Exact arithmetic kernel.

Sparse multivariate polynomials over the rationals and formal quotients of
them.  Coefficients are :class:`fractions.Fraction`; nothing in here ever
touches a float.

Variables are indexed from 0, so ``MultiPoly.var(3, 0)`` is ``t1`` in a
three-dimensional coordinate system.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

Rational = Fraction
Exponent = tuple[int, ...]
RationalPoint = tuple[Fraction, ...]


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact coefficients")
    return Fraction(value)


def as_point(coords: Iterable) -> RationalPoint:
    return tuple(as_rational(c) for c in coords)


class DimensionError(ValueError):
    """Variable-count mismatch between operands."""


_SHIFT = 16
_MASK = (1 << _SHIFT) - 1
_MAX_EXP = 1 << (_SHIFT - 1)


def _pack(exps: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0:
            raise ValueError(f"negative exponent in {tuple(exps)}")
        if e >= _MAX_EXP:
            raise OverflowError("exponent too large")
        key |= e << (_SHIFT * i)
    return key


def _unpack(key: int, n: int) -> Exponent:
    return tuple((key >> (_SHIFT * i)) & _MASK for i in range(n))


def _normalized(n: int, terms: dict[int, int], den: int) -> MultiPoly:
    terms = {k: c for k, c in terms.items() if c}
    if not terms:
        return MultiPoly._raw(n, {}, 1)
    g = gcd(den, *terms.values())
    if g != 1:
        terms = {k: c // g for k, c in terms.items()}
        den //= g
    return MultiPoly._raw(n, terms, den)


class MultiPoly:
    """Polynomial in ``n`` variables with rational coefficients.

    Internally the coefficients are integers over one positive common
    denominator (kept coprime to their content) and exponent vectors are
    packed into single ints; ``terms`` exposes the usual
    ``{exponent tuple: Fraction}`` view.  Values are immutable.
    """

    __slots__ = ("n", "_terms", "_den", "_hash", "_deg")

    def __init__(self, n: int, terms: Mapping[Exponent, object] | None = None):
        if n < 0:
            raise ValueError("variable count must be non-negative")
        acc: dict[int, Fraction] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != n:
                raise DimensionError(f"exponent {exps} has length {len(exps)}, expected {n}")
            key = _pack(exps)
            acc[key] = acc.get(key, Fraction(0)) + as_rational(coeff)
        den = 1
        for c in acc.values():
            den = den * c.denominator // gcd(den, c.denominator)
        ints = {k: c.numerator * (den // c.denominator) for k, c in acc.items()}
        other = _normalized(n, ints, den)
        self.n = n
        self._terms = other._terms
        self._den = other._den
        self._hash = None
        self._deg = None

    @classmethod
    def _raw(cls, n: int, terms: dict[int, int], den: int) -> MultiPoly:
        # trusted constructor: terms nonzero, den > 0 and coprime to content
        p = object.__new__(cls)
        p.n = n
        p._terms = terms
        p._den = den
        p._hash = None
        p._deg = None
        return p

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> MultiPoly:
        return cls._raw(n, {}, 1)

    @classmethod
    def const(cls, n: int, c) -> MultiPoly:
        c = as_rational(c)
        if not c:
            return cls._raw(n, {}, 1)
        return cls._raw(n, {0: c.numerator}, c.denominator)

    @classmethod
    def var(cls, n: int, i: int) -> MultiPoly:
        if not 0 <= i < n:
            raise IndexError(f"variable index {i} out of range for n={n}")
        return cls._raw(n, {1 << (_SHIFT * i): 1}, 1)

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> MultiPoly:
        return cls(len(exps), {tuple(exps): coeff})

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[Exponent, Fraction]:
        n, d = self.n, self._den
        return {_unpack(k, n): Fraction(c, d) for k, c in self._terms.items()}

    def items(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in deterministic (graded, then lexicographic) order."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        if self._deg is None:
            n = self.n
            self._deg = max((sum(_unpack(k, n)) for k in self._terms), default=-1)
        return self._deg

    def is_constant(self) -> bool:
        return all(k == 0 for k in self._terms)

    def constant_term(self) -> Fraction:
        return Fraction(self._terms.get(0, 0), self._den)

    def coeff(self, exps: Sequence[int]) -> Fraction:
        return Fraction(self._terms.get(_pack(exps), 0), self._den)

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.n == other.n and self._den == other._den and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.const(self.n, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self._den, frozenset(self._terms.items())))
        return self._hash

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            if other.n != self.n:
                raise DimensionError(f"variable-count mismatch: {self.n} vs {other.n}")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(self.n, other)
        raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")

    def __add__(self, other) -> MultiPoly:
        other = self._coerce(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        da, db = self._den, other._den
        if da == db:
            fa = fb = 1
            den = da
        else:
            g = gcd(da, db)
            fa, fb = db // g, da // g
            den = da * fa
        a, b = self._terms, other._terms
        if len(b) > len(a):
            a, b, fa, fb = b, a, fb, fa
        out = {k: c * fa for k, c in a.items()} if fa != 1 else dict(a)
        get = out.get
        for k, c in b.items():
            out[k] = get(k, 0) + c * fb
        if den == 1:
            return MultiPoly._raw(self.n, {k: c for k, c in out.items() if c}, 1)
        return _normalized(self.n, out, den)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        return MultiPoly._raw(self.n, {k: -c for k, c in self._terms.items()}, self._den)

    def __sub__(self, other) -> MultiPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> MultiPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> MultiPoly:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        a, b = self._terms, other._terms
        if not a or not b:
            return MultiPoly._raw(self.n, {}, 1)
        if self.degree() + other.degree() >= _MAX_EXP:
            raise OverflowError("product degree too large")
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, int] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return _normalized(self.n, out, self._den * other._den)

    __rmul__ = __mul__

    def scale(self, c) -> MultiPoly:
        c = as_rational(c)
        if not c or not self._terms:
            return MultiPoly._raw(self.n, {}, 1)
        return _normalized(self.n, {k: v * c.numerator for k, v in self._terms.items()},
                           self._den * c.denominator)

    def __pow__(self, k: int) -> MultiPoly:
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = MultiPoly.const(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- calculus and evaluation -----------------------------------------
    def diff(self, i: int) -> MultiPoly:
        """Formal partial derivative with respect to variable ``i``."""
        if not 0 <= i < self.n:
            raise IndexError(f"variable index {i} out of range for n={self.n}")
        shift = _SHIFT * i
        unit = 1 << shift
        out = {}
        for key, c in self._terms.items():
            e = (key >> shift) & _MASK
            if e:
                out[key - unit] = c * e
        return _normalized(self.n, out, self._den)

    def evaluate(self, pt: Sequence) -> Fraction:
        if len(pt) != self.n:
            raise DimensionError(f"point has {len(pt)} coordinates, polynomial has {self.n} variables")
        pt = [as_rational(x) for x in pt]
        n = self.n
        # common denominator of the point keeps the sum in integers
        dens = [x.denominator for x in pt]
        nums = [x.numerator for x in pt]
        degs = [0] * n
        unpacked = []
        for key, c in self._terms.items():
            e = _unpack(key, n)
            unpacked.append((e, c))
            for i in range(n):
                if e[i] > degs[i]:
                    degs[i] = e[i]
        num_pows = [[v ** k for k in range(d + 1)] for v, d in zip(nums, degs)]
        den_pows = [[v ** k for k in range(d + 1)] for v, d in zip(dens, degs)]
        total = 0
        for e, c in unpacked:
            term = c
            for i in range(n):
                term *= num_pows[i][e[i]] * den_pows[i][degs[i] - e[i]]
            total += term
        scale = self._den
        for i in range(n):
            scale *= den_pows[i][degs[i]]
        return Fraction(total, scale)

    # -- display ----------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-x for x in kv[0]))):
            mono = "*".join(f"t{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"MultiPoly({self.n}, {str(self)!r})"


def variables(n: int) -> tuple[MultiPoly, ...]:
    return tuple(MultiPoly.var(n, i) for i in range(n))


def poly_arith(a: MultiPoly, b: MultiPoly, kind: str) -> MultiPoly:
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown operation {kind!r}")


def partial_derivative(p: MultiPoly, i: int) -> MultiPoly:
    return p.diff(i)


def evaluate(p: MultiPoly, pt: Sequence) -> Fraction:
    return p.evaluate(pt)


class RationalFunction:
    """Formal quotient ``num / den`` of polynomials.

    No canonical form is kept.  Equality is decided by cross-multiplication,
    see :func:`rf_equal`.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None):
        if den is None:
            den = MultiPoly.const(num.n, 1)
        if den.is_zero():
            raise ZeroDivisionError("denominator is the zero polynomial")
        if num.n != den.n:
            raise DimensionError("numerator and denominator live in different rings")
        self.num = num
        self.den = den

    @property
    def n(self) -> int:
        return self.num.n

    @classmethod
    def from_poly(cls, p: MultiPoly) -> RationalFunction:
        return cls(p)

    def _coerce(self, other) -> RationalFunction:
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, MultiPoly):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction(MultiPoly.const(self.n, other))
        raise TypeError(f"cannot combine RationalFunction with {type(other).__name__}")

    def __add__(self, other) -> RationalFunction:
        other = self._coerce(other)
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> RationalFunction:
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other) -> RationalFunction:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> RationalFunction:
        return self._coerce(other) - self

    def __mul__(self, other) -> RationalFunction:
        other = self._coerce(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> RationalFunction:
        other = self._coerce(other)
        return RationalFunction(self.num * other.den, self.den * other.num)

    def diff(self, i: int) -> RationalFunction:
        """Quotient rule."""
        return RationalFunction(
            self.num.diff(i) * self.den - self.num * self.den.diff(i), self.den * self.den
        )

    def evaluate(self, pt: Sequence) -> Fraction:
        d = self.den.evaluate(pt)
        if not d:
            raise ZeroDivisionError(f"denominator vanishes at {tuple(pt)}")
        return self.num.evaluate(pt) / d

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other) -> bool:
        try:
            return rf_equal(self, self._coerce(other))
        except TypeError:
            return NotImplemented

    __hash__ = None  # equality is not structural

    def __repr__(self) -> str:
        return f"RationalFunction(({self.num}) / ({self.den}))"


def rf_equal(x: RationalFunction, y: RationalFunction) -> bool:
    """Decide ``x == y`` by checking ``x.num*y.den - y.num*x.den == 0``."""
    if x.den == y.den:
        return x.num == y.num
    return (x.num * y.den - y.num * x.den).is_zero()


def rf_arith(x: RationalFunction, y: RationalFunction, kind: str) -> RationalFunction:
    if kind == "add":
        return x + y
    if kind == "sub":
        return x - y
    if kind == "mul":
        return x * y
    raise ValueError(f"unknown operation {kind!r}")
