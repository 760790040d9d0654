"""Seeded generators for rational points, polynomials and test sections.

Every randomized check draws from a ``random.Random`` seeded by the caller,
so reports are reproducible bit-for-bit.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .fields import PolyOneForm, PolyVectorField, Section
from .poly import MultiPoly

NUM_RANGE = (-9, 9)
DEN_RANGE = (1, 9)
FIELD_DEGREE = 2


def random_rational(rng: random.Random, num=NUM_RANGE, den=DEN_RANGE) -> Fraction:
    return Fraction(rng.randint(*num), rng.randint(*den))


def random_point(rng: random.Random, n: int) -> tuple[Fraction, ...]:
    return tuple(random_rational(rng) for _ in range(n))


def monomials(n: int, max_degree: int) -> list[tuple[int, ...]]:
    out = [e for d in range(max_degree + 1) for e in itertools.product(range(d + 1), repeat=n) if sum(e) == d]
    return sorted(set(out), key=lambda e: (sum(e), e))


def random_poly(rng: random.Random, n: int, max_degree: int = FIELD_DEGREE, density: float = 0.6,
                coeff_range: int = 5) -> MultiPoly:
    terms = {}
    for e in monomials(n, max_degree):
        if rng.random() < density:
            terms[e] = rng.randint(-coeff_range, coeff_range)
    return MultiPoly(n, terms)


def random_section(rng: random.Random, rank: int, nvars: int, kind: type[Section] = PolyVectorField,
                   max_degree: int = FIELD_DEGREE) -> Section:
    return kind(random_poly(rng, nvars, max_degree) for _ in range(rank))


def random_vector_field(rng: random.Random, n: int, max_degree: int = FIELD_DEGREE) -> PolyVectorField:
    return random_section(rng, n, n, PolyVectorField, max_degree)


def random_one_form(rng: random.Random, n: int, max_degree: int = FIELD_DEGREE) -> PolyOneForm:
    return random_section(rng, n, n, PolyOneForm, max_degree)


def random_element(rng: random.Random, n: int) -> tuple[Fraction, ...]:
    return random_point(rng, n)


def default_test_functions(n: int) -> list[MultiPoly]:
    """``1``, ``t^i`` and ``t^i t^j``."""
    return [MultiPoly.monomial(e) for e in monomials(n, 2)]
