from __future__ import annotations

import random
from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from falgebroid.fiber_algebra import (
    FiberAlgebra,
    NotInvertible,
    algebra_at,
    charpoly,
    check_algebra_axioms,
    check_frobenius_algebra,
    discriminant_det,
    has_nilpotent_basis_combination,
    is_semisimple,
    is_squarefree,
    multiplication_operator,
    univariate_gcd,
)
from falgebroid.poly import variables
from falgebroid.sampling import random_element, random_point

fractions = st.builds(F, st.integers(-9, 9), st.integers(1, 9))


def test_n2_algebra_at_point(n2):
    spec, tensor = n2
    A = algebra_at(tensor, (F(1), F(1, 2)))
    e1, e2 = A.basis
    assert A.multiply(e2, e2) == (F(12), F(0))
    assert A.multiply(e1, e2) == e2
    assert check_frobenius_algebra(A, spec.metric).passed


def test_inverse_of_euler_field(n2):
    spec, tensor = n2
    pt = (F(3), F(1, 2))
    A = algebra_at(tensor, pt)
    E = tuple(c.evaluate(pt) for c in spec.euler_field)
    inv = A.invert(E)
    assert A.multiply(E, inv) == A.unit
    assert A.power(E, -1) == inv
    assert A.power(E, 2) == A.multiply(E, E)


def test_not_invertible_on_discriminant(n2):
    spec, tensor = n2
    # Delta = t1^2 - 32/3 t2^3 vanishes at (48, 6)
    delta = discriminant_det(tensor, spec)
    t1, t2 = variables(2)
    assert delta == t1 * t1 - t2 ** 3 * F(32, 3)
    pt = (F(48), F(6))
    A = algebra_at(tensor, pt)
    with pytest.raises(NotInvertible):
        A.invert(tuple(c.evaluate(pt) for c in spec.euler_field))


def test_a3_discriminant_against_sympy(a3):
    spec, tensor = a3
    delta = discriminant_det(tensor, spec)
    M = multiplication_operator(tensor, spec.euler_field)
    rng = random.Random(3)
    for _ in range(5):
        pt = random_point(rng, 3)
        num = sympy.Matrix([[sympy.Rational(x.evaluate(pt).numerator, x.evaluate(pt).denominator)
                             for x in row] for row in M])
        assert delta.evaluate(pt) == F(str(num.det()))


def test_twisted_and_dual_algebras(a3):
    spec, tensor = a3
    rng = random.Random(1)
    pt = random_point(rng, 3)
    A = algebra_at(tensor, pt)
    E = tuple(c.evaluate(pt) for c in spec.euler_field)
    D = A.dual(E)
    assert D.unit == E
    assert check_algebra_axioms(D).passed
    x, y = random_element(rng, 3), random_element(rng, 3)
    assert D.multiply(x, y) == A.multiply(A.multiply(x, y), A.invert(E))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.lists(fractions, min_size=3, max_size=3), min_size=3, max_size=3))
def test_charpoly_matches_sympy(m):
    lam = sympy.Symbol("lam")
    M = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in m])
    ref = sympy.Poly(M.charpoly(lam).as_expr(), lam).all_coeffs()
    assert charpoly(m) == [F(int(c.p), int(c.q)) for c in ref]


def test_squarefree_and_gcd():
    # (x - 1)^2 (x + 2) = x^3 - 3x + 2
    p = [F(1), F(0), F(-3), F(2)]
    assert not is_squarefree(p)
    assert is_squarefree([F(1), F(0), F(-1)])
    g = univariate_gcd(p, [F(3), F(0), F(-3)])
    assert g == [F(1), F(-1)]


def test_semisimplicity(n2):
    spec, tensor = n2
    assert is_semisimple(algebra_at(tensor, (F(1), F(1))))
    # t2 = 0: e2^2 = 0, nilpotent
    A = algebra_at(tensor, (F(5), F(0)))
    assert not is_semisimple(A)
    assert has_nilpotent_basis_combination(A) is not None
    assert is_semisimple(FiberAlgebra(1, (((F(1),),),), (F(1),)))


def test_a3_semisimple_at_generic_point(a3):
    spec, tensor = a3
    A = algebra_at(tensor, (F(1), F(2), F(3)))
    assert is_semisimple(A)
    # at the origin the A3 fibre is C[x]/(x^3), not semisimple
    assert not is_semisimple(algebra_at(tensor, (0, 0, 0)))


def test_broken_algebra_is_detected():
    c = (((F(1), F(0)), (F(0), F(1))), ((F(0), F(1)), (F(1), F(1))))
    broken = FiberAlgebra(2, c, (F(0), F(1)))
    report = check_algebra_axioms(broken)
    assert not report.passed and "unit" in report.failed_parts()
