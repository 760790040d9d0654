from __future__ import annotations

from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from falgebroid import linalg
from falgebroid.fields import (
    PolyOneForm,
    PolyVectorField,
    differential,
    lie_bracket,
    lie_derivative_form,
    multiply,
    pairing,
)
from falgebroid.poly import DimensionError, MultiPoly, variables

fractions = st.builds(F, st.integers(-9, 9), st.integers(1, 9))
square3 = st.lists(st.lists(fractions, min_size=3, max_size=3), min_size=3, max_size=3)


@settings(max_examples=200, deadline=None)
@given(square3)
def test_det_matches_sympy(m):
    ref = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in m]).det()
    assert linalg.det(m) == F(int(ref.p), int(ref.q))


@settings(max_examples=200, deadline=None)
@given(square3, st.lists(fractions, min_size=3, max_size=3))
def test_solve_and_inverse(m, b):
    if not linalg.det(m):
        with pytest.raises(linalg.SingularMatrix):
            linalg.inverse(m)
        return
    x = linalg.solve(m, b)
    assert linalg.matvec(m, x) == tuple(b)
    assert linalg.matmul(m, linalg.inverse(m)) == linalg.identity(3)


def test_singular_solve():
    with pytest.raises(linalg.SingularMatrix):
        linalg.solve([[1, 2], [2, 4]], [1, 1])


def test_poly_det_and_adjugate():
    t1, t2, t3 = variables(3)
    m = [[t1, t2, MultiPoly.const(3, 1)], [t2, t3, t1], [t3 * t3, MultiPoly.zero(3), t2]]
    d = linalg.poly_det(m)
    # cofactor expansion along the first row, by hand
    assert d == t1 * t2 * t3 - t2 ** 3 + t1 * t2 * t3 * t3 - t3 ** 3
    xs = sympy.symbols("t1:4")
    M = sympy.Matrix([[xs[0], xs[1], 1], [xs[1], xs[2], xs[0]], [xs[2] ** 2, 0, xs[1]]])
    pt = (F(2), F(-1, 3), F(5, 7))
    assert d.evaluate(pt) == F(str(M.det().subs(dict(zip(xs, pt)))))
    adj = linalg.poly_adjugate(m)
    # m * adj(m) = det(m) I
    for i in range(3):
        for j in range(3):
            entry = sum((m[i][k] * adj[k][j] for k in range(3)), MultiPoly.zero(3))
            assert entry == (d if i == j else MultiPoly.zero(3))


def test_lie_bracket_examples():
    t1, t2 = variables(2)
    X = PolyVectorField([t1, MultiPoly.zero(2)])
    Y = PolyVectorField([MultiPoly.zero(2), t1 * t1])
    assert lie_bracket(X, Y) == PolyVectorField([MultiPoly.zero(2), t1 * t1 * 2])
    assert lie_bracket(Y, X) == -lie_bracket(X, Y)
    with pytest.raises(DimensionError):
        lie_bracket(X, PolyVectorField([t1]))


def test_sections_do_not_mix():
    t1, t2 = variables(2)
    with pytest.raises(TypeError):
        PolyVectorField([t1, t2]) + PolyOneForm([t1, t2])


def test_cartan_formula_on_exact_forms():
    t1, t2, t3 = variables(3)
    X = PolyVectorField([t2 * t3, t1 - t3, t1 * t1])
    f = t1 * t2 * t3 + t2 ** 3
    # L_X df = d(X f)
    assert lie_derivative_form(X, differential(f)) == differential(X.apply(f))
    assert pairing(differential(f), X) == X.apply(f)


def test_multiply_against_structure_functions():
    n = 2
    one, zero = MultiPoly.const(n, 1), MultiPoly.zero(n)
    t1, t2 = variables(n)
    # e0 unit, e1 e1 = t2 e0
    product = [[[one, zero], [zero, one]], [[zero, one], [t2, zero]]]
    e0, e1 = PolyVectorField.basis_all(n, n)
    assert multiply(product, e1, e1) == PolyVectorField([t2, zero])
    assert multiply(product, e0, e1) == e1
    x = PolyVectorField([t1, one])
    assert multiply(product, x, x) == PolyVectorField([t1 * t1 + t2, t1 * 2])
