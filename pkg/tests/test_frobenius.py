from __future__ import annotations

import itertools
from fractions import Fraction as F

import pytest
import sympy

from conftest import A3_TERMS, make_a3, make_n2
from oracles import sympy_wdvv_zero
from falgebroid.fields import PolyVectorField
from falgebroid.frobenius import (
    FrobeniusSpec,
    SpecError,
    affine_field,
    c_cubic,
    check_c_symmetry,
    check_covariant_c_symmetry,
    check_euler_conditions,
    check_metric_normalization,
    check_quasi_homogeneity,
    check_wdvv,
    raw_third_derivatives,
    structure_constants,
    third_derivatives,
    trivial_flat_checks,
)
from falgebroid.poly import MultiPoly, variables


def test_oracle_agrees_on_a3():
    assert sympy_wdvv_zero(A3_TERMS, [[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    assert check_wdvv(make_a3()).passed


def test_oracle_solves_the_a3_family():
    # F = 1/2 t1^2 t3 + 1/2 t1 t2^2 + a t2^2 t3^2 + b t3^5 satisfies WDVV iff b = 4 a^2 / 15
    xs = sympy.symbols("t1:4")
    a, b = sympy.symbols("a b")
    pot = xs[0] ** 2 * xs[2] / 2 + xs[0] * xs[1] ** 2 / 2 + a * xs[1] ** 2 * xs[2] ** 2 + b * xs[2] ** 5
    inv = sympy.Matrix([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    d3 = {(i, j, k): sympy.diff(pot, xs[i], xs[j], xs[k]) for i, j, k in itertools.product(range(3), repeat=3)}
    eqs = set()
    for i, j, k, l in itertools.product(range(3), repeat=4):
        expr = sympy.expand(sum(d3[i, j, p] * inv[p, q] * d3[q, k, l] - d3[i, k, p] * inv[p, q] * d3[q, j, l]
                                for p in range(3) for q in range(3)))
        eqs.update(sympy.Poly(expr, *xs).coeffs())
    assert sympy.solve(list(eqs), b, dict=True) == [{b: 4 * a ** 2 / 15}]
    for a_val in (F(-1, 16), F(3), F(2, 5)):
        terms = dict(A3_TERMS)
        terms[(0, 2, 2)] = a_val
        terms[(0, 0, 5)] = 4 * a_val ** 2 / 15
        assert check_wdvv(make_a3(terms)).passed


def test_n2_by_direct_expansion(n2):
    spec, tensor = n2
    t1, t2 = variables(2)
    # F = 1/2 t1^2 t2 + t2^4: F_112 = 1, F_222 = 24 t2, the rest vanish
    f3 = third_derivatives(spec.potential)
    assert f3[0][0][1] == MultiPoly.const(2, 1)
    assert f3[1][1][1] == t2 * 24
    assert f3[0][0][0].is_zero() and f3[0][1][1].is_zero()
    # e2 . e2 = 24 t2 e1
    assert tensor.c_mixed[1][1] == (t2 * 24, MultiPoly.zero(2))
    assert tensor.c_upper[0][0] == (MultiPoly.zero(2), t2 * 24)
    for check in (check_metric_normalization(spec), check_c_symmetry(tensor),
                  check_covariant_c_symmetry(tensor), check_wdvv(spec),
                  check_quasi_homogeneity(spec).as_check(), check_euler_conditions(spec, tensor)):
        assert check.passed, check


def test_third_derivative_cache_matches_raw():
    spec = make_a3()
    assert third_derivatives(spec.potential) == raw_third_derivatives(spec.potential)


def test_a3_quasi_homogeneity_report():
    q = check_quasi_homogeneity(make_a3())
    assert q.passed and q.residual.is_zero()
    # adding a quadratic term leaves a quadratic residual, still accepted
    t1, t2, t3 = variables(3)
    spec = make_a3()
    bumped = FrobeniusSpec(3, spec.potential + t2 * t3, spec.metric, spec.euler_a, spec.euler_b, spec.charge)
    q = check_quasi_homogeneity(bumped)
    assert q.passed
    # E(t2 t3) - (5/2) t2 t3 = (3/4 + 1/2 - 5/2) t2 t3
    assert q.A[1][2] == q.A[2][1] == F(-5, 4)


def test_wdvv_failure_carries_witness():
    terms = dict(A3_TERMS)
    terms[(0, 0, 5)] += 1
    report = check_wdvv(make_a3(terms))
    assert not report.passed
    assert not report.witness["difference"].is_zero()
    assert len(report.witness["index"]) == 4


def test_metric_normalization_failure():
    t1, t2 = variables(2)
    spec = FrobeniusSpec(2, t1 * t1 * t2 + t2 ** 4, [[0, 1], [1, 0]], [[1, 0], [0, F(2, 3)]], [0, 0], F(1, 3))
    report = check_metric_normalization(spec)
    assert not report.passed and report.witness["index"]


def test_euler_normal_form_reported():
    s = make_n2()
    unit = FrobeniusSpec(2, s.potential, s.metric, [[0, 0], [0, 0]], [1, 0], s.charge)
    report = check_euler_conditions(unit, structure_constants(unit))
    assert not report.passed
    assert "euler_normal_form" in report.failed_parts()


def test_spec_validation():
    t1, t2 = variables(2)
    pot = t1 * t1 * t2
    with pytest.raises(SpecError, match="metric not symmetric"):
        FrobeniusSpec(2, pot, [[0, 1], [2, 0]], [[1, 0], [0, 1]], [0, 0], 0)
    with pytest.raises(SpecError, match="singular"):
        FrobeniusSpec(2, pot, [[1, 1], [1, 1]], [[1, 0], [0, 1]], [0, 0], 0)
    with pytest.raises(SpecError):
        FrobeniusSpec(2, MultiPoly.var(3, 0), [[0, 1], [1, 0]], [[1, 0], [0, 1]], [0, 0], 0)


def test_affine_field_and_c_cubic(a3):
    spec, tensor = a3
    E = affine_field(spec.euler_a, spec.euler_b)
    assert E == spec.euler_field
    e = spec.unit_field
    # C(e, X, Y) = eta(X, Y)
    basis = PolyVectorField.basis_all(3, 3)
    for i, j in itertools.product(range(3), repeat=2):
        assert c_cubic(tensor, spec, e, basis[i], basis[j]) == MultiPoly.const(3, spec.metric[i][j])


def test_flat_checks_are_trivially_true():
    assert all(c.passed for c in trivial_flat_checks())
