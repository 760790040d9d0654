from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from falgebroid.duality import (
    DeltaFractions,
    accumulated_twist,
    build_cotangent_almost_frobenius,
    build_cotangent_frobenius,
    chain_products_at,
    check_chain_at,
    check_cotangent_frobenius,
    check_dual_identities,
    check_intersection_form,
    check_prop1_at,
    check_prop2_at,
    check_theorem1,
    dual_metric_at,
    dual_product,
    duality_map_at,
    pseudo_eventual_identity_at,
    rf_lie_bracket,
    rf_field_equal,
)
from falgebroid.fiber_algebra import NotInvertible, algebra_at
from falgebroid.frobenius import affine_field
from falgebroid.linalg import identity
from falgebroid.poly import variables
from falgebroid.sampling import random_element, random_point, random_vector_field


def euler_at(spec, pt):
    return tuple(c.evaluate(pt) for c in spec.euler_field)


def test_cotangent_frobenius(n2, a3):
    for spec, tensor in (n2, a3):
        cf = build_cotangent_frobenius(spec, tensor)
        assert check_cotangent_frobenius(cf, spec, tensor).passed


def test_einv_numerators(n2):
    spec, tensor = n2
    almost = build_cotangent_almost_frobenius(spec, tensor)
    t1, t2 = variables(2)
    assert almost.discriminant == t1 * t1 - t2 ** 3 * F(32, 3)
    pt = (F(2), F(1, 3))
    A = algebra_at(tensor, pt)
    einv = tuple(r.evaluate(pt) for r in almost.einv_rf)
    assert A.multiply(einv, euler_at(spec, pt)) == A.unit


def test_duality_map_is_multiplication_by_einv(a3):
    spec, tensor = a3
    rng = random.Random(8)
    for _ in range(5):
        pt = random_point(rng, 3)
        A = algebra_at(tensor, pt)
        D = duality_map_at(spec, tensor, pt)
        assert D == A.mult_operator(A.invert(euler_at(spec, pt)))


def test_duality_check_small(n2, a3):
    rng = random.Random(0)
    for spec, tensor in (n2, a3):
        pts = [random_point(rng, spec.n) for _ in range(10)]
        assert check_theorem1(spec, tensor, pts, samples=3).passed


def test_duality_check_skips_discriminant_points(n2):
    spec, tensor = n2
    report = check_theorem1(spec, tensor, [(48, 6), (1, 1)])
    assert report.passed
    assert report.parts[0].skipped and "discriminant" in report.parts[0].detail
    assert not report.parts[1].skipped


def test_dual_metric_symmetric(n2):
    spec, tensor = n2
    rng = random.Random(3)
    pt = random_point(rng, 2)
    x, y = random_element(rng, 2), random_element(rng, 2)
    assert dual_metric_at(spec, tensor, pt, x, y) == dual_metric_at(spec, tensor, pt, y, x)


def test_dual_identities_n2(n2):
    spec, tensor = n2
    almost = build_cotangent_almost_frobenius(spec, tensor)
    dual = dual_product(spec, tensor)
    rng = random.Random(1)
    tuples = [tuple(random_vector_field(rng, 2) for _ in range(4)) for _ in range(3)]
    report = check_dual_identities(dual, almost, tensor, tuples)
    assert report.passed, report.witness


def test_intersection_form(n2, a3):
    rng = random.Random(4)
    for spec, tensor in (n2, a3):
        dual = dual_product(spec, tensor)
        pts = [random_point(rng, spec.n) for _ in range(5)]
        assert check_intersection_form(spec, tensor, dual, pts).passed


def test_delta_bracket_matches_generic_quotient_rule(n2):
    spec, tensor = n2
    ctx = DeltaFractions(build_cotangent_almost_frobenius(spec, tensor).discriminant)
    rng = random.Random(6)
    for p, q in ((0, 0), (1, 0), (1, 2), (3, 1)):
        x = ctx.field([random_vector_field(rng, 2)[i] for i in range(2)], p)
        y = ctx.field([random_vector_field(rng, 2)[i] for i in range(2)], q)
        assert rf_field_equal(ctx.bracket(x, y), rf_lie_bracket(x.components(), y.components()))


def test_unit_euler_gives_identity_duality_map(unit_euler):
    spec, tensor = unit_euler
    rng = random.Random(2)
    for _ in range(10):
        assert duality_map_at(spec, tensor, random_point(rng, 2)) == identity(2)


def test_star_at_uses_euler_as_unit(a3):
    spec, tensor = a3
    dual = dual_product(spec, tensor)
    pt = (F(1), F(2), F(-1, 2))
    S = dual.star_at(pt)
    assert S.unit == euler_at(spec, pt)
    for b in S.basis:
        assert S.multiply(S.unit, b) == b


# -- chains ----------------------------------------------------------------------

def chain_fields(spec):
    E = spec.euler_field
    return [E, affine_field(spec.euler_a, [1, 0]), affine_field(spec.euler_a, [-2, 0])]


def test_chain_units_and_closed_form(n2):
    spec, tensor = n2
    ids = chain_fields(spec)
    rng = random.Random(5)
    for _ in range(5):
        pt = random_point(rng, 2)
        assert check_chain_at(tensor, pt, ids, 3).passed
        algebras = chain_products_at(tensor, pt, ids, 3)
        for stage in range(1, 4):
            assert algebras[stage].unit == tuple(c.evaluate(pt) for c in ids[stage - 1])


def test_props_at_random_points(n2):
    spec, tensor = n2
    ids = chain_fields(spec)
    rng = random.Random(7)
    for k in range(5):
        pt = random_point(rng, 2)
        assert check_prop1_at(tensor, pt, ids[0], ids[1]).passed
        assert check_prop2_at(tensor, pt, ids, seed=k).passed


def test_pseudo_identity_for_repeated_identity(n2):
    # with E1 = E0 the pseudo-eventual identity reduces to E0^{-1}
    spec, tensor = n2
    pt = (F(3), F(1, 2))
    E = euler_at(spec, pt)
    A0 = algebra_at(tensor, pt)
    assert pseudo_eventual_identity_at(tensor, pt, E, E) == A0.invert(E)


def test_chain_of_units_is_constant(n2):
    spec, tensor = n2
    e = spec.unit_field
    pt = (F(2), F(5))
    algebras = chain_products_at(tensor, pt, [e, e, e], 3)
    assert all(A.c == algebras[0].c for A in algebras)
    assert accumulated_twist(algebras[0], [A.unit for A in algebras[1:]]) == algebras[0].unit


def test_discriminant_point_names_stage_zero(n2):
    spec, tensor = n2
    ids = chain_fields(spec)
    with pytest.raises(NotInvertible) as exc:
        check_prop1_at(tensor, (48, 6), ids[0], ids[1])
    assert exc.value.stage == 0
    assert "stage 0" in str(exc.value)


def test_depth_beyond_identities(n2):
    spec, tensor = n2
    with pytest.raises(ValueError):
        chain_products_at(tensor, (1, 1), chain_fields(spec), 4)
