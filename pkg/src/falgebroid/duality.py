"""Almost duality as the composite of two anchors, and chains of dual products.

The cotangent bundle carries the product ``dt^i <> dt^j = C^{ij}_k dt^k``.
Two anchors leave it: ``rho1`` (raise the index with eta) lands on the
Frobenius product, ``rho2`` (contract with ``E^{-1}``) lands on the dual
product ``X * Y = X . Y . E^{-1}``.  ``D = rho2 o rho1^{-1}`` is then
multiplication by ``E^{-1}``.

``E^{-1}`` is kept exactly as ``adj(M_E) e / det(M_E)``, so every
symbolic object here is a polynomial over a power of the discriminant
polynomial ``Delta = det M_E``.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .algebroid import ANCHOR_PULLBACK, Anchor, FAlgebroidSpec, hm_residual
from .fiber_algebra import FiberAlgebra, NotInvertible, algebra_at, element, multiplication_operator
from .fields import PolyOneForm, PolyVectorField, Section, multiply
from .frobenius import FrobeniusSpec, StructureTensor
from .poly import MultiPoly, RationalFunction, as_point, rf_equal
from .report import CheckReport, combine, fail, ok, skipped
from .sampling import random_element


class DualityError(ValueError):
    """The Euler field is nowhere invertible (discriminant polynomial is zero)."""


# -- rational functions over powers of the discriminant ----------------------

class DeltaFractions:
    """Context for fractions ``N / Delta^p`` with one fixed polynomial ``Delta``."""

    def __init__(self, delta: MultiPoly):
        if delta.is_zero():
            raise DualityError("discriminant polynomial is identically zero")
        self.delta = delta
        self.n = delta.n
        self._powers = [MultiPoly.const(delta.n, 1), delta]
        self.grad = tuple(delta.diff(i) for i in range(delta.n))

    def power(self, p: int) -> MultiPoly:
        while len(self._powers) <= p:
            self._powers.append(self._powers[-1] * self.delta)
        return self._powers[p]

    def field(self, nums: Sequence[MultiPoly], p: int = 0) -> DeltaField:
        return DeltaField(self, tuple(nums), p)

    def polynomial_field(self, x: Section) -> DeltaField:
        return DeltaField(self, tuple(x.components), 0)

    def bracket(self, x: DeltaField, y: DeltaField) -> DeltaField:
        """Lie bracket with the quotient rule; ``[P/D^p, Q/D^q]`` has denominator ``D^(p+q+1)``."""
        P, Q, p, q = x.nums, y.nums, x.p, y.p
        pv, qv = PolyVectorField(P), PolyVectorField(Q)
        plain = [pv.apply(qj) - qv.apply(pj) for pj, qj in zip(P, Q)]
        if p == 0 and q == 0:
            return DeltaField(self, tuple(plain), 0)
        p_delta = pv.apply(self.delta)
        q_delta = qv.apply(self.delta)
        nums = []
        for j in range(len(P)):
            acc = self.delta * plain[j]
            if q and p_delta and Q[j]:
                acc = acc - (p_delta * Q[j]).scale(q)
            if p and q_delta and P[j]:
                acc = acc + (q_delta * P[j]).scale(p)
            nums.append(acc)
        return DeltaField(self, tuple(nums), p + q + 1)


@dataclass(frozen=True, eq=False)
class DeltaField:
    ctx: DeltaFractions
    nums: tuple[MultiPoly, ...]
    p: int

    def raised(self, q: int) -> DeltaField:
        if q == self.p:
            return self
        f = self.ctx.power(q - self.p)
        return DeltaField(self.ctx, tuple(c * f for c in self.nums), q)

    def __add__(self, other: DeltaField) -> DeltaField:
        q = max(self.p, other.p)
        a, b = self.raised(q), other.raised(q)
        return DeltaField(self.ctx, tuple(x + y for x, y in zip(a.nums, b.nums)), q)

    def __neg__(self) -> DeltaField:
        return DeltaField(self.ctx, tuple(-x for x in self.nums), self.p)

    def __sub__(self, other: DeltaField) -> DeltaField:
        return self + (-other)

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.nums)

    def components(self) -> list[RationalFunction]:
        den = self.ctx.power(self.p)
        return [RationalFunction(x, den) for x in self.nums]

    def evaluate(self, pt) -> tuple[Fraction, ...]:
        d = self.ctx.power(self.p).evaluate(pt)
        if not d:
            raise NotInvertible(f"point {tuple(map(str, pt))} lies on the discriminant")
        return tuple(x.evaluate(pt) / d for x in self.nums)

    def __repr__(self) -> str:
        return f"DeltaField(({', '.join(map(str, self.nums))}) / Delta^{self.p})"


def rf_field_equal(x: DeltaField, y: Sequence[RationalFunction]) -> bool:
    return all(rf_equal(a, b) for a, b in zip(x.components(), y))


def rf_lie_bracket(x: Sequence[RationalFunction], y: Sequence[RationalFunction]) -> list[RationalFunction]:
    """Coordinate Lie bracket of rational-function vector fields (generic quotient rule)."""
    n = len(x)
    out = []
    for j in range(n):
        acc = RationalFunction(MultiPoly.zero(x[0].n))
        for i in range(n):
            acc = acc + x[i] * y[j].diff(i) - y[i] * x[j].diff(i)
        out.append(acc)
    return out


# -- the two cotangent F-algebroids -----------------------------------------

@dataclass(frozen=True)
class CotangentFrobenius:
    """``(T*M, <>, U)`` with the constant anchor ``rho1 = eta^{-1}``."""

    n: int
    product: tuple  # C^{ij}_k
    unit: PolyOneForm
    rho1: Anchor

    def as_f_algebroid(self) -> FAlgebroidSpec:
        return FAlgebroidSpec(n=self.n, r=self.n, product=self.product, unit=self.unit,
                              anchor=self.rho1, bracket_rule=ANCHOR_PULLBACK, section_kind=PolyOneForm)


def build_cotangent_frobenius(spec: FrobeniusSpec, tensor: StructureTensor) -> CotangentFrobenius:
    n = spec.n
    unit = PolyOneForm(MultiPoly.const(n, spec.metric[0][j]) for j in range(n))
    return CotangentFrobenius(n, tensor.c_upper, unit, Anchor.constant(spec.metric_inverse, n))


def check_cotangent_frobenius(cf: CotangentFrobenius, spec: FrobeniusSpec, tensor: StructureTensor) -> CheckReport:
    """``rho1(U) = e``, ``U`` is the unit, and pushing ``<>`` through ``rho1`` gives ``.``."""
    n = cf.n
    parts = []
    e = spec.unit_field
    rho_u = cf.rho1(cf.unit)
    parts.append(ok("rho1_unit") if rho_u == e else fail("rho1_unit", image=rho_u))

    dt = PolyOneForm.basis_all(n, n)
    bad = next((i for i in range(n) if multiply(cf.product, cf.unit, dt[i]) != dt[i]), None)
    parts.append(ok("cotangent_unit") if bad is None else
                 fail("cotangent_unit", index=bad, product=multiply(cf.product, cf.unit, dt[bad])))

    failure = None
    for i, j in itertools.product(range(n), repeat=2):
        lhs = cf.rho1(multiply(cf.product, dt[i], dt[j]))
        rhs = multiply(tensor.c_mixed, cf.rho1(dt[i]), cf.rho1(dt[j]))
        if lhs != rhs:
            failure = fail("rho1_homomorphism", index=(i, j), difference=lhs - rhs)
            break
    parts.append(failure or ok("rho1_homomorphism"))

    # d_k . d_l reconstructed as rho1(rho1^{-1} d_k <> rho1^{-1} d_l)
    eta = spec.metric
    lowered = [PolyOneForm(MultiPoly.const(n, eta[k][j]) for j in range(n)) for k in range(n)]
    failure = None
    for k, l in itertools.product(range(n), repeat=2):
        rebuilt = cf.rho1(multiply(cf.product, lowered[k], lowered[l]))
        direct = PolyVectorField(tensor.c_mixed[k][l])
        if rebuilt != direct:
            failure = fail("product_reconstruction", index=(k, l), difference=rebuilt - direct)
            break
    parts.append(failure or ok("product_reconstruction"))
    return combine("cotangent_frobenius", parts)


@dataclass(frozen=True)
class CotangentAlmostFrobenius:
    """Anchor ``rho2[i][j] = sum_k (E^{-1})^k C^{ij}_k`` as fractions over ``Delta``."""

    n: int
    discriminant: MultiPoly
    einv_nums: tuple[MultiPoly, ...]  # E^{-1} = einv_nums / Delta
    rho2_nums: tuple[tuple[MultiPoly, ...], ...]  # rho2 = rho2_nums / Delta
    euler: PolyVectorField

    @property
    def rho2_rf(self) -> tuple[tuple[RationalFunction, ...], ...]:
        return tuple(tuple(RationalFunction(x, self.discriminant) for x in row) for row in self.rho2_nums)

    @property
    def einv_rf(self) -> tuple[RationalFunction, ...]:
        return tuple(RationalFunction(x, self.discriminant) for x in self.einv_nums)

    def rho2_at(self, pt) -> linalg.Matrix:
        d = self.discriminant.evaluate(pt)
        if not d:
            raise NotInvertible(f"point {tuple(map(str, pt))} lies on the discriminant")
        return tuple(tuple(x.evaluate(pt) / d for x in row) for row in self.rho2_nums)

    def rho2_field(self, ctx: DeltaFractions, alpha_index: int) -> DeltaField:
        """``rho2(dt^i)`` as a vector field over ``Delta``."""
        return ctx.field(self.rho2_nums[alpha_index], 1)


def _identity_field(spec: FrobeniusSpec, identity: PolyVectorField | None) -> PolyVectorField:
    return spec.euler_field if identity is None else identity


def inverse_numerators(tensor: StructureTensor, field: PolyVectorField) -> tuple[MultiPoly, tuple[MultiPoly, ...]]:
    """``(det M_x, adj(M_x) e_1)``: the algebra inverse of ``x(t)`` is the second over the first."""
    m = multiplication_operator(tensor, field)
    delta = linalg.poly_det(m)
    if delta.is_zero():
        raise DualityError("discriminant polynomial is identically zero: E is nowhere invertible")
    adj = linalg.poly_adjugate(m)
    return delta, tuple(adj[k][0] for k in range(tensor.n))


def build_cotangent_almost_frobenius(spec: FrobeniusSpec, tensor: StructureTensor,
                                     identity: PolyVectorField | None = None) -> CotangentAlmostFrobenius:
    """``identity`` overrides the Euler field (used for the degenerate case ``E = e``)."""
    n = spec.n
    E = _identity_field(spec, identity)
    delta, einv = inverse_numerators(tensor, E)
    rho2 = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = MultiPoly.zero(n)
            for k in range(n):
                c = tensor.c_upper[i][j][k]
                if c and einv[k]:
                    acc = acc + c * einv[k]
            row.append(acc)
        rho2.append(tuple(row))
    return CotangentAlmostFrobenius(n, delta, einv, tuple(rho2), E)


@dataclass(frozen=True)
class DualStructure:
    """``star[i][j][k] = star_nums[i][j][k] / Delta`` and the intersection form ``g^{ij}``."""

    n: int
    discriminant: MultiPoly
    star_nums: tuple
    dual_metric_inv: tuple[tuple[MultiPoly, ...], ...]
    euler: PolyVectorField

    @property
    def star(self) -> tuple:
        d = self.discriminant
        return tuple(tuple(tuple(RationalFunction(x, d) for x in row) for row in plane) for plane in self.star_nums)

    def context(self) -> DeltaFractions:
        return DeltaFractions(self.discriminant)

    def star_fields(self, ctx: DeltaFractions, x: DeltaField, y: DeltaField) -> DeltaField:
        n = self.n
        out = [MultiPoly.zero(ctx.n) for _ in range(n)]
        for i in range(n):
            if not x.nums[i]:
                continue
            for j in range(n):
                if not y.nums[j]:
                    continue
                xy = x.nums[i] * y.nums[j]
                row = self.star_nums[i][j]
                for k in range(n):
                    if row[k]:
                        out[k] = out[k] + row[k] * xy
        return DeltaField(ctx, tuple(out), x.p + y.p + 1)

    def star_at(self, pt) -> FiberAlgebra:
        d = self.discriminant.evaluate(pt)
        if not d:
            raise NotInvertible(f"point {tuple(map(str, pt))} lies on the discriminant")
        c = tuple(tuple(tuple(x.evaluate(pt) / d for x in row) for row in plane) for plane in self.star_nums)
        return FiberAlgebra(self.n, c, tuple(e.evaluate(pt) for e in self.euler))


def dual_product(spec: FrobeniusSpec, tensor: StructureTensor,
                 identity: PolyVectorField | None = None) -> DualStructure:
    n = spec.n
    E = _identity_field(spec, identity)
    delta, einv = inverse_numerators(tensor, E)
    cm = tensor.c_mixed
    # (d_m . E^{-1})^k numerators
    times_einv = [[sum((cm[m][l][k] * einv[l] for l in range(n) if cm[m][l][k] and einv[l]),
                       MultiPoly.zero(n)) for k in range(n)] for m in range(n)]
    star = [[[None] * n for _ in range(n)] for _ in range(n)]
    for i, j in itertools.product(range(n), repeat=2):
        for k in range(n):
            acc = MultiPoly.zero(n)
            for m in range(n):
                if cm[i][j][m] and times_einv[m][k]:
                    acc = acc + cm[i][j][m] * times_einv[m][k]
            star[i][j][k] = acc
    star = tuple(tuple(tuple(row) for row in plane) for plane in star)
    g_inv = tuple(
        tuple(sum((E[k] * tensor.c_upper[i][j][k] for k in range(n) if E[k] and tensor.c_upper[i][j][k]),
                  MultiPoly.zero(n)) for j in range(n))
        for i in range(n)
    )
    return DualStructure(n, delta, star, g_inv, E)


def _euler_at(E: PolyVectorField, pt) -> tuple[Fraction, ...]:
    return tuple(c.evaluate(pt) for c in E)


def dual_metric_at(spec: FrobeniusSpec, tensor: StructureTensor, pt, x, y,
                   identity: PolyVectorField | None = None) -> Fraction:
    """``eta(E^{-1} . x, y)`` at a point off the discriminant."""
    pt = as_point(pt)
    A = algebra_at(tensor, pt)
    einv = A.invert(_euler_at(_identity_field(spec, identity), pt))
    z = A.multiply(einv, element(x))
    return _eta(spec.metric, z, element(y))


def _eta(eta, x, y) -> Fraction:
    n = len(x)
    return sum((x[i] * eta[i][j] * y[j] for i in range(n) for j in range(n) if x[i] and y[j]), Fraction(0))


def duality_map_at(spec: FrobeniusSpec, tensor: StructureTensor, pt,
                   almost: CotangentAlmostFrobenius | None = None) -> linalg.Matrix:
    """Matrix of ``rho2 o rho1^{-1}`` acting on column vectors: ``D[m][i] = sum_j eta_ij rho2[j][m]``."""
    pt = as_point(pt)
    if almost is None:
        almost = build_cotangent_almost_frobenius(spec, tensor)
    rho2 = almost.rho2_at(pt)
    n = spec.n
    eta = spec.metric
    return tuple(
        tuple(sum((eta[i][j] * rho2[j][m] for j in range(n)), Fraction(0)) for i in range(n))
        for m in range(n)
    )


def check_theorem1(spec: FrobeniusSpec, tensor: StructureTensor, points: Sequence, samples: int = 10,
                   seed: int = 0, almost: CotangentAlmostFrobenius | None = None,
                   dual: DualStructure | None = None,
                   identity: PolyVectorField | None = None) -> CheckReport:
    """``D(x . y) = x * y`` and ``g(x, y) = eta(D x, y)`` at each usable point.

    ``x * y`` comes from the symbolic dual product, ``D`` from the ``rho2``
    contraction, ``x . y`` and ``E^{-1}`` from the pointwise algebra.
    """
    rng = random.Random(seed)
    E = _identity_field(spec, identity)
    if almost is None:
        almost = build_cotangent_almost_frobenius(spec, tensor, E)
    if dual is None:
        dual = dual_product(spec, tensor, E)
    n = spec.n
    parts = []
    used = 0
    for idx, pt in enumerate(points):
        pt = as_point(pt)
        name = f"theorem1@{idx}"
        if not almost.discriminant.evaluate(pt):
            parts.append(skipped(name, f"point {_fmt_point(pt)} lies on the discriminant"))
            continue
        used += 1
        A = algebra_at(tensor, pt)
        D = duality_map_at(spec, tensor, pt, almost)
        S = dual.star_at(pt)
        pairs = [(A.basis[i], A.basis[j]) for i, j in itertools.product(range(n), repeat=2)]
        pairs += [(random_element(rng, n), random_element(rng, n)) for _ in range(samples)]
        failure = None
        for x, y in pairs:
            lhs = linalg.matvec(D, A.multiply(x, y))
            rhs = S.multiply(x, y)
            if lhs != rhs:
                failure = fail(name, clause="product", point=_fmt_point(pt), x=x, y=y, lhs=lhs, rhs=rhs)
                break
            g_direct = dual_metric_at(spec, tensor, pt, x, y, identity=E)
            g_anchor = _eta(spec.metric, linalg.matvec(D, x), y)
            if g_direct != g_anchor:
                failure = fail(name, clause="metric", point=_fmt_point(pt), x=x, y=y,
                               lhs=g_direct, rhs=g_anchor)
                break
        parts.append(failure or ok(name))
    return combine("theorem1", parts, detail=f"{used} usable points, {samples} sampled pairs each")


def _fmt_point(pt) -> str:
    return "(" + ", ".join(str(x) for x in pt) + ")"


# -- symbolic identities of the dual product -----------------------------------

def check_dual_identities(dual: DualStructure, almost: CotangentAlmostFrobenius, tensor: StructureTensor,
                          hm_tuples: Sequence[tuple[PolyVectorField, ...]] = ()) -> CheckReport:
    """Commutativity, associativity, ``E`` as unit, HM identity and ``rho2`` homomorphism for ``*``."""
    n = dual.n
    ctx = dual.context()
    basis = [ctx.polynomial_field(b) for b in PolyVectorField.basis_all(n, n)]
    star = lambda x, y: dual.star_fields(ctx, x, y)
    parts = []

    bad = next(((i, j, k) for i, j, k in itertools.product(range(n), repeat=3)
                if not rf_equal(dual.star[i][j][k], dual.star[j][i][k])), None)
    parts.append(fail("star_commutative", index=bad) if bad else ok("star_commutative"))

    failure = None
    for i, j, k in itertools.product(range(n), repeat=3):
        lhs = star(star(basis[i], basis[j]), basis[k])
        rhs = star(basis[i], star(basis[j], basis[k]))
        if not rf_field_equal(lhs, rhs.components()):
            failure = fail("star_associative", index=(i, j, k), difference=lhs - rhs)
            break
    parts.append(failure or ok("star_associative"))

    E = ctx.polynomial_field(dual.euler)
    failure = None
    for i in range(n):
        prod = star(basis[i], E)
        if not rf_field_equal(prod, basis[i].components()):
            failure = fail("star_unit_is_euler", index=i, difference=prod - basis[i])
            break
    parts.append(failure or ok("star_unit_is_euler"))

    failure = None
    for idx in itertools.product(range(n), repeat=4):
        r = hm_residual(ctx.bracket, star, *(basis[i] for i in idx))
        if not r.is_zero():
            failure = fail("star_hertling_manin", basis_tuple=idx, residual=r)
            break
    if failure is None:
        for k, tup in enumerate(hm_tuples):
            r = hm_residual(ctx.bracket, star, *(ctx.polynomial_field(f) for f in tup))
            if not r.is_zero():
                failure = fail("star_hertling_manin", sample_tuple=k, residual=r)
                break
    parts.append(failure or ok("star_hertling_manin",
                               detail=f"{n ** 4} basis tuples, {len(hm_tuples)} sampled tuples"))

    # rho2(dt^i <> dt^j) = rho2(dt^i) * rho2(dt^j)
    failure = None
    actx = DeltaFractions(almost.discriminant)
    if actx.delta != ctx.delta:
        raise ValueError("dual structure and almost-Frobenius anchor use different discriminants")
    images = [almost.rho2_field(ctx, i) for i in range(n)]
    for i, j in itertools.product(range(n), repeat=2):
        lhs = ctx.field([MultiPoly.zero(n)] * n, 0)
        for k in range(n):
            c = tensor.c_upper[i][j][k]
            if c:
                lhs = lhs + DeltaField(ctx, tuple(c * x for x in images[k].nums), 1)
        rhs = star(images[i], images[j])
        if not rf_field_equal(lhs, rhs.components()):
            failure = fail("rho2_homomorphism", index=(i, j), difference=lhs - rhs)
            break
    parts.append(failure or ok("rho2_homomorphism"))
    return combine("dual_structure", parts)


def check_intersection_form(spec: FrobeniusSpec, tensor: StructureTensor, dual: DualStructure,
                            points: Sequence, identity: PolyVectorField | None = None) -> CheckReport:
    """``[g(d_i, d_j)]`` is the inverse of ``[g^{ij}]`` and ``det D * Delta = 1`` at each usable point."""
    n = spec.n
    E = _identity_field(spec, identity)
    almost = build_cotangent_almost_frobenius(spec, tensor, E)
    parts = []
    for idx, pt in enumerate(points):
        pt = as_point(pt)
        name = f"intersection_form@{idx}"
        delta = dual.discriminant.evaluate(pt)
        if not delta:
            parts.append(skipped(name, f"point {_fmt_point(pt)} lies on the discriminant"))
            continue
        basis = [tuple(Fraction(int(k == i)) for k in range(n)) for i in range(n)]
        g_low = [[dual_metric_at(spec, tensor, pt, basis[i], basis[j], identity=E) for j in range(n)]
                 for i in range(n)]
        g_up = [[x.evaluate(pt) for x in row] for row in dual.dual_metric_inv]
        prod = linalg.matmul(g_low, g_up)
        sym = all(g_low[i][j] == g_low[j][i] for i in range(n) for j in range(n))
        det_d = linalg.det(duality_map_at(spec, tensor, pt, almost))
        if prod != linalg.identity(n) or not sym:
            parts.append(fail(name, point=_fmt_point(pt), product=prod, symmetric=sym))
        elif det_d * delta != 1:
            parts.append(fail(name, point=_fmt_point(pt), det_duality_map=det_d, discriminant=delta))
        else:
            parts.append(ok(name))
    return combine("intersection_form", parts)


# -- chains of dual products ---------------------------------------------------

@dataclass(frozen=True)
class ChainSpec:
    spec: FrobeniusSpec
    tensor: StructureTensor
    identities: tuple[PolyVectorField, ...]


def _values(identities, pt) -> list[tuple[Fraction, ...]]:
    out = []
    for e in identities:
        if isinstance(e, Section):
            out.append(tuple(c.evaluate(pt) for c in e))
        else:
            out.append(element(e))
    return out


def chain_products_at(tensor: StructureTensor, pt, identities: Sequence, depth: int) -> list[FiberAlgebra]:
    """``[*0, ..., *depth]`` with ``x *_{i+1} y = x *_i y *_i E_i^{-1}``, inverses taken in ``*_i``."""
    pt = as_point(pt)
    if depth > len(identities):
        raise ValueError(f"depth {depth} needs {depth} identities, got {len(identities)}")
    values = _values(identities[:depth], pt)
    algebras = [algebra_at(tensor, pt)]
    for stage, e in enumerate(values):
        try:
            algebras.append(algebras[-1].dual(e))
        except NotInvertible as exc:
            raise NotInvertible(f"stage {stage}: E_{stage} is not invertible for *{stage} at {_fmt_point(pt)}",
                                stage=stage, element=e) from exc
    return algebras


def accumulated_twist(A0: FiberAlgebra, values: Sequence[tuple[Fraction, ...]]) -> tuple[Fraction, ...]:
    """Element ``tau_k`` with ``x *_k y = x *0 y *0 tau_k``, built only with ``*0`` products.

    ``tau_{k+1} = tau_k^2 w_k`` where ``w_k`` is the ``*_k``-inverse of ``E_k``; the
    ``*_k``-inverse is obtained in ``*0`` as ``u_k^2 E_k^{-1}`` with ``u_k = tau_k^{-1}``
    the ``*_k`` unit.
    """
    tau = A0.unit
    for stage, e in enumerate(values):
        try:
            unit_k = A0.invert(tau)
            w = A0.multiply(A0.multiply(unit_k, unit_k), A0.invert(e))
        except NotInvertible as exc:
            raise NotInvertible(f"stage {stage}", stage=stage) from exc
        tau = A0.multiply(A0.multiply(tau, tau), w)
    return tau


def pseudo_eventual_identity_at(tensor: StructureTensor, pt, e0, e1) -> tuple[Fraction, ...]:
    """``I = E0^{-1} *0 E0^{-1} *0 E1^{-1}`` with ``E0^{-1}`` taken in ``*0`` and ``E1^{-1}`` in ``*1``.

    With this ``I`` the second iterate satisfies ``x *2 y = x *0 y *0 I``.
    """
    pt = as_point(pt)
    e0, e1 = _values([e0, e1], pt)
    A0 = algebra_at(tensor, pt)
    try:
        e0_inv = A0.invert(e0)
    except NotInvertible as exc:
        raise NotInvertible("stage 0: E0 is not invertible for *0", stage=0, element=e0) from exc
    A1 = A0.twisted(e0_inv)
    try:
        e1_inv = A1.invert(e1)
    except NotInvertible as exc:
        raise NotInvertible("stage 1: E1 is not invertible for *1", stage=1, element=e1) from exc
    return A0.multiply(A0.multiply(e0_inv, e0_inv), e1_inv)


def check_prop1_at(tensor: StructureTensor, pt, e0, e1) -> CheckReport:
    """``D1 o D0`` equals the pseudo-duality map ``x -> x *0 I``."""
    pt = as_point(pt)
    e0, e1 = _values([e0, e1], pt)
    A0, A1, A2 = chain_products_at(tensor, pt, [e0, e1], 2)
    D0 = A0.mult_operator(A0.invert(e0))
    D1 = A1.mult_operator(A1.invert(e1))
    composite = linalg.matmul(D1, D0)
    I = pseudo_eventual_identity_at(tensor, pt, e0, e1)
    P01 = A0.mult_operator(I)
    name = f"prop1@{_fmt_point(pt)}"
    parts = []
    parts.append(ok("composite_is_pseudo_duality") if composite == P01 else
                 fail("composite_is_pseudo_duality", composite=composite, pseudo_duality=P01))
    parts.append(ok("duality_maps_commute") if linalg.matmul(D0, D1) == composite else
                 fail("duality_maps_commute", d0d1=linalg.matmul(D0, D1), d1d0=composite))
    bad = None
    for x, y in itertools.product(A0.basis, repeat=2):
        if linalg.matvec(P01, A0.multiply(x, y)) != A2.multiply(x, y):
            bad = (x, y)
            break
    parts.append(ok("pseudo_duality_intertwines") if bad is None else
                 fail("pseudo_duality_intertwines", x=bad[0], y=bad[1]))
    return combine(name, parts)


def check_prop2_at(tensor: StructureTensor, pt, identities: Sequence, samples: int = 5,
                   seed: int = 0) -> CheckReport:
    """``x *3 y = x *0 y *0 I^2 *0 E2^{-1}`` (``E2^{-1}`` taken in ``*2``), and ``*3`` is an algebra."""
    from .fiber_algebra import check_algebra_axioms

    pt = as_point(pt)
    e0, e1, e2 = _values(identities[:3], pt)
    A0, A1, A2, A3 = chain_products_at(tensor, pt, [e0, e1, e2], 3)
    I = pseudo_eventual_identity_at(tensor, pt, e0, e1)
    w2 = A2.invert(e2)
    twist = A0.multiply(A0.multiply(I, I), w2)
    rng = random.Random(seed)
    n = A0.n
    pairs = list(itertools.product(A0.basis, repeat=2))
    pairs += [(random_element(rng, n), random_element(rng, n)) for _ in range(samples)]
    parts = []
    bad = next(((x, y) for x, y in pairs if A3.multiply(x, y) != A0.multiply(A0.multiply(x, y), twist)), None)
    parts.append(ok("closed_form") if bad is None else
                 fail("closed_form", x=bad[0], y=bad[1], iterated=A3.multiply(*bad),
                      closed=A0.multiply(A0.multiply(*bad), twist)))
    pseudo = A0.twisted(I)
    bad = next(((x, y) for x, y in pairs if A2.multiply(x, y) != pseudo.multiply(x, y)), None)
    parts.append(ok("second_iterate_is_pseudo_dual") if bad is None else
                 fail("second_iterate_is_pseudo_dual", x=bad[0], y=bad[1]))
    parts.append(check_algebra_axioms(A3, "star3_algebra"))
    return combine(f"prop2@{_fmt_point(pt)}", parts)


def check_chain_at(tensor: StructureTensor, pt, identities: Sequence, depth: int) -> CheckReport:
    """Every stage is a commutative associative unital algebra whose unit is the previous identity."""
    from .fiber_algebra import check_algebra_axioms

    pt = as_point(pt)
    algebras = chain_products_at(tensor, pt, identities, depth)
    values = _values(identities[:depth], pt)
    parts = []
    for i, A in enumerate(algebras):
        parts.append(check_algebra_axioms(A, f"star{i}_algebra"))
        if i:
            e = values[i - 1]
            parts.append(ok(f"star{i}_unit") if A.unit == e else
                         fail(f"star{i}_unit", unit=A.unit, expected=e))
    if depth:
        tau = accumulated_twist(algebras[0], values)
        A0, Ad = algebras[0], algebras[-1]
        closed = A0.twisted(tau)
        # x *_{k+1} y also equals x *0 y *0 E_k^{-1} with the *0-inverse
        direct = A0.dual(values[-1])
        bad = next(((x, y) for x, y in itertools.product(A0.basis, repeat=2)
                    if not (Ad.multiply(x, y) == closed.multiply(x, y) == direct.multiply(x, y))), None)
        parts.append(ok("accumulated_twist") if bad is None else
                     fail("accumulated_twist", x=bad[0], y=bad[1]))
    return combine(f"chain@{_fmt_point(pt)}", parts)
