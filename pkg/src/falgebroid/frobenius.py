"""Frobenius-manifold data in flat coordinates and its axiom checks.

A :class:`FrobeniusSpec` bundles the potential, the constant metric, the
affine Euler field and the charge.  :func:`structure_constants` turns it
into the three index variants of the cubic tensor, and the ``check_*``
functions verify the flat-coordinate axioms as exact polynomial identities.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import linalg
from .fields import PolyVectorField, lie_bracket, multiply
from .poly import MultiPoly
from .report import CheckReport, combine, fail, ok


class SpecError(ValueError):
    """A FrobeniusSpec violates one of its structural invariants."""


Tensor3 = tuple[tuple[tuple[MultiPoly, ...], ...], ...]


@dataclass(frozen=True)
class FrobeniusSpec:
    n: int
    potential: MultiPoly
    metric: linalg.Matrix
    euler_a: linalg.Matrix
    euler_b: tuple[Fraction, ...]
    charge: Fraction

    def __post_init__(self):
        n = self.n
        object.__setattr__(self, "metric", linalg.as_matrix(self.metric))
        object.__setattr__(self, "euler_a", linalg.as_matrix(self.euler_a))
        object.__setattr__(self, "euler_b", tuple(Fraction(b) for b in self.euler_b))
        object.__setattr__(self, "charge", Fraction(self.charge))
        if n < 1:
            raise SpecError("dimension must be positive")
        if self.potential.n != n:
            raise SpecError(f"potential has {self.potential.n} variables, expected {n}")
        for name, m in (("metric", self.metric), ("euler.a", self.euler_a)):
            if len(m) != n or any(len(row) != n for row in m):
                raise SpecError(f"{name} must be {n}x{n}")
        if len(self.euler_b) != n:
            raise SpecError(f"euler.b must have length {n}")
        for i, j in itertools.combinations(range(n), 2):
            if self.metric[i][j] != self.metric[j][i]:
                raise SpecError(f"metric not symmetric at ({i}, {j})")
        if not linalg.det(self.metric):
            raise SpecError("metric is singular")
        # The Euler normal form (a^i_1 = delta^i_1, b^1 = 0) is reported by
        # check_euler_conditions rather than enforced, so that E = e can be
        # fed to the duality code as a degenerate case.

    @cached_property
    def metric_inverse(self) -> linalg.Matrix:
        return linalg.inverse(self.metric)

    @cached_property
    def euler_field(self) -> PolyVectorField:
        return affine_field(self.euler_a, self.euler_b)

    @property
    def unit_field(self) -> PolyVectorField:
        return PolyVectorField.basis(self.n, self.n, 0)


def affine_field(a: Sequence[Sequence], b: Sequence) -> PolyVectorField:
    """``sum_i (sum_j a[i][j] t^j + b[i]) d/dt^i``."""
    n = len(b)
    t = [MultiPoly.var(n, j) for j in range(n)]
    comps = []
    for i in range(n):
        comp = MultiPoly.const(n, b[i])
        for j in range(n):
            if a[i][j]:
                comp = comp + t[j].scale(a[i][j])
        comps.append(comp)
    return PolyVectorField(comps)


@dataclass(frozen=True)
class StructureTensor:
    """``c_lower[i][j][k] = C_ijk``, ``c_mixed[i][j][k] = C^k_ij``, ``c_upper[i][j][k] = C^{ij}_k``."""

    n: int
    c_lower: Tensor3
    c_mixed: Tensor3
    c_upper: Tensor3

    def evaluate_mixed(self, pt) -> tuple:
        return tuple(tuple(tuple(c.evaluate(pt) for c in row) for row in plane) for plane in self.c_mixed)


def _contract(m: linalg.Matrix, polys: Sequence[MultiPoly]) -> list[MultiPoly]:
    n = len(polys)
    out = []
    for k in range(n):
        acc = MultiPoly.zero(polys[0].n)
        for l in range(n):
            if m[k][l] and polys[l]:
                acc = acc + polys[l].scale(m[k][l])
        out.append(acc)
    return out


def third_derivatives(potential: MultiPoly) -> Tensor3:
    n = potential.n
    first = [potential.diff(i) for i in range(n)]
    second = [[first[i].diff(j) for j in range(n)] for i in range(n)]
    cache: dict[tuple[int, int, int], MultiPoly] = {}
    for idx in itertools.product(range(n), repeat=3):
        key = tuple(sorted(idx))
        if key not in cache:
            i, j, k = key
            cache[key] = second[i][j].diff(k)
    return tuple(
        tuple(tuple(cache[tuple(sorted((i, j, k)))] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def raw_third_derivatives(potential: MultiPoly) -> Tensor3:
    """Third partials taken in the literal index order (no symmetry shortcut)."""
    n = potential.n
    return tuple(
        tuple(tuple(potential.diff(i).diff(j).diff(k) for k in range(n)) for j in range(n))
        for i in range(n)
    )


def structure_constants(spec: FrobeniusSpec) -> StructureTensor:
    n = spec.n
    eta_inv = spec.metric_inverse
    lower = third_derivatives(spec.potential)
    # C^k_ij = eta^{kl} C_lij
    mixed = tuple(
        tuple(tuple(_contract(eta_inv, [lower[l][i][j] for l in range(n)])) for j in range(n))
        for i in range(n)
    )
    # C^{ij}_k = eta^{il} C^j_lk   (= eta^{il} eta^{jm} C_lmk)
    upper = [[[None] * n for _ in range(n)] for _ in range(n)]
    for j, k in itertools.product(range(n), repeat=2):
        raised = _contract(eta_inv, [mixed[l][k][j] for l in range(n)])
        for i in range(n):
            upper[i][j][k] = raised[i]
    upper = tuple(tuple(tuple(row) for row in plane) for plane in upper)
    return StructureTensor(n, lower, mixed, upper)


def _basis(n: int) -> list[PolyVectorField]:
    return PolyVectorField.basis_all(n, n)


def check_c_symmetry(tensor: StructureTensor) -> CheckReport:
    n = tensor.n
    c = tensor.c_lower
    for i, j, k in itertools.product(range(n), repeat=3):
        for p in set(itertools.permutations((i, j, k))):
            if c[p[0]][p[1]][p[2]] != c[i][j][k]:
                return fail("c_symmetry", index=(i, j, k), permutation=p,
                            difference=c[p[0]][p[1]][p[2]] - c[i][j][k])
    return ok("c_symmetry")


def check_covariant_c_symmetry(tensor: StructureTensor) -> CheckReport:
    """``d_l C_ijk`` symmetric in all four indices (flat-coordinate form of nabla C)."""
    n = tensor.n
    c = tensor.c_lower
    for idx in itertools.product(range(n), repeat=4):
        i, j, k, l = idx
        ref = c[i][j][k].diff(l)
        for p in itertools.permutations(idx):
            other = c[p[0]][p[1]][p[2]].diff(p[3])
            if other != ref:
                return fail("covariant_c_symmetry", index=idx, permutation=p, difference=other - ref)
    return ok("covariant_c_symmetry")


def check_metric_normalization(spec: FrobeniusSpec) -> CheckReport:
    n = spec.n
    d1 = spec.potential.diff(0)
    for i in range(n):
        d1i = d1.diff(i)
        for j in range(n):
            diff = d1i.diff(j) - spec.metric[i][j]
            if diff:
                return fail("metric_normalization", index=(i, j), difference=diff)
    return ok("metric_normalization")


def wdvv_residual(f3: Tensor3, eta_inv: linalg.Matrix, i: int, j: int, k: int, l: int) -> MultiPoly:
    """``F_ijm eta^{mn} F_nkl - F_ljm eta^{mn} F_nki``."""
    n = len(f3)
    acc = MultiPoly.zero(f3[0][0][0].n)
    for m, p in itertools.product(range(n), repeat=2):
        e = eta_inv[m][p]
        if not e:
            continue
        lhs = f3[i][j][m] * f3[p][k][l]
        rhs = f3[l][j][m] * f3[p][k][i]
        acc = acc + (lhs - rhs).scale(e)
    return acc


def check_wdvv(spec: FrobeniusSpec) -> CheckReport:
    n = spec.n
    f3 = third_derivatives(spec.potential)
    eta_inv = spec.metric_inverse
    for idx in itertools.product(range(n), repeat=4):
        r = wdvv_residual(f3, eta_inv, *idx)
        if r:
            return fail("wdvv", index=idx, difference=r)
    return ok("wdvv")


@dataclass(frozen=True)
class QuasiHomogeneityReport:
    residual: MultiPoly
    A: linalg.Matrix
    B: tuple[Fraction, ...]
    c0: Fraction
    passed: bool

    def as_check(self) -> CheckReport:
        if self.passed:
            return ok("quasi_homogeneity",
                      detail=f"E F - (3-d) F = {self.residual}")
        top = max(self.residual.degree(), 0)
        high = MultiPoly(self.residual.n, {e: c for e, c in self.residual.terms.items() if sum(e) == top})
        return fail("quasi_homogeneity", degree=top, leading_terms=high)


def check_quasi_homogeneity(spec: FrobeniusSpec) -> QuasiHomogeneityReport:
    n = spec.n
    f = spec.potential
    residual = spec.euler_field.apply(f) - f.scale(3 - spec.charge)
    passed = residual.degree() <= 2
    A = [[Fraction(0)] * n for _ in range(n)]
    B = [Fraction(0)] * n
    c0 = Fraction(0)
    if passed:
        # residual = 1/2 A_ij t^i t^j + B_i t^i + c
        for exps, coeff in residual.terms.items():
            deg = sum(exps)
            if deg == 0:
                c0 = coeff
            elif deg == 1:
                B[exps.index(1)] = coeff
            else:
                support = [i for i, e in enumerate(exps) for _ in range(e)]
                i, j = support
                if i == j:
                    A[i][i] = 2 * coeff
                else:
                    A[i][j] = A[j][i] = coeff
    return QuasiHomogeneityReport(residual, tuple(map(tuple, A)), tuple(B), c0, passed)


def check_euler_conditions(spec: FrobeniusSpec, tensor: StructureTensor) -> CheckReport:
    n = spec.n
    parts = []

    a, b = spec.euler_a, spec.euler_b
    bad = [i for i in range(n) if a[i][0] != int(i == 0)]
    if bad or b[0]:
        parts.append(fail("euler_normal_form", rows=tuple(bad), b1=b[0]))
    else:
        parts.append(ok("euler_normal_form"))

    E = spec.euler_field
    basis = _basis(n)
    prod = tensor.c_mixed
    lie_e = [lie_bracket(E, d) for d in basis]
    failure = None
    for i, j in itertools.product(range(n), repeat=2):
        p_ij = multiply(prod, basis[i], basis[j])
        lhs = lie_bracket(E, p_ij) - multiply(prod, lie_e[i], basis[j]) - multiply(prod, basis[i], lie_e[j])
        if lhs != p_ij:
            failure = fail("euler_product_homogeneity", index=(i, j), difference=lhs - p_ij)
            break
    parts.append(failure or ok("euler_product_homogeneity"))

    eta = spec.metric
    target = 2 - spec.charge
    failure = None
    for i, j in itertools.product(range(n), repeat=2):
        lhs = sum((a[k][i] * eta[k][j] + a[k][j] * eta[i][k] for k in range(n)), Fraction(0))
        if lhs != target * eta[i][j]:
            failure = fail("euler_metric_conformal", index=(i, j), lhs=lhs, rhs=target * eta[i][j])
            break
    parts.append(failure or ok("euler_metric_conformal"))
    parts.append(ok("euler_linear", detail="affine components in flat coordinates"))
    return combine("euler_conditions", parts)


def trivial_flat_checks() -> list[CheckReport]:
    """Constant metric in declared flat coordinates: flat, and e = d/dt^1 is parallel."""
    return [
        ok("metric_flat", detail="constant metric in flat coordinates"),
        ok("unit_parallel", detail="e = d/dt^1 has constant components"),
    ]


def c_cubic(tensor: StructureTensor, spec: FrobeniusSpec,
            x: PolyVectorField, y: PolyVectorField, z: PolyVectorField) -> MultiPoly:
    """``C(X, Y, Z) = sum C_ijk X^i Y^j Z^k``."""
    n = tensor.n
    if not (x.rank == y.rank == z.rank == n == spec.n):
        raise ValueError("dimension mismatch")
    total = MultiPoly.zero(n)
    for i in range(n):
        if not x[i]:
            continue
        for j in range(n):
            if not y[j]:
                continue
            xy = x[i] * y[j]
            for k in range(n):
                c = tensor.c_lower[i][j][k]
                if c and z[k]:
                    total = total + c * xy * z[k]
    return total
