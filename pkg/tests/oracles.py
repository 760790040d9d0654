"""Independent sympy oracles; nothing here calls into the package's algebra."""
from __future__ import annotations

import itertools

import sympy


def sympy_potential(terms: dict, n: int):
    xs = sympy.symbols(f"t1:{n + 1}")
    pot = sum((sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[x ** e for x, e in zip(xs, exps)])
               for exps, c in terms.items()), sympy.Integer(0))
    return pot, xs


def sympy_wdvv_zero(terms: dict, eta) -> bool:
    """Expand every WDVV expression of the potential with sympy."""
    n = len(eta)
    pot, xs = sympy_potential(terms, n)
    inv = sympy.Matrix(eta).inv()
    d3 = {(i, j, k): sympy.diff(pot, xs[i], xs[j], xs[k]) for i, j, k in itertools.product(range(n), repeat=3)}
    for i, j, k, l in itertools.product(range(n), repeat=4):
        expr = sum(d3[i, j, a] * inv[a, b] * d3[b, k, l] - d3[i, k, a] * inv[a, b] * d3[b, j, l]
                   for a in range(n) for b in range(n))
        if sympy.expand(expr) != 0:
            return False
    return True
