"""Spec files: JSON text in, validated exact objects out.

Layout::

    {
      "n": 2,
      "potential": [{"coeff": "1/2", "exps": [2, 1]}, {"coeff": "1", "exps": [0, 4]}],
      "metric": [["0", "1"], ["1", "0"]],
      "euler": {"a": [["1", "0"], ["0", "2/3"]], "b": ["0", "0"]},
      "charge": "1/3",
      "chain": [{"a": ..., "b": ...}, ...],          (optional)
      "poisson": [[[terms], [terms]], [[terms], [terms]]]   (optional)
    }

Rationals are strings ``p`` or ``p/q``; plain JSON integers are accepted as
well, floats never are.  Every error names the JSON path it came from, and
syntax errors carry line and column.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .algebroid import PoissonBivector
from .fields import PolyVectorField
from .frobenius import FrobeniusSpec, SpecError, affine_field
from .poly import MultiPoly

RATIONAL_RE = re.compile(r"-?\d+(/\d+)?")


class SpecParseError(ValueError):
    """Malformed or invalid spec file.  ``where`` is a JSON path or ``line L col C``."""

    def __init__(self, message: str, where: str | None = None):
        self.message = message
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


@dataclass(frozen=True)
class AffineRecord:
    a: tuple[tuple[Fraction, ...], ...]
    b: tuple[Fraction, ...]

    def field(self) -> PolyVectorField:
        return affine_field(self.a, self.b)


@dataclass(frozen=True)
class SpecFile:
    n: int
    potential: MultiPoly
    metric: tuple[tuple[Fraction, ...], ...]
    euler: AffineRecord
    charge: Fraction
    chain: tuple[AffineRecord, ...] | None = None
    poisson: tuple[tuple[MultiPoly, ...], ...] | None = None

    @property
    def frobenius(self) -> FrobeniusSpec:
        return FrobeniusSpec(self.n, self.potential, self.metric, self.euler.a, self.euler.b, self.charge)

    @property
    def bivector(self) -> PoissonBivector | None:
        return None if self.poisson is None else PoissonBivector(self.poisson)

    def chain_fields(self) -> list[PolyVectorField]:
        return [rec.field() for rec in self.chain or ()]


# -- parsing -------------------------------------------------------------------

def parse_rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool):
        raise SpecParseError("expected a rational string, got a boolean", where)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise SpecParseError("floats are not allowed; write rationals as strings 'p' or 'p/q'", where)
    if not isinstance(value, str):
        raise SpecParseError(f"expected a rational string, got {type(value).__name__}", where)
    if not RATIONAL_RE.fullmatch(value):
        raise SpecParseError(f"malformed rational {value!r}", where)
    num, _, den = value.partition("/")
    if den and int(den) == 0:
        raise SpecParseError("zero denominator", where)
    return Fraction(int(num), int(den) if den else 1)


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecParseError("expected an integer", where)
    return value


def _list(value: Any, where: str, length: int | None = None) -> list:
    if not isinstance(value, list):
        raise SpecParseError("expected an array", where)
    if length is not None and len(value) != length:
        raise SpecParseError(f"expected {length} entries, got {len(value)}", where)
    return value


def _matrix(value: Any, n: int, where: str) -> tuple[tuple[Fraction, ...], ...]:
    rows = _list(value, where, n)
    return tuple(
        tuple(parse_rational(x, f"{where}[{i}][{j}]") for j, x in enumerate(_list(row, f"{where}[{i}]", n)))
        for i, row in enumerate(rows)
    )


def _vector(value: Any, n: int, where: str) -> tuple[Fraction, ...]:
    return tuple(parse_rational(x, f"{where}[{i}]") for i, x in enumerate(_list(value, where, n)))


def _terms(value: Any, n: int, where: str) -> MultiPoly:
    terms = {}
    for k, term in enumerate(_list(value, where)):
        here = f"{where}[{k}]"
        if not isinstance(term, dict) or set(term) != {"coeff", "exps"}:
            raise SpecParseError("a term is an object with exactly the keys 'coeff' and 'exps'", here)
        exps = tuple(_int(e, f"{here}.exps[{i}]") for i, e in enumerate(_list(term["exps"], f"{here}.exps", n)))
        if any(e < 0 for e in exps):
            raise SpecParseError("negative exponent", f"{here}.exps")
        c = parse_rational(term["coeff"], f"{here}.coeff")
        terms[exps] = terms.get(exps, Fraction(0)) + c
    return MultiPoly(n, terms)


def _affine(value: Any, n: int, where: str) -> AffineRecord:
    if not isinstance(value, dict) or set(value) != {"a", "b"}:
        raise SpecParseError("an affine field is an object with exactly the keys 'a' and 'b'", where)
    return AffineRecord(_matrix(value["a"], n, f"{where}.a"), _vector(value["b"], n, f"{where}.b"))


REQUIRED = ("n", "potential", "metric", "euler", "charge")
OPTIONAL = ("chain", "poisson")


def spec_from_data(data: Any) -> SpecFile:
    if not isinstance(data, dict):
        raise SpecParseError("top level must be an object", "$")
    for key in REQUIRED:
        if key not in data:
            raise SpecParseError(f"missing key {key!r}", "$")
    unknown = sorted(set(data) - set(REQUIRED) - set(OPTIONAL))
    if unknown:
        raise SpecParseError(f"unknown key {unknown[0]!r}", "$")
    n = _int(data["n"], "n")
    if n < 1:
        raise SpecParseError("dimension must be positive", "n")
    potential = _terms(data["potential"], n, "potential")
    metric = _matrix(data["metric"], n, "metric")
    for i in range(n):
        for j in range(i + 1, n):
            if metric[i][j] != metric[j][i]:
                raise SpecParseError("metric not symmetric", f"metric[{i}][{j}]")
    euler = _affine(data["euler"], n, "euler")
    charge = parse_rational(data["charge"], "charge")

    chain = None
    if "chain" in data:
        chain = tuple(_affine(rec, n, f"chain[{k}]") for k, rec in enumerate(_list(data["chain"], "chain")))
    poisson = None
    if "poisson" in data:
        rows = _list(data["poisson"], "poisson", n)
        poisson = tuple(
            tuple(_terms(entry, n, f"poisson[{i}][{j}]") for j, entry in enumerate(_list(row, f"poisson[{i}]", n)))
            for i, row in enumerate(rows)
        )
        for i in range(n):
            for j in range(i, n):
                if poisson[i][j] != -poisson[j][i]:
                    raise SpecParseError("bivector not antisymmetric", f"poisson[{i}][{j}]")

    spec = SpecFile(n, potential, metric, euler, charge, chain, poisson)
    try:
        spec.frobenius
    except SpecError as exc:
        raise SpecParseError(str(exc), "$") from exc
    return spec


def parse_spec(text: str) -> SpecFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"syntax error: {exc.msg}", f"line {exc.lineno} col {exc.colno}") from exc
    return spec_from_data(data)


# -- serialization -------------------------------------------------------------

def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def _terms_data(p: MultiPoly) -> list[dict]:
    return [{"coeff": format_rational(c), "exps": list(e)} for e, c in p.items()]


def _affine_data(rec: AffineRecord) -> dict:
    return {"a": [[format_rational(x) for x in row] for row in rec.a],
            "b": [format_rational(x) for x in rec.b]}


def spec_to_data(spec: SpecFile) -> dict:
    data = {
        "n": spec.n,
        "potential": _terms_data(spec.potential),
        "metric": [[format_rational(x) for x in row] for row in spec.metric],
        "euler": _affine_data(spec.euler),
        "charge": format_rational(spec.charge),
    }
    if spec.chain is not None:
        data["chain"] = [_affine_data(rec) for rec in spec.chain]
    if spec.poisson is not None:
        data["poisson"] = [[_terms_data(p) for p in row] for row in spec.poisson]
    return data


def serialize_spec(spec: SpecFile) -> str:
    return json.dumps(spec_to_data(spec), indent=2) + "\n"
