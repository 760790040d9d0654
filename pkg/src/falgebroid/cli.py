"""Command-line front end: ``verify``, ``dualize`` and ``chain``.

Exit codes: 0 when every non-skipped check passes, 1 when some check
fails, 2 for unreadable or invalid input and usage errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import __version__
from .algebroid import (
    check_f_algebroid,
    check_hertling_manin,
    check_lie_algebroid,
    poisson_lie_algebroid,
    tangent_f_algebroid,
)
from .duality import (
    DeltaField,
    DualityError,
    build_cotangent_almost_frobenius,
    build_cotangent_frobenius,
    check_chain_at,
    check_cotangent_frobenius,
    check_dual_identities,
    check_intersection_form,
    check_prop1_at,
    check_prop2_at,
    check_theorem1,
    dual_product,
    duality_map_at,
)
from .fiber_algebra import NotInvertible, algebra_at, check_frobenius_algebra, is_semisimple
from .fields import Section
from .frobenius import (
    check_c_symmetry,
    check_covariant_c_symmetry,
    check_euler_conditions,
    check_metric_normalization,
    check_quasi_homogeneity,
    check_wdvv,
    structure_constants,
)
from .linalg import identity as identity_matrix
from .poly import MultiPoly, RationalFunction
from .report import CheckReport, combine, fail, ok, skipped
from .sampling import FIELD_DEGREE, random_one_form, random_point, random_vector_field
from .specfile import SpecFile, SpecParseError, parse_rational, parse_spec

DEFAULT_SEED = 0
DEFAULT_POINTS = 100
HM_SAMPLES = 20
TEST_SECTIONS = 2
PAIR_SAMPLES = 10
CHAIN_PAIR_SAMPLES = 5

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    """Input that parses but cannot be processed by the requested command."""


@dataclass
class Options:
    seed: int = DEFAULT_SEED
    points: int = DEFAULT_POINTS
    explicit_points: tuple[tuple[Fraction, ...], ...] = ()
    depth: int | None = None
    emit_dual: bool = False
    hm_samples: int = HM_SAMPLES


@dataclass
class RunReport:
    command: str
    input_digest: str
    seed: int
    points: int
    field_degree: int
    checks: list[CheckReport]
    version: str = __version__
    extras: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed or c.skipped for c in self.checks)

    @property
    def exit_code(self) -> int:
        return EXIT_PASS if self.passed else EXIT_FAIL


def digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def sample_points(spec: SpecFile, opts: Options) -> list[tuple[Fraction, ...]]:
    if opts.explicit_points:
        return list(opts.explicit_points)
    rng = random.Random(opts.seed)
    return [random_point(rng, spec.n) for _ in range(opts.points)]


# -- commands ------------------------------------------------------------------

def run_verify(spec: SpecFile, opts: Options, input_digest: str = "") -> RunReport:
    """Frobenius axioms, HM identity, tangent F-algebroid and semisimplicity at sampled points."""
    fs = spec.frobenius
    n = fs.n
    tensor = structure_constants(fs)
    rng = random.Random(opts.seed)
    points = sample_points(spec, opts)

    checks = [
        check_metric_normalization(fs),
        check_c_symmetry(tensor),
        check_covariant_c_symmetry(tensor),
        check_wdvv(fs),
        check_quasi_homogeneity(fs).as_check(),
        check_euler_conditions(fs, tensor),
    ]
    tuples = [tuple(random_vector_field(rng, n) for _ in range(4)) for _ in range(opts.hm_samples)]
    checks.append(check_hertling_manin(tensor.c_mixed, tuples))
    sections = [random_vector_field(rng, n) for _ in range(TEST_SECTIONS)]
    checks.append(check_f_algebroid(tangent_f_algebroid(fs, tensor), tensor.c_mixed, sections))

    algebras = [(pt, algebra_at(tensor, pt)) for pt in points]
    fibers = []
    for k, (pt, A) in enumerate(algebras):
        r = check_frobenius_algebra(A, fs.metric)
        fibers.append(r if r.passed else fail(f"fiber@{k}", point=pt, **(r.witness or {})))
    checks.append(combine("fiber_frobenius_algebras", fibers, detail=f"{len(points)} points"))

    flags = [is_semisimple(A, seed=opts.seed) for _, A in algebras]
    good = sum(flags)
    detail = f"semisimple at {good} of {len(flags)} sampled points"
    if good:
        checks.append(ok("semisimplicity", detail=detail))
    elif not flags:
        checks.append(skipped("semisimplicity", "no sample points"))
    else:
        checks.append(fail("semisimplicity", detail=detail, point=points[0]))

    pi = spec.bivector
    if pi is not None:
        bracket, anchor = poisson_lie_algebroid(pi)
        forms = [random_one_form(rng, n) for _ in range(TEST_SECTIONS)]
        lie = check_lie_algebroid(n, bracket, anchor, forms)
        checks.append(combine("poisson_lie_algebroid", lie.parts))
    return RunReport("verify", input_digest, opts.seed, len(points), FIELD_DEGREE, checks)


def run_dualize(spec: SpecFile, opts: Options, input_digest: str = "") -> RunReport:
    """Both cotangent algebroids, the duality map, the dual product and the intersection form."""
    fs = spec.frobenius
    n = fs.n
    tensor = structure_constants(fs)
    try:
        almost = build_cotangent_almost_frobenius(fs, tensor)
        if almost.discriminant.is_zero():
            raise DualityError("discriminant is identically zero")
        dual = dual_product(fs, tensor)
    except DualityError as exc:
        raise InputError(f"{exc}; E is nowhere invertible") from exc
    points = sample_points(spec, opts)
    rng = random.Random(opts.seed)

    checks = [check_cotangent_frobenius(build_cotangent_frobenius(fs, tensor), fs, tensor)]
    checks.append(check_theorem1(fs, tensor, points, samples=PAIR_SAMPLES, seed=opts.seed,
                                 almost=almost, dual=dual))
    tuples = [tuple(random_vector_field(rng, n) for _ in range(4)) for _ in range(opts.hm_samples)]
    checks.append(check_dual_identities(dual, almost, tensor, tuples))
    checks.append(check_intersection_form(fs, tensor, dual, points))

    if fs.euler_field == fs.unit_field:
        I = identity_matrix(n)
        parts = []
        for k, pt in enumerate(points):
            name = f"duality_map_identity@{k}"
            if not almost.discriminant.evaluate(pt):
                parts.append(skipped(name, "point lies on the discriminant"))
                continue
            D = duality_map_at(fs, tensor, pt, almost)
            parts.append(ok(name) if D == I else fail(name, point=pt, duality_map=D))
        checks.append(combine("duality_map_identity", parts, detail="E = e, so D = identity"))

    report = RunReport("dualize", input_digest, opts.seed, len(points), FIELD_DEGREE, checks)
    if opts.emit_dual:
        report.extras["dual_product"] = {
            "discriminant": str(dual.discriminant),
            "structure_constants": [
                {"i": i, "j": j, "k": k, "num": str(dual.star_nums[i][j][k]), "den": str(dual.discriminant)}
                for i in range(n) for j in range(n) for k in range(n)
            ],
        }
    return report


def run_chain(spec: SpecFile, opts: Options, input_digest: str = "") -> RunReport:
    """Pseudo-duality chain checks at sampled points."""
    fs = spec.frobenius
    identities = spec.chain_fields()
    if not identities:
        raise InputError("spec has no 'chain' identities")
    depth = len(identities) if opts.depth is None else opts.depth
    if depth < 0:
        raise InputError("depth must be non-negative")
    if depth > len(identities):
        raise InputError(f"depth {depth} exceeds the {len(identities)} supplied chain identities")
    tensor = structure_constants(fs)
    points = sample_points(spec, opts)

    stage_parts, prop1_parts, prop2_parts = [], [], []
    for k, pt in enumerate(points):
        try:
            stage_parts.append(check_chain_at(tensor, pt, identities, depth))
        except NotInvertible as exc:
            stage_parts.append(skipped(f"chain@{k}", f"stage {exc.stage} not invertible at {_point_str(pt)}"))
            continue
        if len(identities) >= 2:
            prop1_parts.append(_guarded(f"prop1@{k}", lambda: check_prop1_at(tensor, pt, identities[0], identities[1])))
        if len(identities) >= 3:
            prop2_parts.append(_guarded(f"prop2@{k}", lambda: check_prop2_at(
                tensor, pt, identities[:3], samples=CHAIN_PAIR_SAMPLES, seed=opts.seed + k)))

    checks = [combine("chain_stages", stage_parts, detail=f"depth {depth}")]
    checks.append(combine("prop1", prop1_parts) if len(identities) >= 2
                  else skipped("prop1", "needs two chain identities"))
    checks.append(combine("prop2", prop2_parts) if len(identities) >= 3
                  else skipped("prop2", "needs three chain identities"))
    return RunReport("chain", input_digest, opts.seed, len(points), FIELD_DEGREE, checks)


def _guarded(name: str, thunk) -> CheckReport:
    try:
        return thunk()
    except NotInvertible as exc:
        return skipped(name, f"stage {exc.stage} not invertible")


def _point_str(pt) -> str:
    return "(" + ", ".join(str(x) for x in pt) + ")"


COMMANDS = {"verify": run_verify, "dualize": run_dualize, "chain": run_chain}


# -- report emission -----------------------------------------------------------

def to_jsonable(value: Any) -> Any:
    """Exact, deterministic JSON rendering of witness values."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, MultiPoly):
        return str(value)
    if isinstance(value, RationalFunction):
        return {"num": str(value.num), "den": str(value.den)}
    if isinstance(value, DeltaField):
        return {"numerators": [str(p) for p in value.nums],
                "denominator": f"({value.ctx.delta})^{value.p}"}
    if isinstance(value, Section):
        return [str(c) for c in value]
    if isinstance(value, CheckReport):
        return value.name
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return str(value)


def flatten(check: CheckReport, prefix: str = "") -> list[tuple[str, CheckReport]]:
    name = prefix + check.name
    out = [(name, check)]
    for p in check.parts:
        out.extend(flatten(p, name + "/"))
    return out


def machine_report(report: RunReport) -> dict:
    entries = []
    for check in report.checks:
        for name, c in flatten(check):
            entry = {"name": name, "pass": bool(c.passed), "skipped": c.skipped}
            if c.witness is not None:
                entry["witness"] = to_jsonable(c.witness)
            entries.append(entry)
    data = {
        "version": report.version,
        "input_digest": report.input_digest,
        "seed": report.seed,
        "checks": entries,
        "pass": report.passed,
    }
    data.update(report.extras)
    return data


def _text_lines(check: CheckReport, depth: int, out: list[str]) -> None:
    pad = "  " * depth
    status = "SKIP" if check.skipped else ("PASS" if check.passed else "FAIL")
    line = f"{pad}{status}  {check.name}"
    if check.detail:
        line += f"  ({check.detail})"
    out.append(line)
    if check.witness is not None:
        out.append(f"{pad}      witness: {json.dumps(to_jsonable(check.witness), sort_keys=True)}")
    # passing composites list only their skipped parts to keep output short
    for p in check.parts:
        if not check.passed or p.skipped or not p.passed:
            _text_lines(p, depth + 1, out)


def emit_report(report: RunReport, fmt: str = "text") -> bytes:
    if fmt == "machine":
        return (json.dumps(machine_report(report), sort_keys=True, indent=2) + "\n").encode("ascii")
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [
        f"falgebroid {report.version}  {report.command}",
        f"input {report.input_digest}",
        f"seed {report.seed}  points {report.points}  field degree <= {report.field_degree}",
        "",
    ]
    for check in report.checks:
        _text_lines(check, 0, lines)
    for key, value in report.extras.items():
        lines += ["", f"{key}:", json.dumps(to_jsonable(value), sort_keys=True, indent=2)]
    lines += ["", f"overall: {'PASS' if report.passed else 'FAIL'}"]
    return ("\n".join(lines) + "\n").encode("utf-8")


# -- entry point ---------------------------------------------------------------

def _point_arg(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(parse_rational(x.strip(), "--point") for x in text.split(","))
    except SpecParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="falgebroid",
                                     description="Exact verification of Frobenius, F- and Lie algebroid data.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("file", help="spec file (JSON)")
        p.add_argument("--points", type=int, default=DEFAULT_POINTS, help="number of sampled points")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for all randomized checks")
        p.add_argument("--format", choices=("text", "machine"), default="text")
        p.add_argument("--point", type=_point_arg, action="append", default=[], dest="explicit_points",
                       metavar="P1,P2,...", help="check this point instead of sampling (repeatable)")
        if name == "dualize":
            p.add_argument("--emit-dual", action="store_true", help="include the dual structure constants")
        if name == "chain":
            p.add_argument("--depth", type=int, default=None, help="number of chain stages")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    if args.points < 0:
        print("error: --points must be non-negative", file=sys.stderr)
        return EXIT_INPUT
    opts = Options(seed=args.seed, points=args.points, explicit_points=tuple(args.explicit_points),
                   depth=getattr(args, "depth", None), emit_dual=getattr(args, "emit_dual", False))
    try:
        with open(args.file, "rb") as fh:
            raw = fh.read()
        spec = parse_spec(raw.decode("utf-8"))
        for pt in opts.explicit_points:
            if len(pt) != spec.n:
                raise InputError(f"--point has {len(pt)} coordinates, spec has n = {spec.n}")
        report = COMMANDS[args.command](spec, opts, digest(raw))
    except (OSError, UnicodeDecodeError, SpecParseError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.buffer.write(emit_report(report, args.format))
    sys.stdout.flush()
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
