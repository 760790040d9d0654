from __future__ import annotations

import json
from fractions import Fraction as F

import pytest

from conftest import SPEC_DIR
from falgebroid.cli import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, Options, emit_report, main, run_chain, run_dualize
from falgebroid.specfile import SpecParseError, parse_spec, serialize_spec


def load(name: str) -> str:
    return (SPEC_DIR / f"{name}.json").read_text()


@pytest.mark.parametrize("name", ["n1_cubic", "n2_quartic", "a3", "n2_chain", "a3_so3_poisson"])
def test_round_trip(name):
    spec = parse_spec(load(name))
    assert parse_spec(serialize_spec(spec)) == spec


def test_n2_file_parses_to_expected_spec(n2):
    spec = parse_spec(load("n2_quartic"))
    assert spec.frobenius.potential == n2[0].potential
    assert spec.charge == F(1, 3)


def edited(mutate) -> str:
    data = json.loads(load("n2_quartic"))
    mutate(data)
    return json.dumps(data)


def test_zero_denominator():
    text = edited(lambda d: d["potential"][0].update(coeff="1/0"))
    with pytest.raises(SpecParseError, match="zero denominator") as exc:
        parse_spec(text)
    assert exc.value.where == "potential[0].coeff"


def test_metric_not_symmetric():
    text = edited(lambda d: d.update(metric=[["0", "1"], ["2", "1"]]))
    with pytest.raises(SpecParseError, match="metric not symmetric") as exc:
        parse_spec(text)
    assert exc.value.where == "metric[0][1]"


def test_syntax_error_has_position():
    with pytest.raises(SpecParseError, match="syntax error") as exc:
        parse_spec('{"n": 2,\n  "metric": [1, }')
    assert exc.value.where.startswith("line 2 col")


@pytest.mark.parametrize("bad", ["1.5", "1/-2", "x", "+3"])
def test_malformed_rationals(bad):
    with pytest.raises(SpecParseError):
        parse_spec(edited(lambda d: d.update(charge=bad)))


def test_float_rejected():
    with pytest.raises(SpecParseError, match="floats"):
        parse_spec(edited(lambda d: d.update(charge=0.5)))


def test_unknown_key_rejected():
    with pytest.raises(SpecParseError, match="unknown key"):
        parse_spec(edited(lambda d: d.update(extra=1)))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "verify", str(SPEC_DIR / "n1_cubic.json"), "--points", "5")[0] == EXIT_PASS
    assert run(capsys, "verify", str(SPEC_DIR / "n2_unit_euler.json"), "--points", "5")[0] == EXIT_FAIL
    assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == EXIT_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text(edited(lambda d: d.update(charge="1/0")))
    code, _, err = run(capsys, "verify", str(bad))
    assert code == EXIT_INPUT and "zero denominator" in err
    assert run(capsys, "frobnicate", "x")[0] == EXIT_INPUT
    assert run(capsys, "chain", str(SPEC_DIR / "n2_chain.json"), "--depth", "4")[0] == EXIT_INPUT
    assert run(capsys, "chain", str(SPEC_DIR / "n2_quartic.json"))[0] == EXIT_INPUT
    assert run(capsys, "dualize", str(SPEC_DIR / "n2_quartic.json"), "--point", "1,2,3")[0] == EXIT_INPUT


def test_failing_report_serializes_witness(capsys, tmp_path):
    data = json.loads(load("a3"))
    data["potential"][-1]["coeff"] = "961/960"
    path = tmp_path / "perturbed.json"
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", str(path), "--points", "3", "--format", "machine")
    assert code == EXIT_FAIL
    report = json.loads(out)
    assert report["pass"] is False
    wdvv = next(c for c in report["checks"] if c["name"] == "wdvv")
    assert wdvv["pass"] is False and wdvv["witness"]["difference"] not in ("0", "")
    assert set(report) == {"version", "input_digest", "seed", "checks", "pass"}


def test_explicit_discriminant_point_is_skipped(capsys):
    code, out, _ = run(capsys, "dualize", str(SPEC_DIR / "n2_quartic.json"), "--point", "48,6",
                       "--point", "1/2,3", "--format", "machine")
    assert code == EXIT_PASS
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    assert checks["theorem1/theorem1@0"]["skipped"] is True
    assert checks["theorem1/theorem1@1"]["skipped"] is False


def test_text_report_mentions_skip_reason(capsys):
    _, out, _ = run(capsys, "dualize", str(SPEC_DIR / "n2_quartic.json"), "--point", "48,6")
    assert "SKIP  theorem1@0  (point (48, 6) lies on the discriminant)" in out
    assert out.rstrip().endswith("overall: PASS")


def test_unit_euler_records_identity_duality_map():
    spec = parse_spec(load("n2_unit_euler"))
    report = run_dualize(spec, Options(points=10))
    assert report.passed
    check = next(c for c in report.checks if c.name == "duality_map_identity")
    assert check.passed and len(check.parts) == 10


def test_emit_dual(capsys):
    code, out, _ = run(capsys, "dualize", str(SPEC_DIR / "n2_quartic.json"), "--points", "3",
                       "--emit-dual", "--format", "machine")
    assert code == EXIT_PASS
    dual = json.loads(out)["dual_product"]
    assert dual["discriminant"] == "-32/3*t2^3 + t1^2"
    assert len(dual["structure_constants"]) == 8


def test_chain_command():
    spec = parse_spec(load("n2_chain_unit"))
    report = run_chain(spec, Options(points=5, depth=3))
    assert report.passed
    spec = parse_spec(load("n2_chain"))
    report = run_chain(spec, Options(points=20))
    assert report.passed
    assert [c.name for c in report.checks] == ["chain_stages", "prop1", "prop2"]


def test_machine_report_is_byte_stable(capsys):
    args = ("verify", str(SPEC_DIR / "n2_quartic.json"), "--points", "10", "--seed", "5", "--format", "machine")
    first = run(capsys, *args)[1]
    second = run(capsys, *args)[1]
    assert first == second
    assert json.loads(first)["seed"] == 5


def test_emit_report_rejects_unknown_format():
    spec = parse_spec(load("n1_cubic"))
    report = run_dualize(spec, Options(points=2))
    with pytest.raises(ValueError):
        emit_report(report, "yaml")
