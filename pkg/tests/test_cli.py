"""Command line behavior: exit codes, document shape, determinism."""

import json

import pytest

from wintgen import gallery
from wintgen.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def run_json(capsys, *argv):
    code, out = run_cli(capsys, *argv)
    return code, json.loads(out)


def test_gallery_list_document(capsys):
    code, doc = run_json(capsys, "gallery", "list")
    assert code == 0
    assert doc["schema"] == 1
    assert doc["tool"]["name"] == "wintgen"
    assert [e["name"] for e in doc["entries"]] == gallery.names()
    so3 = doc["entries"][0]
    assert so3["ambient"]["kind"] == "sphere"
    assert so3["expected"]["classification"] == "sphere_minimal"
    assert len(so3["domain"]) == 3


def test_byte_identical_given_same_argv(capsys):
    argv = ("invariants", "--example", "so3", "--points", "3", "--seed", "7")
    code1, out1 = run_cli(capsys, *argv)
    code2, out2 = run_cli(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    assert len(out1) > 200


def test_seed_changes_the_sample(capsys):
    _, out1 = run_cli(capsys, "ddvv", "--example", "so3", "--points", "3",
                      "--seed", "1")
    _, out2 = run_cli(capsys, "ddvv", "--example", "so3", "--points", "3",
                      "--seed", "2")
    assert out1 != out2


def test_ddvv_document_shape(capsys):
    code, doc = run_json(capsys, "ddvv", "--example", "so3", "--points", "4")
    assert code == 0
    assert doc["command"] == "ddvv"
    assert doc["source"] == {"example": "so3"}
    assert doc["parameters"]["points"] == 4
    assert len(doc["sample"]) == 4
    assert len(doc["records"]) == 4
    for idx, rec in enumerate(doc["records"]):
        assert rec["index"] == idx
        assert rec["point"] == doc["sample"][idx]
        assert abs(rec["slack"]) < 1e-10
        assert rec["ideal"] is True
    assert doc["aggregate"]["all_ideal"] is True


def test_umbilic_example_refused(capsys):
    code, doc = run_json(capsys, "ddvv", "--example", "umbilic-control",
                         "--points", "5")
    assert code == 3
    assert doc["refusal"]["kind"] == "UmbilicPoint"
    assert "records" not in doc


def test_generic_example_not_ideal(capsys):
    code, doc = run_json(capsys, "invariants", "--example",
                         "generic-control", "--points", "2")
    assert code == 3
    assert doc["refusal"]["kind"] == "NotIdealPoint"


def test_cone_torsion_refusals(capsys):
    for cmd in ("theorem-b", "hopf-check", "invariants"):
        code, doc = run_json(capsys, cmd, "--example", "cone-veronese",
                             "--points", "2")
        assert code == 3
        assert doc["refusal"]["kind"] == "IntegrableDistribution"


def test_cone_residuals_still_run(capsys):
    code, doc = run_json(capsys, "residuals", "--example", "cone-veronese",
                         "--points", "2")
    assert code == 0
    assert doc["aggregate"]["max_overall"] < 1e-7


def test_unknown_example_is_input_error(capsys):
    code, doc = run_json(capsys, "invariants", "--example", "no-such-entry")
    assert code == 2
    assert doc["error"]["kind"] == "KeyError"


def test_missing_file_is_input_error(capsys, tmp_path):
    code, doc = run_json(capsys, "ddvv", "--spec",
                         str(tmp_path / "missing.imm"))
    assert code == 2
    assert doc["error"]["kind"] == "FileNotFoundError"


def test_bad_file_reports_parse_location(capsys, tmp_path):
    path = tmp_path / "bad.imm"
    path.write_text("not a valid immersion description\n")
    code, doc = run_json(capsys, "ddvv", "--spec", str(path))
    assert code == 2
    assert doc["error"]["kind"] == "ParseError"
    assert doc["error"]["line"] == 1


def test_low_order_is_input_error(capsys):
    code, doc = run_json(capsys, "invariants", "--example", "so3",
                         "--points", "2", "--order", "4")
    assert code == 2
    assert doc["error"]["kind"] == "InsufficientOrder"


def test_bad_point_count_is_input_error(capsys):
    code, doc = run_json(capsys, "ddvv", "--example", "so3", "--points", "0")
    assert code == 2
    assert doc["error"]["kind"] == "SchemaError"


def test_assert_expected_passes_on_so3(capsys):
    for cmd in ("ddvv", "invariants", "theorem-b", "hopf-check"):
        code, doc = run_json(capsys, cmd, "--example", "so3", "--points",
                             "3", "--assert-expected")
        assert code == 0, (cmd, doc.get("assert"))
        assert doc["assert"] == {"passed": True, "failures": []}


def test_assert_expected_passes_on_hopf_lift(capsys):
    code, doc = run_json(capsys, "invariants", "--example", "veronese-hopf",
                         "--points", "3", "--assert-expected")
    assert code == 0
    assert doc["assert"]["passed"] is True


def test_assert_expected_passes_for_generic_ddvv(capsys):
    code, doc = run_json(capsys, "ddvv", "--example", "generic-control",
                         "--points", "5", "--assert-expected")
    assert code == 0
    assert doc["aggregate"]["min_slack"] > 0.01


def test_assert_violation_exits_one(capsys):
    # an impossible tolerance turns the residual check into a failure
    code, doc = run_json(capsys, "residuals", "--example", "so3", "--points",
                         "2", "--tol", "1e-30", "--assert-expected")
    assert code == 1
    assert doc["assert"]["passed"] is False
    assert doc["assert"]["failures"]


def test_assert_expected_needs_example(capsys, tmp_path):
    path = tmp_path / "so3.imm"
    path.write_text(gallery.by_name("so3").expression_text)
    code = main(["ddvv", "--spec", str(path), "--assert-expected"])
    capsys.readouterr()
    assert code == 2


def test_spec_file_route(capsys, tmp_path):
    path = tmp_path / "so3.imm"
    path.write_text(gallery.by_name("so3").expression_text)
    code, doc = run_json(capsys, "ddvv", "--spec", str(path), "--points", "3")
    assert code == 0
    assert doc["source"] == {"file": str(path)}
    assert doc["aggregate"]["all_ideal"] is True


def test_json_file_matches_stdout(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, out = run_cli(capsys, "theorem-b", "--example", "so3", "--points",
                        "2", "--json", str(path))
    assert code == 0
    assert path.read_text() == out


def test_csv_columns(capsys, tmp_path):
    path = tmp_path / "rows.csv"
    code, _ = run_cli(capsys, "invariants", "--example", "so3", "--points",
                      "2", "--csv", str(path))
    assert code == 0
    lines = path.read_text().strip().splitlines()
    assert lines[0].split(",") == [
        "index", "u1", "u2", "u3", "rho", "mu", "U", "V", "L", "G", "lam",
        "Fhat", "Ghat", "omega1", "omega2", "omega3", "domega12", "domega13",
        "domega23", "theta12_1", "theta12_2", "theta12_3"]
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[0] == "0"
    assert abs(float(first[8]) - 1 / 6 ** 0.5) < 1e-8  # the L column


def test_v0_gauge_zeroes_second_coefficient(capsys):
    code, doc = run_json(capsys, "invariants", "--example", "hopf-generic",
                         "--points", "2", "--gauge", "v0")
    assert code == 0
    assert doc["parameters"]["gauge"] == "v0"
    for rec in doc["records"]:
        assert abs(rec["V"]) < 1e-12
        assert rec["U"] > 0.1


def test_theorem_b_verdict_fields(capsys):
    code, doc = run_json(capsys, "theorem-b", "--example", "so3", "--points",
                         "3")
    assert code == 0
    agg = doc["aggregate"]
    assert agg["classification"] == "sphere_minimal"
    assert agg["closed"] is True
    assert agg["Fhat_sign"] == "positive"
    assert agg["fhat_min"] == pytest.approx(1 / 12, abs=1e-7)


def test_hopf_document_fields(capsys):
    code, doc = run_json(capsys, "hopf-check", "--example", "veronese-hopf",
                         "--points", "3")
    assert code == 0
    assert doc["aggregate"]["satisfied"] is True
    assert doc["aggregate"]["max_G"] < 1e-7


def test_residual_columns_fixed(capsys, tmp_path):
    path = tmp_path / "res.csv"
    code, _ = run_cli(capsys, "residuals", "--example", "so3", "--points",
                      "2", "--csv", str(path))
    assert code == 0
    header = path.read_text().splitlines()[0].split(",")
    assert header == ["index", "u1", "u2", "u3", "codazzi_A", "ricci_C",
                      "codazzi_B", "gauss", "ricci_normal", "trace", "max"]


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    capsys.readouterr()


def test_source_flag_required(capsys):
    assert main(["ddvv"]) == 2
    capsys.readouterr()
