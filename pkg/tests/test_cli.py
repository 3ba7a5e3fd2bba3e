import json

import pytest

from gcdeform.vdiagram import build_V, h2_total
from gcdeform_tools import fixtures
from gcdeform_tools import main as cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture(autouse=True)
def log_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("GCDEFORM_LOG_DIR", str(tmp_path / "logs"))
    return tmp_path / "logs"


def test_gc_check_standard_model(capsys, fixture_path):
    code, payload = run_json(capsys, "gc", "check", "--input", fixture_path("standard_1_1.json"))
    assert code == 0
    assert payload == {"almost": True, "integrable": True, "type": 1}


def test_gc_nijenhuis_reports_residual(capsys, fixture_path):
    code, payload = run_json(capsys, "gc", "nijenhuis", "--input", fixture_path("nonintegrable.json"))
    assert code == 1
    assert payload["zero"] is False


def test_gc_nijenhuis_vanishes_on_symplectic(capsys, fixture_path):
    code, payload = run_json(capsys, "gc", "nijenhuis", "--input", fixture_path("lagrangian_line.json"))
    assert code == 0
    assert payload["zero"] is True


def test_gc_hamiltonian_closes(capsys, fixture_path):
    code, payload = run_json(capsys, "gc", "hamiltonian", "--input", fixture_path("lagrangian_line.json"))
    assert code == 0
    assert payload["closed"] is True
    assert set(payload) == {"x_f", "x_g", "h", "closed"}


def test_gc_hamiltonian_needs_functions(capsys, fixture_path):
    code, payload = run_json(capsys, "gc", "hamiltonian", "--input", fixture_path("standard_1_1.json"))
    assert code == 2
    assert payload["error"] == "SchemaError"
    assert payload["path"] == "/functions"


def test_brane_check(capsys, fixture_path):
    code, payload = run_json(capsys, "brane", "check", "--input", fixture_path("lagrangian_line.json"))
    assert code == 0
    assert payload == {"compatible": True, "herm": True, "charts": 1}

    code, payload = run_json(capsys, "brane", "check", "--input", fixture_path("incompatible_brane.json"))
    assert code == 1
    assert payload["compatible"] is False
    assert payload["herm"] is True
    assert "witness" in payload


def test_brane_lwl_on_lagrangian(capsys, fixture_path):
    code, payload = run_json(capsys, "brane", "lwl", "--input", fixture_path("lagrangian_line.json"))
    assert code == 0
    assert payload == {"ok": True}


def test_brane_cohomology(capsys, fixture_path):
    code, payload = run_json(capsys, "brane", "cohomology", "--input", fixture_path("lagrangian_line.json"),
                             "--k", "1", "--deg", "3")
    assert code == 0
    assert payload["dim"] == 0
    assert payload["basis"] == []

    code, payload = run_json(capsys, "brane", "cohomology", "--input", fixture_path("complex_brane.json"),
                             "--deg", "2", "--filtration", "naive")
    assert code == 0
    assert payload["k"] == 1
    assert payload["filtration"] == "naive"
    assert payload["dim"] == 6


def test_deform_compat_and_first_order(capsys, fixture_path):
    code, payload = run_json(capsys, "deform", "compat", "--input", fixture_path("lagrangian_deformation.json"))
    assert code == 0
    assert payload == {"ok": True}

    code, payload = run_json(capsys, "deform", "first-order", "--input", fixture_path("lagrangian_deformation.json"),
                             "--deg", "3")
    assert code == 0
    assert payload["coordinates"] == []


def test_deform_act_reports_bundle(capsys, fixture_path):
    code, payload = run_json(capsys, "deform", "act", "--input", fixture_path("lagrangian_deformation.json"))
    assert code in (0, 1)
    assert payload["artin"] == "R[eps]/(eps^2)"
    assert set(payload["u"]) == {"0"}
    assert payload["f"] == {}
    assert isinstance(payload["compatible"], bool)
    assert (code == 0) == payload["compatible"]


def test_deform_descent_reassembles(capsys, fixture_path):
    code, payload = run_json(capsys, "deform", "descent", "--input", fixture_path("lagrangian_deformation.json"))
    assert code == 0
    assert payload == {"ok": True, "charts": 2, "edges": 1, "reassembled": True}


def test_dgla_mc_and_gauge(capsys, fixture_path):
    code, payload = run_json(capsys, "dgla", "mc", "--input", fixture_path("obstructed.json"))
    assert code == 0
    assert payload["ok"] is True

    code, payload = run_json(capsys, "dgla", "gauge", "--input", fixture_path("unobstructed.json"))
    assert code == 0
    assert payload["mc"] is True
    assert payload["equivalent"] is True


def test_dgla_obstruct(capsys, fixture_path):
    code, payload = run_json(capsys, "dgla", "obstruct", "--input", fixture_path("obstructed.json"))
    assert code == 1
    assert payload["lifted"] is False
    assert payload["obstruction"] == {"c": "1/2"}

    code, payload = run_json(capsys, "dgla", "obstruct", "--input", fixture_path("unobstructed.json"))
    assert code == 0
    assert payload["lifted"] is True
    assert payload["links"] == 2


def test_dgla_tot_triangle(capsys, fixture_path):
    code, payload = run_json(capsys, "dgla", "tot", "--input", fixture_path("triangle_cover.json"))
    assert code == 0
    assert payload["dims"][:3] == [3, 3, 1]
    assert payload["cohomology"]["0"] == 1
    assert payload["cohomology"]["1"] == 0


def test_dgla_build_v_two_charts(capsys, fixture_path):
    code, payload = run_json(capsys, "dgla", "build-v", "--input", fixture_path("lagrangian_two_charts.json"),
                             "--deg", "1")
    assert code == 0
    cover = fixtures.two_chart_cover()
    gc, brane = fixtures.lagrangian_line(cover)
    V = build_V(brane, gc, cover, 1)
    assert payload["dims"] == {"T": V.dims["T"], "H": V.dims["H"], "K": V.dims["K"]}
    assert payload["dims"]["H"] <= payload["dims"]["T"]
    assert payload["tot_dims"] == list(V.total.dims)
    assert payload["h2"] == h2_total(V).dim
    assert payload["closure"]["H"] is True


def test_dgla_phi_two_charts(capsys, fixture_path):
    code, payload = run_json(capsys, "dgla", "phi", "--input", fixture_path("lagrangian_two_charts.json"),
                             "--deg", "2")
    assert code == 0
    assert payload["injective"] is True


def test_bad_polynomial_points_at_field(capsys, fixture_path):
    code, payload = run_json(capsys, "gc", "check", "--input", fixture_path("bad_poly.json"))
    assert code == 2
    assert payload["error"] == "SchemaError"
    assert payload["path"] == "/functions/f"
    assert "z" in payload["message"]


def test_missing_file_and_bad_extension(capsys, tmp_path):
    code, payload = run_json(capsys, "gc", "check", "--input", str(tmp_path / "nope.json"))
    assert code == 2
    assert payload["path"] == "/"

    other = tmp_path / "model.txt"
    other.write_text("{}", encoding="utf-8")
    code, payload = run_json(capsys, "gc", "check", "--input", str(other))
    assert code == 2
    assert "extension" in payload["message"]


def test_invalid_json(capsys, tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text("{not json", encoding="utf-8")
    code, payload = run_json(capsys, "gc", "check", "--input", str(bad))
    assert code == 2
    assert payload["error"] == "SchemaError"


def test_unknown_section_rejected(capsys, tmp_path):
    model = tmp_path / "extra.json"
    model.write_text(json.dumps({"gc": {"kind": "standard", "m": 1, "n": 0}, "colour": "blue"}), encoding="utf-8")
    code, payload = run_json(capsys, "gc", "check", "--input", str(model))
    assert code == 2
    assert payload["path"] == "/colour"


def test_argument_validation(capsys, fixture_path):
    code, payload = run_json(capsys, "gc", "frobnicate", "--input", fixture_path("standard_1_1.json"))
    assert code == 2
    assert payload["error"] == "DomainError"

    code, payload = run_json(capsys, "gc", "check")
    assert code == 2
    assert "--input" in payload["message"]

    code, payload = run_json(capsys, "brane", "cohomology", "--input", fixture_path("lagrangian_line.json"),
                             "--deg", "99")
    assert code == 2


def test_output_is_deterministic(capsys, fixture_path):
    argv = ("brane", "cohomology", "--input", fixture_path("complex_brane.json"), "--deg", "2")
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second


def test_table_output(capsys, fixture_path):
    code, out = run(capsys, "gc", "check", "--input", fixture_path("standard_1_1.json"), "--output", "table")
    assert code == 0
    rows = dict(line.split(None, 1) for line in out.strip().splitlines())
    assert rows == {"almost": "true", "integrable": "true", "type": "1"}


def test_audit_log_records_each_run(capsys, fixture_path, log_dir):
    run(capsys, "gc", "check", "--input", fixture_path("standard_1_1.json"))
    run(capsys, "gc", "check", "--input", fixture_path("bad_poly.json"))
    lines = (log_dir / "audit.log").read_text(encoding="utf-8").splitlines()
    records = [json.loads(line) for line in lines]
    assert [r["exit"] for r in records] == [0, 2]
    assert records[0]["command"] == "gc check"
    assert len(records[0]["input_sha256"]) == 64
    assert records[1]["input_sha256"] is None


def test_selftest_quick(capsys):
    code, out = run(capsys, "selftest", "--quick", "--output", "json")
    payload = json.loads(out)
    assert code == 0
    assert payload["passed"] is True
    assert set(payload["checks"].values()) == {"pass"}
