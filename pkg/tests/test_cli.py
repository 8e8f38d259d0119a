import json

import pytest

from conftest import MANIFESTS
from thermodtn.cli import EXIT_IO, EXIT_OK, EXIT_TOLERANCE, EXIT_VALIDATION, run
from thermodtn.serialize import read_csv, read_json


def write_manifest(tmp_path, obj, name="m.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def flat(**material):
    base = {"lam": {"preset": "constant", "value": 0}, "mu": {"preset": "constant", "value": 1},
            "alpha": {"preset": "constant", "value": 1}, "beta": {"preset": "constant", "value": 1}}
    base.update(material)
    return {"dimension": 2, "depth": 2, "material": base, "covectors": [[1]]}


def test_symbols_and_residual(tmp_path, capsys):
    out = tmp_path / "t.json"
    assert run(["symbols", "--manifest", str(MANIFESTS / "flat_lame.json"), "--out", str(out)]) == EXIT_OK
    tab = read_json(out)
    assert tab["p"]["1"][0][0][1] == [0.0, pytest.approx(-2 / 3)]
    assert "tolerances" in capsys.readouterr().out
    res = tmp_path / "r.csv"
    assert run(["residual", "--manifest", str(MANIFESTS / "warped_n3.json"), "--out", str(res)]) == EXIT_OK
    rows = read_csv(res)
    assert rows and max(float(r["norm"]) for r in rows) < 1e-9
    assert res.read_text().startswith("# ")


def test_rational_residual_is_zero(tmp_path):
    res = tmp_path / "r.csv"
    assert run(["residual", "--manifest", str(MANIFESTS / "flat_rational.json"), "--out", str(res)]) == EXIT_OK
    assert all(float(r["norm"]) == 0.0 for r in read_csv(res))


def test_sylvester_check(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert run(["sylvester-check", "--manifest", str(MANIFESTS / "flat_lame.json"), "--out", str(out)]) == EXIT_OK
    rows = {r["sign"]: float(r["residual"]) for r in read_csv(out)}
    assert rows["+"] <= 1e-12
    assert rows["-"] >= 0.1
    assert rows["+bruteforce"] <= 1e-12
    assert "minus residual" in capsys.readouterr().out


def test_oracle_compare(tmp_path):
    out = tmp_path / "o.csv"
    assert run(["oracle-compare", "--manifest", str(MANIFESTS / "coupled_halfspace.json"),
                "--out", str(out), "--jobs", "2"]) == EXIT_OK
    assert len(read_csv(out)) == 4 * 9


def test_reconstruct_from_table_only(tmp_path):
    tab = tmp_path / "t.json"
    assert run(["symbols", "--manifest", str(MANIFESTS / "linear.json"), "--out", str(tab)]) == EXIT_OK
    jet = tmp_path / "j.json"
    assert run(["reconstruct", "--table", str(tab), "--out", str(jet)]) == EXIT_OK
    rec = read_json(jet)
    assert rec["derivatives"]["lam"][1] == pytest.approx(1, abs=1e-8)
    assert rec["derivatives"]["mu"][2] == pytest.approx(2, abs=1e-7)
    assert rec["derivatives"]["alpha"][1] == pytest.approx(2, abs=1e-8)


def test_round_trip_csv(tmp_path):
    out = tmp_path / "rt.csv"
    assert run(["round-trip", "--manifest", str(MANIFESTS / "linear.json"), "--out", str(out)]) == EXIT_OK
    rows = read_csv(out)
    assert {r["coefficient"] for r in rows} == {"lam", "mu", "alpha", "beta"}
    assert max(float(r["rel_err"]) for r in rows) <= 1e-6


def test_outputs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    m = str(MANIFESTS / "warped_n3.json")
    assert run(["symbols", "--manifest", m, "--out", str(a)]) == EXIT_OK
    assert run(["symbols", "--manifest", m, "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_inadmissible_material_exit_code(tmp_path, capsys):
    m = write_manifest(tmp_path, flat(mu={"preset": "constant", "value": 0}))
    assert run(["symbols", "--manifest", m, "--out", str(tmp_path / "o.json")]) == EXIT_VALIDATION
    assert "μ > 0" in capsys.readouterr().err


def test_missing_field(tmp_path, capsys):
    obj = flat()
    del obj["dimension"]
    m = write_manifest(tmp_path, obj)
    assert run(["symbols", "--manifest", m, "--out", str(tmp_path / "o.json")]) == EXIT_VALIDATION
    assert "dimension" in capsys.readouterr().err


def test_missing_file(tmp_path):
    assert run(["symbols", "--manifest", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")]) == EXIT_IO


def test_tolerance_failure(tmp_path):
    obj = flat()
    obj["tolerances"] = {"slope": 1e-6}
    obj["depth"] = 1
    m = write_manifest(tmp_path, obj)
    assert run(["oracle-compare", "--manifest", m, "--out", str(tmp_path / "o.csv")]) == EXIT_TOLERANCE
