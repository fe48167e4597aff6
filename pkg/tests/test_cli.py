import csv
import io
import json

import pytest

from geoch.cli import parse_state, run

from conftest import run_cli


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_facet(capsys):
    code, out, _ = _run(capsys, "facet", "--name", "geometric_tripartite_ch", "--bound", "lower")
    assert code == 0
    data = json.loads(out)
    assert data["rank"] == 25 and data["is_facet"] is True and data["saturating_count"] == 32


def test_vcrit(capsys):
    code, out, _ = _run(capsys, "vcrit", "--name", "geometric_tripartite_ch", "--state", "ghz:0.785398",
                        "--eta", "1", "--starts", "8")
    assert code == 0
    data = json.loads(out)
    assert round(data["v_crit"], 4) == 0.5
    assert data["optimizer"]["starts"] == 8 and data["optimizer"]["seed"] == 0


def test_vcrit_csv(capsys):
    code, out, _ = _run(capsys, "vcrit", "--name", "three_site_ch", "--state", "ghz:0.7853981634",
                        "--starts", "8", "--format", "csv")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["v_crit"]) == pytest.approx(0.6822, abs=5e-4)


def test_lhv(capsys):
    code, out, _ = _run(capsys, "lhv", "--name", "four_party_three_settings")
    data = json.loads(out)
    assert code == 0 and data["min"] == "0/1" and data["points"] == 4096 and data["valid"]


def test_catalog_forms(capsys):
    code, out, _ = _run(capsys, "catalog")
    assert code == 0 and len(json.loads(out)) == 7
    _, out, _ = _run(capsys, "catalog", "--name", "geometric_tripartite_ch", "--form", "correlation")
    assert json.loads(out)["lower_bound"] == "-2/1"
    _, out, _ = _run(capsys, "catalog", "--name", "geometric_tripartite_ch", "--form", "eberhard")
    assert len(json.loads(out)["coefficients"]) == 25
    code, _, err = _run(capsys, "catalog", "--name", "appendix_d_4", "--form", "eberhard")
    assert code == 2 and "count form" in err


def test_vertex_tables(capsys):
    code, out, _ = _run(capsys, "tables", "III")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("A1,A2,B1,B2,C1,C2,A1B1")
    assert "0,0,0,0,1," + ",".join(["0"] * 21) in lines
    assert len(lines) == 33
    _, out4, _ = _run(capsys, "tables", "IV")
    assert len(out4.splitlines()) == 33


def test_etacrit_subspace(capsys):
    code, out, _ = _run(capsys, "etacrit", "--name", "geometric_tripartite_ch", "--subspace", "ghz",
                        "--starts", "8")
    data = json.loads(out)
    assert code == 0 and data["eta_crit"] == pytest.approx(0.7913, abs=1e-3)
    assert data["scan"][0][0] == 1.0


def test_etacrit_needs_one_target(capsys):
    code, _, err = _run(capsys, "etacrit", "--name", "geometric_tripartite_ch")
    assert code == 2 and "exactly one" in err


def test_sweep_csv_is_stable(capsys):
    argv = ("sweep", "--name", "geometric_tripartite_ch", "--state", "ghz:0.7853981634",
            "--axis", "eta", "--start", "0.9", "--stop", "1.0", "--step", "0.05", "--starts", "4")
    _, a, _ = _run(capsys, *argv)
    _, b, _ = _run(capsys, *argv)
    assert a == b
    lines = a.split("\n")
    assert lines[0] == "axis,min_expectation,v_crit,robustness" and lines[-1] == ""
    assert [ln.split(",")[0] for ln in lines[1:-1]] == ["0.9000000000", "0.9500000000", "1.0000000000"]


def test_simulate(capsys):
    argv = ("simulate", "--name", "geometric_tripartite_ch", "--state", "ghz:0.7853981634", "--eta", "0.9",
            "--trials", "20000", "--starts", "4", "--seed", "5")
    code, out, _ = _run(capsys, *argv)
    data = json.loads(out)
    assert code == 0 and data["trials"] == 20000
    assert set(data["counts"]) == {"1,1,1", "1,2,2", "2,1,2", "2,2,1"}
    assert data["count_value_per_trial"] == pytest.approx(data["probability_value"], abs=0.02)
    assert _run(capsys, *argv)[1] == out


def test_write_to_file(tmp_path, capsys):
    target = tmp_path / "f.json"
    assert run(["facet", "--name", "three_site_ch", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["is_facet"] is True


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["facet", "--name", "nope"],
    ["vcrit", "--name", "three_site_ch", "--state", "ghz:0.1", "--eta", "1.5"],
    ["vcrit", "--name", "three_site_ch", "--state", "w:0.1"],
    ["vcrit", "--name", "three_site_ch", "--state", "cat:1"],
    ["vcrit", "--name", "three_site_ch", "--state", "ghz:0.1", "--starts", "0"],
    ["facet", "--name", "three_site_ch", "--unknown-flag"],
])
def test_invalid_input_exits_2(argv, capsys):
    assert run(argv) == 2


def test_numerical_failure_exits_3(capsys):
    code, _, err = _run(capsys, "vcrit", "--name", "geometric_tripartite_ch", "--state", "ghz:0.5",
                        "--max-iterations", "1", "--starts", "2")
    assert code == 3 and "numerical" in err


def test_parse_state():
    assert parse_state("ghz:0.5") == ("ghz", (0.5,))
    assert parse_state("w:0.1,0.2") == ("w", (0.1, 0.2))
    assert parse_state("product") == ("product", ())
    with pytest.raises(ValueError):
        parse_state("ghz:abc")
    with pytest.raises(ValueError):
        parse_state("ghz:nan")


def test_console_entry_point():
    proc = run_cli("--help")
    assert "simulate" in proc.stdout and proc.returncode == 0
    assert run_cli("vcrit", check=False).returncode == 2
