import csv
import io
import json

import pytest

from gcrit.cli import main, parse_methods
from gcrit.errors import UnknownMethod


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def test_kellogg_records(capsys):
    code, out, _ = run(capsys, "bounds", "--potential", "exp", "--method", "kellogg",
                       "--iters", "4", "--format", "json")
    assert code == 0
    rows = [r for r in json.loads(out) if r["method"] == "kellogg"]
    assert [r["n"] for r in rows] == [1, 2, 3, 4]
    for row, want in zip(rows, [1.5323, 1.4480, 1.4459, 1.4458]):
        assert row["value"] == pytest.approx(want, abs=1.5e-4)
        assert row["bound_type"] == "upper" and row["provenance"] == "sequence"


def test_alpha_omega_first_step(capsys):
    code, out, _ = run(capsys, "bounds", "--potential", "sw", "--method", "alpha,omega",
                       "--iters", "1", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["potential", "ell", "method", "n", "value", "bound_type", "provenance"]
    got = {(r["method"], r["n"]): float(r["value"]) for r in rows}
    assert got[("alpha", "1")] == pytest.approx(2.4)
    assert got[("omega", "1")] == pytest.approx(2.5)


def test_every_method_and_ordering(capsys):
    methods = "power,kellogg,kolomy,alpha,omega,glaser,calogero1,calogero2,variational,rayleigh,chadan"
    code, out, _ = run(capsys, "bounds", "--potential", "pe", "--ell", "1", "--method", methods,
                       "--iters", "3", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    lows = [r["value"] for r in rows if r["bound_type"] == "lower"]
    highs = [r["value"] for r in rows if r["bound_type"] == "upper"]
    assert max(lows) <= min(highs)
    assert {r["method"] for r in rows} >= set(methods.split(","))


def test_output_is_byte_stable(capsys):
    argv = ("bounds", "--potential", "sw", "--ell", "2", "--iters", "3")
    first = run(capsys, *argv)[1]
    assert run(capsys, *argv)[1] == first
    assert first.splitlines()[0].split()[:3] == ["potential", "ell", "method"]


def test_usage_errors(capsys):
    assert run(capsys, "bounds", "--potential", "sw", "--method", "none")[0] == 1
    assert run(capsys, "bounds", "--potential", "moon")[0] == 1
    assert run(capsys, "bounds", "--iters", "0")[0] == 1
    assert run(capsys, "bounds", "--ell", "-1")[0] == 1
    assert run(capsys, "reproduce", "--table", "9")[0] == 1
    assert run(capsys)[0] == 1
    with pytest.raises(UnknownMethod):
        parse_methods(" , ")


def test_numeric_failure_exit(capsys, tmp_path):
    path = tmp_path / "zero.dat"
    path.write_text("0 0\n1 0\n2 0\n3 0\n")
    code, _, err = run(capsys, "oracle", "--potential", f"file:{path}")
    assert code == 2
    assert "numerical failure" in err


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", "--potential", "sw", "--ell", "1", "--format", "json")
    rows = json.loads(out)
    assert code == 0
    assert rows[0]["value"] == pytest.approx(9.8696, abs=1.5e-4)
    assert abs(rows[0]["value"] - rows[1]["value"]) < 1e-8 * rows[1]["value"]
    code, out, _ = run(capsys, "oracle", "--potential", "pe")
    assert code == 0 and "0.6766" in out


def test_oracle_table_file(capsys, tmp_path):
    path = tmp_path / "well.dat"
    path.write_text("# step well sampled on a grid\n" + "".join(
        f"{0.1 * i:.1f}, {1.0 if i <= 10 else 0.0}\n" for i in range(16)))
    code, out, _ = run(capsys, "oracle", "--potential", f"file:{path}", "--format", "csv")
    assert code == 0
    value = float(list(csv.DictReader(io.StringIO(out)))[0]["value"])
    assert 0 < value < 10


def test_reproduce_table5(capsys):
    code, out, _ = run(capsys, "reproduce", "--table", "5")
    assert code == 0
    sw = next(line for line in out.splitlines() if line.startswith("SW (l=0)"))
    assert sw.split()[4] == "4.0000"
    assert out.rstrip().endswith("PASS")


def test_reproduce_json_fields(capsys):
    code, out, _ = run(capsys, "reproduce", "--table", "4", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 72
    assert all(r["pass"] for r in rows)


def test_tolerance_flag_and_env(capsys, monkeypatch):
    monkeypatch.setenv("GCRIT_TOL", "not-a-number")
    assert run(capsys, "oracle", "--potential", "sw")[0] == 1
    monkeypatch.setenv("GCRIT_TOL", "1e-9")
    code, out, _ = run(capsys, "bounds", "--potential", "sw", "--method", "omega", "--tol", "1e-11")
    assert code == 0
