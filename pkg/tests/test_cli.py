import json
import math
import subprocess
import sys

import numpy as np
import pytest

from spinslepian.cli import main
from spinslepian.formats import (
    SchemaError,
    basis_to_text,
    fmt_float,
    grid_header,
    read_basis,
    read_grid,
)


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture(scope="module")
def vector_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("basis") / "vec.json"
    assert run("build", "--rank", "vector", "--bandlimit", 4, "--theta-deg", 30, "--out", path) == 0
    return path


def test_fmt_float_round_trips():
    rng = np.random.default_rng(1)
    for x in np.concatenate([rng.standard_normal(200) * 10.0 ** rng.integers(-300, 300, 200),
                             [0.0, -0.0, 1.0, 5e-324, 1.7976931348623157e308]]):
        assert float(fmt_float(x)) == x
    with pytest.raises(ValueError):
        fmt_float(float("nan"))


def test_build_spin_L0(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert run("build", "--rank", "spin", "--spin", 0, "--bandlimit", 0,
               "--theta-deg", 60, "--out", out) == 0
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == 1 and doc["rank"] == "spin" and doc["theta_deg"] == 60
    (entry,) = doc["entries"]
    assert entry["lambda"] == pytest.approx((1 - math.cos(math.radians(60))) / 2, abs=1e-15)
    assert entry["lambda"] == pytest.approx(0.25, abs=1e-15)
    assert entry["coeffs"] == [{"n": 0, "value": 1}]


def test_build_file_schema(vector_file):
    doc = json.loads(vector_file.read_text())
    assert len(doc["entries"]) == 3 * 25 - 2
    assert [e["alpha"] for e in doc["entries"]] == list(range(1, 74))
    for e in doc["entries"]:
        n_min = max(abs(e["spin"]), abs(e["j"]))
        assert [c["n"] for c in e["coeffs"]] == list(range(n_min, 5))
    assert b"\r" not in vector_file.read_bytes()


def test_round_trip_bit_identical(vector_file):
    text = vector_file.read_text()
    assert basis_to_text(read_basis(vector_file)) == text


def test_build_deterministic(tmp_path, vector_file):
    again = tmp_path / "again.json"
    run("build", "--rank", "vector", "--bandlimit", 4, "--theta-deg", 30, "--out", again)
    assert again.read_bytes() == vector_file.read_bytes()


@pytest.mark.parametrize("args", [
    ["build", "--rank", "tensor", "--bandlimit", 3, "--theta-deg", 0, "--out", "x.json"],
    ["build", "--rank", "tensor", "--bandlimit", 1, "--theta-deg", 40, "--out", "x.json"],
    ["build", "--rank", "spin", "--bandlimit", 3, "--theta-deg", 40, "--out", "x.json"],
    ["build", "--rank", "scalar", "--spin", 1, "--bandlimit", 3, "--theta-deg", 40, "--out", "x.json"],
    ["shannon", "--rank", "vector", "--bandlimit", 3, "--theta-deg", 180],
    ["shannon", "--rank", "vector", "--bandlimit", "x", "--theta-deg", 10],
    ["nosuchcommand"],
])
def test_usage_errors(args, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    try:
        code = run(*args)
    except SystemExit as exc:
        code = exc.code
    assert code == 1
    assert capsys.readouterr().err
    assert not (tmp_path / "x.json").exists()


def test_unwritable_path(tmp_path):
    target = tmp_path / "missing-dir" / "b.json"
    assert run("build", "--rank", "scalar", "--bandlimit", 2, "--theta-deg", 30, "--out", target) == 3


def test_shannon_output(capsys):
    assert run("shannon", "--rank", "tensor", "--bandlimit", 18, "--theta-deg", 40) == 0
    out = capsys.readouterr().out
    assert "378.65706881193" in out and "rounds to 379" in out and "entries 3237" in out
    assert run("shannon", "--rank", "spin", "--spin", 0, "--bandlimit", 18, "--theta-deg", 40) == 0
    out = capsys.readouterr().out
    assert "42.2289" in out and "entries 361" in out


def test_eval_grid_file(vector_file, tmp_path):
    out = tmp_path / "g.csv"
    assert run("eval", vector_file, "--alpha", 1, "--grid", "2x2", "--out", out) == 0
    header, rows = read_grid(out)
    assert header == grid_header("vector")
    assert header[:3] == ["lon_deg", "lat_deg", "norm"] and len(header) == 3 + 6
    assert rows.shape == (4, 9)
    comps = rows[:, 3::2] + 1j * rows[:, 4::2]
    np.testing.assert_allclose(rows[:, 2], np.linalg.norm(comps, axis=1), rtol=1e-14)
    assert b"\r" not in out.read_bytes()


def test_eval_several_alphas(vector_file, tmp_path):
    out = tmp_path / "g.csv"
    assert run("eval", vector_file, "--alpha", "1,5", "--grid", "3x4", "--out", out) == 0
    for a in (1, 5):
        _, rows = read_grid(tmp_path / f"g_alpha{a}.csv")
        assert rows.shape[0] == 12
    assert run("eval", vector_file, "--alpha", "2,3", "--grid", "2x2",
               "--out", tmp_path / "f{alpha}.csv") == 0
    assert (tmp_path / "f2.csv").exists() and (tmp_path / "f3.csv").exists()


def test_eval_alpha_out_of_range(vector_file, tmp_path):
    assert run("eval", vector_file, "--alpha", 74, "--grid", "2x2", "--out", tmp_path / "g.csv") == 1


def test_eval_malformed_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("eval", bad, "--alpha", 1, "--out", tmp_path / "g.csv") == 3
    assert "malformed" in capsys.readouterr().err
    bad.write_text(json.dumps({"schema_version": 1, "rank": "tensor"}))
    assert run("eval", bad, "--alpha", 1, "--out", tmp_path / "g.csv") == 3
    assert "missing field 'L'" in capsys.readouterr().err


def test_schema_checks(vector_file):
    doc = json.loads(vector_file.read_text())
    from spinslepian.formats import basis_from_document

    def broken(mutate):
        d = json.loads(json.dumps(doc))
        mutate(d)
        with pytest.raises(SchemaError):
            basis_from_document(d)

    broken(lambda d: d["entries"][3].__setitem__("alpha", 7))
    broken(lambda d: d["entries"][0]["coeffs"].pop())
    broken(lambda d: d["entries"][0].__setitem__("spin", 2))
    broken(lambda d: d["entries"][0].__setitem__("type_index", 4))
    broken(lambda d: d.__setitem__("b", 0.5))
    broken(lambda d: d.__setitem__("theta_deg", 0))
    broken(lambda d: d.__setitem__("schema_version", 2))


def test_verify_fresh_spin_basis(capsys):
    assert run("verify", "--rank", "spin", "--spin", 2, "--bandlimit", 10, "--theta-deg", 40) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "commutation N=2" in out


def test_verify_deep(capsys):
    assert run("verify", "--rank", "vector", "--bandlimit", 4, "--theta-deg", 50, "--deep") == 0
    assert "spatial cap orthogonality" in capsys.readouterr().out


def test_verify_file_and_corruption(vector_file, tmp_path, capsys):
    assert run("verify", "--basis", vector_file) == 0
    capsys.readouterr()
    doc = json.loads(vector_file.read_text())
    doc["entries"][2]["coeffs"][0]["value"] += 1e-3
    bad = tmp_path / "corrupt.json"
    bad.write_text(json.dumps(doc))
    assert run("verify", "--basis", bad) == 2
    err = capsys.readouterr().err
    assert "failed invariant: coefficient orthonormality" in err


def test_verify_requires_arguments():
    assert run("verify") == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spinslepian", "shannon", "--rank", "scalar",
                           "--bandlimit", "3", "--theta-deg", "90"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "rounds to 8" in proc.stdout
