"""End-to-end tests of the jacobi3d command-line interface."""

import csv
import io
import json
import os
import subprocess

import pytest

CLI = os.environ.get("JACOBI3D_CLI", "jacobi3d")


def run(*args, stdin=None):
    return subprocess.run([CLI, *args], input=stdin, capture_output=True, text=True)


def test_catalog_list():
    result = run("catalog", "--list")
    assert result.returncode == 0
    entries = json.loads(result.stdout)["entries"]
    names = [e["name"] for e in entries]
    assert len(names) == 6
    assert "darboux" in names
    kmck = next(e for e in entries if e["name"] == "kermack_mckendrick")
    assert "positive orthant" in kmck["description"]


def test_catalog_export_unknown():
    result = run("catalog", "--export", "nope")
    assert result.returncode == 2


def test_export_verify_pipeline():
    exported = run("catalog", "--export", "so3")
    assert exported.returncode == 0
    verified = run("verify", "-", stdin=exported.stdout)
    assert verified.returncode == 0
    report = json.loads(verified.stdout)
    assert report["verdict"] == "zero"
    assert report["casimir"]["verdict"] == "zero"
    assert report["max_abs_residual"] < 1e-9


def test_verify_rejects_bad_structure(tmp_path):
    doc = {"u": "x3", "v": "x1", "w": "0"}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    result = run("verify", str(path))
    assert result.returncode == 1
    report = json.loads(result.stdout)
    assert report["verdict"] == "nonzero"
    assert report["witness"] is not None


def test_verify_malformed_formula(tmp_path):
    path = tmp_path / "malformed.json"
    path.write_text(json.dumps({"u": "x3 +", "v": "x2", "w": "x1"}))
    result = run("verify", str(path))
    assert result.returncode == 2
    assert "error" in result.stderr


def test_lambda_classification():
    kmck = run("catalog", "--export", "kermack_mckendrick")
    out = run("lambda", "-", stdin=kmck.stdout)
    assert out.returncode == 0
    payload = json.loads(out.stdout)
    assert payload["case"] == "II_or_III"
    assert "r" in payload["lambda"] and "a" in payload["lambda"]

    so3 = run("catalog", "--export", "so3")
    out = run("lambda", "-", stdin=so3.stdout)
    payload = json.loads(out.stdout)
    assert payload["case"] == "I"
    assert payload["lambda"] == "0"


def test_generate_case1_so3():
    so3 = run("catalog", "--export", "so3")
    generated = run("generate", "-", "--psi", "k1 + k2", stdin=so3.stdout)
    assert generated.returncode == 0
    doc = json.loads(generated.stdout)
    report = json.loads(generated.stderr)
    assert report["verdict"] == "zero"
    # u = x3 + (x1+x2+x3) + (x1^2+x2^2+x3^2) at (1, 2, 3): 3 + 6 + 14 = 23
    reverify = run("verify", "-", stdin=generated.stdout)
    assert reverify.returncode == 0
    assert "x3" in doc["u"]


def test_generate_case1_refused_for_kermack():
    kmck = run("catalog", "--export", "kermack_mckendrick")
    result = run("generate", "-", "--psi", "k1", "--case", "1", stdin=kmck.stdout)
    assert result.returncode == 2


def test_generate_case3_lotka_volterra():
    lv = run("catalog", "--export", "lotka_volterra")
    generated = run("generate", "-", "--psi", "k1", "--case", "3", stdin=lv.stdout)
    assert generated.returncode == 0
    report = json.loads(generated.stderr)
    assert report["verdict"] == "zero"
    reverify = run("verify", "-", stdin=generated.stdout)
    assert reverify.returncode == 0


def test_generate_case3_needs_blocks():
    so3 = run("catalog", "--export", "so3")
    result = run("generate", "-", "--psi", "k1", "--case", "3", stdin=so3.stdout)
    assert result.returncode == 2


def test_generate_case3_with_explicit_files(tmp_path):
    # split the embedded blocks of the lotka_volterra export into the
    # --diffeo and --target flag files
    lv = json.loads(run("catalog", "--export", "lotka_volterra").stdout)
    target = lv.pop("case3_target")
    diffeo = {"u": "0", "v": "0", "w": "0", "diffeomorphism": lv.pop("diffeomorphism")}

    base_path = tmp_path / "base.json"
    base_path.write_text(json.dumps(lv))
    diffeo_path = tmp_path / "diffeo.json"
    diffeo_path.write_text(json.dumps(diffeo))
    target_path = tmp_path / "target.json"
    target_path.write_text(json.dumps(target))

    generated = run("generate", str(base_path), "--psi", "k1*k2", "--case", "3",
                    "--diffeo", str(diffeo_path), "--target", str(target_path))
    assert generated.returncode == 0
    assert json.loads(generated.stderr)["verdict"] == "zero"


def test_every_generated_family_reverifies():
    # generate -> verify is exit-0 for every Case-I base and the psi test set
    psis = ["0", "1", "k1", "k2", "k1*k2", "k1^2 - k2"]
    for base in ("constant", "so3", "ray_optics", "darboux"):
        exported = run("catalog", "--export", base).stdout
        for psi in psis:
            generated = run("generate", "-", "--psi", psi, "--points", "300",
                            stdin=exported)
            assert generated.returncode == 0, (base, psi, generated.stderr)
            reverified = run("verify", "-", "--points", "300", "--tol", "1e-8",
                             stdin=generated.stdout)
            assert reverified.returncode == 0, (base, psi, reverified.stdout)


def test_characteristics_so3():
    so3 = run("catalog", "--export", "so3")
    result = run("characteristics", "-", "--from", "1,2,3", "--t-end", "10",
                 "--step", "0.001", stdin=so3.stdout)
    assert result.returncode == 0
    rows = list(csv.DictReader(io.StringIO(result.stdout)))
    assert len(rows) == 10001
    assert float(rows[0]["x1"]) == pytest.approx(1.0)
    for row in rows[::500]:
        assert float(row["K1_drift"]) < 1e-6
        assert float(row["C_drift"]) < 1e-6
    summary = json.loads(result.stderr)
    assert summary["complete"] is True
    assert summary["max_drift"]["K1"] < 1e-6


def test_characteristics_zero_field(tmp_path):
    doc = {
        "u": "2", "v": "2", "w": "2",
        "domain": {"x1": [-1, 1], "x2": [-1, 1], "x3": [-1, 1]},
    }
    path = tmp_path / "const.json"
    path.write_text(json.dumps(doc))
    result = run("characteristics", str(path), "--from", "0.5,0.5,0.5",
                 "--t-end", "1", "--step", "0.01")
    assert result.returncode == 0
    rows = list(csv.DictReader(io.StringIO(result.stdout)))
    xs = {row["x1"] for row in rows}
    assert len(xs) == 1  # stationary
    summary = json.loads(result.stderr)
    assert summary["near_degenerate_samples"] == len(rows)


def test_characteristics_carry_xi_k3_drift():
    kmck = run("catalog", "--export", "kermack_mckendrick")
    result = run("characteristics", "-", "--from", "1,2,3", "--t-end", "1",
                 "--step", "0.001", "--carry-xi", "x1*x2", stdin=kmck.stdout)
    assert result.returncode == 0
    rows = list(csv.DictReader(io.StringIO(result.stdout)))
    assert float(rows[0]["xi"]) == pytest.approx(2.0)
    for row in rows[::100]:
        assert float(row["K3_drift"]) < 1e-5


def test_seed_determinism():
    bad = json.dumps({"u": "x3*x1", "v": "x1", "w": "x2"})
    first = run("verify", "-", "--seed", "7", stdin=bad)
    second = run("verify", "-", "--seed", "7", stdin=bad)
    assert first.stdout == second.stdout
    third = run("verify", "-", "--seed", "8", stdin=bad)
    assert json.loads(third.stdout)["witness"] != json.loads(first.stdout)["witness"]
