import json
import subprocess
import sys

import pytest

from ete_assign.cli import main
from ete_assign.repro import fixture


@pytest.fixture
def files(tmp_path):
    out = {}
    for n in range(1, 7):
        path = tmp_path / f"ex{n}.json"
        path.write_text(json.dumps(fixture(n)["problem"]))
        out[n] = str(path)
    for name, n, key in (("ex2_sigma", 2, "sigma"), ("ex3_sigma", 3, "sigma"),
                         ("ex5_spp", 5, "sigmaDoublePrime")):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(fixture(n)[key]))
        out[name] = str(path)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_audit_example5(files, capsys):
    code, out = run(capsys, "audit", files[5])
    assert code == 0
    assert "general-upper-bounds: true" in out.out


def test_audit_example3(files, capsys):
    code, out = run(capsys, "audit", files[3])
    assert code == 0
    assert "general-upper-bounds: false" in out.out


def test_audit_assumption1_failure(tmp_path, capsys):
    doc = dict(fixture(2)["problem"])
    doc["preferences"] = {**doc["preferences"], "a2": [4, 3, 2, 1, 0]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out = run(capsys, "audit", str(path))
    assert code == 1
    assert "assumption-1: FAIL" in out.out


def test_run_pipeline_uniform(tmp_path, capsys):
    doc = dict(fixture(6)["problem"])
    doc["preferences"] = {a: [0, 1, 2] for a in doc["agents"]}
    path = tmp_path / "same.json"
    path.write_text(json.dumps(doc))
    code, out = run(capsys, "run", str(path), "--format", "json")
    assert code == 0
    res = json.loads(out.out)
    assert res["marginals"] == {a: ["1/3"] * 3 for a in doc["agents"]}
    assert res["ete"] and res["oe"]


def test_run_rejects_split_groups(files, capsys):
    code, out = run(capsys, "run", files[5], "--priority", "a1,a4,a2,a5,a3,a6")
    assert code == 2
    assert "splits a group" in out.err


def test_ete_example2(files, capsys):
    code, out = run(capsys, "ete", files[2], files["ex2_sigma"], "--format", "json")
    m = json.loads(out.out)["marginals"]
    assert m["a1"][:4] == ["1/6", "1/6", "1/3", "1/3"]
    assert m["a3"][:4] == ["1/3", "1/3", "1/6", "1/6"]


def test_check_oe_negative_with_witness(files, capsys, tmp_path):
    # reassignment of Example 3's y, produced through the CLI itself
    code, out = run(capsys, "ete", files[3], files["ex3_sigma"], "--format", "json")
    lot = tmp_path / "sp.json"
    lot.write_text(json.dumps({"lottery": json.loads(out.out)["lottery"]}))
    code, out = run(capsys, "check", files[3], str(lot), "--oe", "--format", "json")
    assert code == 1
    res = json.loads(out.out)["oe"]
    assert res["holds"] is False and res["witness"]


def test_check_oe_positive(files, capsys):
    code, out = run(capsys, "check", files[5], files["ex5_spp"], "--oe")
    assert code == 0 and "OE: yes" in out.out


def test_budget_exit_code(files, capsys):
    code, out = run(capsys, "check", files[3], files["ex3_sigma"], "--oe", "--budget", "5")
    assert code == 3


def test_input_error_exit_code(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{")
    code, out = run(capsys, "audit", str(path))
    assert code == 2 and "broken.json:1:" in out.err


def test_manipulate(files, capsys):
    code, out = run(capsys, "manipulate", files[6], "--agent", "a3", "--format", "json")
    assert code == 1
    f = json.loads(out.out)["finding"]
    assert f["manipulator"] == "a3" and f["verdict"] == "dominated_strict"


def test_re_fast_and_exhaustive_agree(files, capsys):
    _, a = run(capsys, "re", files[6], "--format", "json")
    _, b = run(capsys, "re", files[6], "--exhaustive", "--format", "json")
    assert json.loads(a.out)["optimalRankValue"] == json.loads(b.out)["optimalRankValue"] == 5


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_repro_passes(n, capsys):
    code, out = run(capsys, "repro", str(n))
    assert code == 0, out.out


def test_output_is_deterministic(files):
    cmd = [sys.executable, "-m", "ete_assign.cli", "run", files[6], "--format", "json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b


def test_stdin_input(files):
    with open(files[5]) as fh:
        res = subprocess.run([sys.executable, "-m", "ete_assign.cli", "audit", "-"],
                             stdin=fh, capture_output=True, text=True)
    assert res.returncode == 0 and "general-upper-bounds: true" in res.stdout
