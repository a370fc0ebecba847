import json

import pytest

from polgow.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_group_commands(capsys):
    code, out, _ = run(capsys, "group", "make", "S3")
    assert code == 0 and json.loads(out)["order"] == 6
    code, out, err = run(capsys, "group", "fingerprint", "A5")
    fp = json.loads(out)
    assert fp["is_perfect"] and fp["order"] == 60
    assert "order" in err
    code, out, _ = run(capsys, "group", "quotient", "Z6", "--normal", "2")
    assert json.loads(out)["quotient"]["order"] == 2


def test_pol2_commands(capsys):
    code, out, _ = run(capsys, "pol2", "build", "Z2")
    doc = json.loads(out)
    assert doc["order"] == 4 and doc["fingerprint"]["abelian_invariants"] == [4]
    code, out, _ = run(capsys, "pol2", "quotient", "Z4", "--sigma", "2", "--generators", "1,3")
    assert json.loads(out)["order"] == 4
    code, _, err = run(capsys, "pol2", "build", "Z2xZ4")
    assert code == 2 and "cap" in err


def test_quad_commands(capsys):
    code, out, _ = run(capsys, "quad", "classify", "2,2")
    assert json.loads(out)["quad"]["invariant_factors"] == [2, 4, 4]
    code, out, _ = run(capsys, "quad", "oracle", "Z4", "--modulus", "16")
    doc = json.loads(out)
    assert doc["count"] == 16 and doc["invariant_factors"] == doc["classification"] == [2, 8]
    code, out, _ = run(capsys, "quad", "check-map", "Z4", "--modulus", "4", "--exponents", "0,1,0,1")
    assert code == 0 and json.loads(out)["holds"]
    code, out, _ = run(capsys, "quad", "check-map", "Z4", "--modulus", "8", "--exponents", "0,1,5,1")
    assert code == 1 and not json.loads(out)["holds"]


def test_gowers_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "gowers", "norm", "Z6", "--k", "2", "--n", "2", "--seed", "3")
    doc = json.loads(out)
    assert 0 < doc["norm"] <= 1 and doc["method"] == "exact"
    code, out2, _ = run(capsys, "gowers", "norm", "Z6", "--k", "2", "--n", "2", "--seed", "3")
    assert out == out2
    code, out, _ = run(capsys, "gowers", "inner", "Z4", "--k", "2")
    assert len(json.loads(out)["inner"]) == 2
    code, _, err = run(capsys, "gowers", "norm", "Z12", "--k", "3", "--n", "3", "--budget", "100")
    assert code == 2 and "budget" in err


def test_experiment_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "stability", "run", "--rep", "perm5")
    doc = json.loads(out)
    assert doc["epsilon_d"] == 0 and doc["ratio"] == "exact"
    target = tmp_path / "inv.json"
    code, out, _ = run(capsys, "inverse", "run", "--delta", "0", "--k", "2", "--out", str(target))
    assert out == ""
    doc = json.loads(target.read_text())
    assert abs(doc["norm_k"]["2"] - 1) < 1e-9 and doc["distance_to_hom"] < 1e-9


def test_csv_format(capsys):
    code, out, _ = run(capsys, "quad", "classify", "4", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "group,quad" and len(lines) == 2


def test_unknown_subcommand_exits():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
