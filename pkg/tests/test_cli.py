import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starunstable.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_adem(capsys):
    code, out, _ = run(capsys, "adem", "2 2")
    assert code == 0 and out.strip() == "Sq^3 Sq^1"
    code, out, _ = run(capsys, "adem", "1 1", "--format", "json")
    assert json.loads(out)["terms"] == []


def test_verify_theorem_lev(capsys):
    code, out, _ = run(capsys, "verify-theorem", "--operad", "lev", "--star", "gen", "--module", "F1",
                       "--max-degree", "12", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["ok"]
    assert [r["quotient"] for r in rep["degrees"]][1:6] == [1, 1, 1, 2, 3]
    assert set(rep["degrees"][0]) == {"d", "quotient", "free", "match"}


def test_verify_theorem_sigma_f0(capsys):
    code, out, _ = run(capsys, "verify-theorem", "--operad", "ucom", "--star", "dot", "--module", "SigmaF0",
                       "--max-degree", "4", "--format", "json")
    rep = json.loads(out)
    assert code == 1
    assert rep["degrees"][2] == {"d": 2, "quotient": 0, "free": 1, "match": False}


def test_verify_theorem_random_section(capsys):
    code, out, _ = run(capsys, "verify-theorem", "--operad", "ucom", "--module", "F2", "--max-degree", "8",
                       "--section", "random:5")
    assert code == 0 and "all degrees match" in out


def test_usage_errors(capsys):
    code, _, err = run(capsys, "free-dims", "--operad", "levv", "--module", "F1")
    assert code == 2 and "lev" in err and "tqlev:<q>" in err
    code, _, err = run(capsys, "free-dims", "--operad", "lev", "--module", "G1")
    assert code == 2 and "SigmaF<n>" in err
    code, _, err = run(capsys, "k-dims", "--operad", "lev", "--module", "F1", "--star", "dot")
    assert code == 2
    with pytest.raises(SystemExit) as e:
        main(["no-such-command"])
    assert e.value.code == 2


def test_check_central(capsys):
    assert run(capsys, "check-central", "--operad", "lev")[0] == 0
    assert run(capsys, "check-central", "--operad", "ucom.dpm", "--op", "dot.dd")[0] == 0
    code, out, _ = run(capsys, "check-central", "--operad", "magcom")
    assert code == 1 and "fails" in out


@pytest.mark.parametrize("argv, expected", [
    (["operad-dims", "--operad", "lev", "--max-arity", "4"], [0, 1, 1, 3, 13]),
    (["module-dims", "--module", "F1", "--max-degree", "8"], [0, 1, 1, 0, 1, 0, 0, 0, 1]),
    (["free-dims", "--operad", "ucom", "--module", "F1", "--max-degree", "6"], [1, 1, 2, 2, 4, 4, 6]),
    (["k-dims", "--operad", "ucom", "--module", "F2", "--max-degree", "7"], [1, 0, 1, 1, 1, 2, 2, 2]),
    (["k-dims", "--operad", "tqlev:2", "--module", "F1", "--max-degree", "5"], [0, 1, 1, 1, 1, 0]),
    (["model-dims", "--model", "jtrunc:2", "--weight", "4", "--max-degree", "5"], [0, 1, 1, 1, 1, 0]),
    (["model-dims", "--model", "ms:2", "--max-degree", "3"], [1, 2, 3, 4]),
])
def test_dimension_tables(capsys, argv, expected):
    code, out, _ = run(capsys, *argv, "--format", "json")
    rep = json.loads(out)
    key = "arities" if "arities" in rep else "degrees"
    assert code == 0
    assert [r["dim"] for r in rep[key]] == expected


def test_ideal_check(capsys):
    assert run(capsys, "ideal-check", "--operad", "ucom", "--module", "F1", "--max-degree", "8")[0] == 0
    assert run(capsys, "ideal-check", "--operad", "magcom", "--module", "F1", "--flavor", "x,unst",
               "--max-degree", "6")[0] == 1


def test_compare(capsys):
    assert run(capsys, "compare", "--model", "k", "--free", "lev:F1", "--max-degree", "7")[0] == 0
    assert run(capsys, "compare", "--model", "jtrunc:1", "--free", "tqlev:1:F1", "--max-degree", "7")[0] == 0
    assert run(capsys, "compare", "--model", "ms:2", "--free", "ucom.qsd:2:F1", "--max-degree", "7")[0] == 0


def test_out_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "module-dims", "--module", "SOF2", "--max-degree", "9", "--format", "json",
                       "--out", str(target))
    assert code == 0
    assert target.read_text().strip() == out.strip()


COMMANDS = [
    ["adem", "3 2 1"],
    ["fn-basis", "--n", "2", "--max-degree", "9"],
    ["module-dims", "--module", "PhiF1", "--max-degree", "8"],
    ["k-dims", "--operad", "ucom.dpm", "--module", "F1", "--max-degree", "6", "--weight", "3/2"],
    ["verify-theorem", "--operad", "ucom", "--module", "F1", "--max-degree", "8", "--section", "random",
     "--seed", "3"],
    ["ideal-check", "--operad", "lev", "--module", "F1", "--max-degree", "6"],
]


@settings(max_examples=12)
@given(st.sampled_from(COMMANDS))
def test_json_round_trip(argv):
    import io
    from contextlib import redirect_stdout

    buf = io.StringIO()
    with redirect_stdout(buf):
        main(argv + ["--format", "json"])
    text = buf.getvalue()
    rep = json.loads(text)
    assert json.dumps(rep, sort_keys=True) == text.strip()


def test_byte_identical_across_processes():
    argv = [sys.executable, "-m", "starunstable", "verify-theorem", "--operad", "lev", "--module", "F1",
            "--max-degree", "8", "--section", "random:11"]
    a = subprocess.run(argv, capture_output=True)
    b = subprocess.run(argv, capture_output=True, env={"PYTHONHASHSEED": "123", "PATH": ""})
    assert a.returncode == 0
    assert a.stdout == b.stdout
