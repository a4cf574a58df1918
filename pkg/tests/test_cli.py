import json
import math
import subprocess
import sys

import pytest

from rmspace import __version__
from rmspace.cli import run, to_json
from rmspace.series import LogKernel, Polynomial, serialize

SMALL = ["--grid-angles", "64", "--grid-depth", "10", "--grid-order", "6"]


@pytest.fixture
def spec_file(tmp_path):
    def write(f, name="f.json"):
        path = tmp_path / name
        path.write_text(json.dumps(serialize(f)))
        return str(path)

    return write


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    doc = json.loads(out.out) if out.out else None
    return code, doc, out.err


def test_to_json_floats():
    text = to_json({"x": 0.1, "y": [1, 2.5], "z": math.inf, "w": complex(1, -2)})
    assert '"x": 0.10000000000000001' in text
    assert '"inf"' in text
    assert json.loads(text)["w"] == [1, -2]


def test_norm_envelope(capsys, spec_file):
    code, doc, _ = invoke(capsys, "norm", "--spec", spec_file(Polynomial((0, 1))), "--closing-panel", *SMALL)
    assert code == 0
    assert set(doc) == {"tool", "version", "config", "result"}
    assert doc["tool"] == "rmspace" and doc["version"] == __version__
    assert doc["config"]["p"] == 2 and doc["config"]["seed"] == "5EED"
    assert doc["result"]["value"] == pytest.approx(3**-0.5, rel=1e-12)


def test_norm_profile_csv(capsys, spec_file, tmp_path):
    csv = tmp_path / "prof.csv"
    code, doc, _ = invoke(capsys, "norm", "--spec", spec_file(LogKernel(1)), "--p", "1", "--profile", "decay", "--csv", str(csv), *SMALL)
    assert code == 0
    assert csv.read_text().splitlines()[0] == "rho,value,quantity"
    assert doc["result"]["profile"]["quantity"] == "BoundaryDecay"


def test_deterministic(capsys):
    args = ["lp-check", "--corpus", "5", "--p", "3", "--q", "inf", *SMALL]
    _, first, _ = invoke(capsys, *args)
    _, second, _ = invoke(capsys, *args)
    assert first == second
    assert first["result"]["summary"]["all_hold"]


def test_seed_changes_corpus(capsys):
    _, a, _ = invoke(capsys, "corpus", "--count", "2")
    _, b, _ = invoke(capsys, "corpus", "--count", "2", "--seed", "BEEF")
    assert a["result"]["specs"] != b["result"]["specs"]
    assert b["config"]["seed"] == "BEEF"


def test_out_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    code = run(["extremal", "l1-copy", "--beta", "2", "--n", "1", "--out", str(target)])
    assert code == 0 and capsys.readouterr().out == ""
    assert json.loads(target.read_text())["result"]["closed_form"] == pytest.approx(2 / 3)


def test_usage_errors_exit_one(capsys, spec_file):
    assert run(["bogus"]) == 1
    assert run(["norm", "--spec", "/nonexistent.json"]) == 1
    assert run(["norm", "--spec", spec_file(Polynomial((1,))), "--p", "0.5"]) == 1
    assert run(["lp-check", "--spec", spec_file(Polynomial((1,))), "--p", "inf"]) == 1
    assert run([]) == 1
    assert "error" in capsys.readouterr().err


def test_converse_gate(capsys, spec_file):
    f = spec_file(Polynomial((0, 1)))
    assert run(["converse", "--spec", f, "--p", "1", "--q", "inf", *SMALL]) == 1
    code, doc, _ = invoke(capsys, "converse", "--spec", f, "--p", "1", "--q", "inf", "--experimental", *SMALL)
    assert code == 0 and doc["result"]["experimental"]


def test_check_failure_exit_two(capsys, spec_file):
    code, doc, _ = invoke(capsys, "maximal", "--spec", spec_file(Polynomial((1, 1))), "--depth", "6", "--baseline", "0.5", *SMALL)
    assert code == 2 and doc["result"]["regression"]


def test_luecking_and_extremal(capsys):
    code, doc, _ = invoke(capsys, "luecking", "check", "--depth", "6", "--samples", "50")
    assert code == 0 and doc["result"]["nc_counts"] == {"0": 3, "1": 7, "2": 9, "3": 9}
    code, doc, _ = invoke(capsys, "extremal", "c0", "--p", "1")
    assert code == 0 and doc["result"]["C2"] == 256
    code, doc, _ = invoke(capsys, "extremal", "claim-check", "--angles", "8")
    assert code == 0 and doc["result"]["holds"]


def test_diagnose_and_bloch(capsys, spec_file):
    g = spec_file(LogKernel(1))
    code, doc, _ = invoke(capsys, "diagnose", "--spec", g)
    assert doc["result"]["classification"] == {"in_B": "YES", "in_B0": "NO", "in_B0w": "YES"}
    code, doc, _ = invoke(capsys, "bloch", "--spec", g, "--second-derivative-bound", "1", "--bcdelta", "1", "0.25", "0.1", "0", *SMALL)
    assert code == 0 and doc["result"]["bcdelta"]["verified"]


def test_tg_and_lacunary(capsys, spec_file):
    z = spec_file(Polynomial((0, 1)))
    code, doc, _ = invoke(capsys, "tg", "--spec", z, "--symbol", z, "--order", "3", *SMALL)
    assert doc["result"]["coefficients"][2] == [0.5, 0]
    code, doc, _ = invoke(capsys, "lacunary", "--exponents", "1,2,4", "--p", "1", "--q", "1", *SMALL)
    assert code == 0 and doc["result"]["model"] == pytest.approx(1 + 1 / 2 + 1 / 4)


def test_help_names_constructs():
    for cmd, word in [("norm", "rho_{p,q}"), ("diagnose", "little Bloch"), ("maximal", "maximal")]:
        proc = subprocess.run([sys.executable, "-m", "rmspace", cmd, "--help"], capture_output=True, text=True)
        assert proc.returncode == 0 and word in proc.stdout
