from __future__ import annotations

import json
import os

import pytest

from psgap.cli import dump_json, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ps_csv(capsys):
    code, out, _ = run(capsys, "ps", "--c", "11/10", "--max", "1000")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "m,n,is_prime"
    assert lines[1] == "1,1,0" and lines[6] == "7,6,1"
    from psgap.psprimes import enumerate_ps

    assert [int(x.split(",")[0]) for x in lines[1:]] == [e.m for e in enumerate_ps(1, 1000, "11/10")]


def test_mk_json(capsys):
    code, out, _ = run(capsys, "mk", "--k0", "100", "--degree", "3")
    d = json.loads(out)
    assert code == 0 and d["pass"] is True and d["k0"] == 100


def test_verify_identities(capsys):
    code, out, _ = run(capsys, "verify-identities", "--c", "11/10", "--X", "100000", "--k0", "5")
    d = json.loads(out)
    assert code == 0
    assert d["progression_identity"]["counterexamples"] == 0
    assert d["positivity_consequences"]["counterexamples"] == 0


def test_exit_codes(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "ps", "--nope")[0] == 2
    assert run(capsys, "mk", "--k0", "0")[0] == 0
    assert run(capsys, "sieve-check", "--c", "5/4", "--k0", "3")[0] == 2
    assert run(capsys, "smooth", "--c", "9/8", "--k0", "3")[0] == 2
    assert run(capsys, "witness", "--c", "5/4", "--k0", "3", "--X", "10000")[0] == 0
    assert run(capsys, "ps", "--c", "1/2", "--max", "10")[0] == 2
    assert run(capsys, "ps", "--c", "11/10")[0] == 2
    assert run(capsys, "density", "--X", "100")[0] == 2
    assert run(capsys, "verify-identities", "--X", "100000", "--k0", "5", "--max-precision-bits", "8")[0] in (0, 3)


def test_out_and_manifest(tmp_path, capsys):
    out = tmp_path / "clusters.csv"
    args = ["cluster", "--c", "11/10", "--k0", "10", "--range", "100:2000", "--min-primes", "3", "--out", str(out)]
    assert main(args) == 0
    first = out.read_bytes()
    man = json.loads((tmp_path / "clusters.csv.manifest.json").read_text())
    assert man["command"] == "cluster" and man["outputs"] == [str(out)]
    assert {"numpy", "scipy", "python", "psgap"} <= set(man["versions"])
    assert main(args + ["--threads", "8"]) == 0
    assert out.read_bytes() == first


def test_config_env(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("k0 = 4\ndegree = 1\n")
    monkeypatch.setenv("PSGAP_CONFIG", str(cfg))
    code, out, _ = run(capsys, "mk")
    assert code == 0 and json.loads(out)["k0"] == 4
    code, out, _ = run(capsys, "mk", "--k0", "6")
    assert json.loads(out)["k0"] == 6


def test_float_format():
    assert dump_json({"x": 0.1}) == '{\n  "x": 0.10000000000000001\n}'
    assert dump_json([float("nan")]) == "[\n  null\n]"


@pytest.mark.parametrize(
    "argv",
    [
        ["density", "--points", "1e4,1e5"],
        ["gaps", "--X", "100000"],
        ["witness", "--k0", "10", "--X", "100000"],
        ["sieve-check", "--k0", "2", "--X", "100000"],
        ["smooth", "--k0", "5", "--X", "100000", "--jmax", "4"],
        ["expsum", "--X", "10000", "--format", "json"],
        ["hb-check", "--X", "10000"],
        ["vdc", "--X", "100000"],
    ],
)
def test_every_command_runs(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    assert out
