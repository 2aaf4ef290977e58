import json
import subprocess
import sys

import pytest

from kmatrix import config
from kmatrix.cli import execute, main, regression_manifest

Z4 = {"rings": {"R": {"cyclic": 4}}, "ideals": {"I": {"ring": "R", "gens": [[2]]}}}


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def run(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_check_exit_codes(tmp_path, capsys):
    good = write(tmp_path, "t.json", dict(Z4, pattern={"kind": "T-thm2", "ring": "R", "n": 2,
                                                       "entries": {"1,2": "I"}}))
    code, out = run(capsys, ["check", good])
    assert code == 0 and out["pass"]

    doc = dict(Z4, ideals={"Z": {"ring": "R", "of": "zero"}},
               pattern={"kind": "S-thm2", "ring": "R", "n": 3, "entries": {"1,3": "Z"}})
    code, out = run(capsys, ["check", write(tmp_path, "bad.json", doc)])
    assert code == 1 and out["violations"][0]["witness"] is not None

    code, out = run(capsys, ["check", write(tmp_path, "broken.json", '{"rings": {\n  "R": }')])
    assert code == 2 and out["error"] == "ParseError" and "line 2" in out["message"]


def test_unresolved_reference(tmp_path, capsys):
    doc = dict(Z4, pattern={"kind": "T-thm2", "ring": "R", "n": 2, "entries": {"1,2": "missing"}})
    code, out = run(capsys, ["check", write(tmp_path, "u.json", doc)])
    assert code == 2 and out["error"] == "UnresolvedReference"


def test_schema_violation(tmp_path, capsys):
    code, out = run(capsys, ["check", write(tmp_path, "s.json", {"rings": {"R": {"cyclic": "four"}}})])
    assert code == 2


def test_verify_examples(tmp_path, capsys):
    p = write(tmp_path, "v.json", dict(Z4, bind={"ring": "R", "chain": {"2": "I"}, "shape": "T"}))
    code, out = run(capsys, ["verify", p, "--rule", "cor4.6"])
    assert code == 0 and [r["status"] for r in out["reports"]] == ["verified", "verified"]

    p = write(tmp_path, "t.json", dict(Z4, bind={"ring": "R", "ideal": "I", "upper": {"1,2": "I"}}))
    code, out = run(capsys, ["verify", p, "--rule", "thm1.1", "--mode", "integral"])
    assert code == 2 and out["error"] == "ModeConflict"
    code, out = run(capsys, ["verify", p, "--rule", "thm1.1", "--mode", "localized:2"])
    assert code == 0

    p = write(tmp_path, "l.json", dict(Z4, bind={"ring": "R", "I": "I", "J": "R", "n": 2}))
    code, out = run(capsys, ["verify", p, "--rule", "lemma5.2", "--degrees", "1"])
    assert code == 1 and out["error"] == "HypothesisFailed" and out["condition"] == "I^2 = I"

    code, out = run(capsys, ["verify", p, "--rule", "no-such-rule"])
    assert code == 2 and out["error"] == "UnknownRule"


def test_resource_cap_exit(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("KMATRIX_K1_CAP", "16")
    p = write(tmp_path, "v.json", dict(Z4, bind={"ring": "R", "chain": {"2": "I"}, "shape": "T"}))
    code, out = run(capsys, ["verify", p, "--rule", "cor4.6"])
    assert code == 3 and out["error"] == "SizeCapExceeded"


def test_config_file(tmp_path, capsys):
    cfg = write(tmp_path, "cfg.json", {"k1_cap": 99})
    code, out = run(capsys, ["--config", cfg, "--version", "--verbose"])
    assert code == 0 and out["config"]["k1_cap"] == 99 and out["defaults"]["k1_cap"] == config.DEFAULTS["k1_cap"]
    code, out = run(capsys, ["--config", write(tmp_path, "bad.json", {"nope": 1}), "--version"])
    assert code == 2


def test_build_mv_gv_ksym(tmp_path, capsys):
    pat = {"kind": "S-thm1", "ring": "R", "n": 2, "entries": {"1,2": "I", "2,1": "I"}, "roles": {"I": "I"}}
    p = write(tmp_path, "m.json", dict(Z4, pattern=pat))
    code, out = run(capsys, ["build", p, "--table"])
    assert code == 0 and out["size"] == 64 and "ring" in out
    code, out = run(capsys, ["mv", p])
    assert code == 0 and out["pass"]

    code, out = run(capsys, ["gv", write(tmp_path, "g.json", dict(Z4, gv={"ring": "R", "ideal": "I"}))])
    assert code == 1 and out["certificate"]["witness"]["element"] == [2]
    code, out = run(capsys, ["gv", write(tmp_path, "h.json", dict(Z4, gv={"ring": "R", "ideals": ["R", "I"]}))])
    assert code == 0

    code, out = run(capsys, ["ksym", "--example", "5"])
    assert code == 0 and out["match"]
    doc = {"ksym": {"label": "T", "degree": 1, "facts": [
        {"label": "R", "degree": "1", "group": {"rank": 0, "torsion": [2]}, "provenance": "units of Z/4"},
        {"label": "R/I", "degree": "1", "group": {"rank": 0, "torsion": []}, "provenance": "units of F2"}],
        "steps": [{"rule": "cor4.6", "bind": {"R": "R", "I": ["I"]}}]}}
    code, out = run(capsys, ["ksym", write(tmp_path, "k.json", doc)])
    assert code == 0 and out["values"]["1"]["text"] == "Z/2"


def test_suite_examples(tmp_path, capsys):
    code, out = run(capsys, ["suite", write(tmp_path, "empty.json", {"instances": []})])
    assert code == 0 and out["summary"] == {"total": 0, "passed": 0, "failed": []}

    write(tmp_path, "ok.json", dict(Z4, rule="cor4.6", bind={"ring": "R", "chain": {"2": "I"}, "shape": "T"}))
    crafted = dict(Z4, rule="lemma5.2", bind={"ring": "R", "I": "I", "J": "R", "n": 2})
    manifest = {"instances": [
        {"id": "b", "command": "verify", "file": "ok.json"},
        {"id": "a", "command": "verify", "instance": crafted},
    ]}
    code, out = run(capsys, ["suite", write(tmp_path, "man.json", manifest), "--workers", "2"])
    assert code == 1 and out["summary"]["failed"] == ["a"]
    assert list(out["results"]) == ["a", "b"]


def test_regression_manifest_passes():
    code, out = execute("suite", str(regression_manifest()), {"workers": 2})
    assert code == 0, out["summary"]
    assert out["summary"]["total"] >= 10


def test_output_byte_deterministic(tmp_path):
    p = write(tmp_path, "v.json", dict(Z4, bind={"ring": "R", "chain": {"2": "I"}, "shape": "T"}))
    cmd = [sys.executable, "-m", "kmatrix.cli", "verify", p, "--rule", "cor4.6"]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd, capture_output=True, check=False)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout


def test_no_command_is_input_error(capsys):
    assert main([]) == 2


@pytest.mark.parametrize("argv", [["--version"], ["--version", "--pretty"]])
def test_version(argv, capsys):
    code, out = run(capsys, argv)
    assert code == 0 and out["version"]
