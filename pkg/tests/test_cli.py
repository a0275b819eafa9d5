import json
import subprocess
import sys

import pytest

from jointkit.cli import main


def run(argv, capsys):
    rc = main(argv)
    out = capsys.readouterr()
    return rc, out.out, out.err


def _strip(doc):
    doc = dict(doc)
    doc.pop("provenance", None)
    return doc


def _strip_csv(text):
    return [l for l in text.splitlines() if not l.startswith("# timestamp")]


def test_generate_then_analyze(tmp_path, capsys):
    g = tmp_path / "g.json"
    assert main(["generate", "axis-grid", "--n", "3", "--N", "3", "--out", str(g)]) == 0
    rc, out, _ = run(["analyze", "joints", "--input", str(g)], capsys)
    assert rc == 0
    rep = json.loads(out)["report"]
    assert len(rep["joints"]) == 27 and rep["kakeya"]["ratio"] == pytest.approx(1.0)


def test_generate_is_deterministic(capsys):
    _, a, _ = run(["generate", "random-lines", "--n", "3", "--count", "15", "--field", "F_7", "--seed", "3"], capsys)
    _, b, _ = run(["generate", "random-lines", "--n", "3", "--count", "15", "--field", "F_7", "--seed", "3"], capsys)
    assert _strip(json.loads(a)) == _strip(json.loads(b))
    _, c, _ = run(["generate", "random-lines", "--n", "3", "--count", "15", "--field", "F_7", "--seed", "4"], capsys)
    assert _strip(json.loads(a)) != _strip(json.loads(c))


def test_ff_counterexample_levels(tmp_path, capsys):
    g = tmp_path / "ff.json"
    main(["generate", "ff-counterexample", "--p", "5", "--out", str(g)])
    rc, out, _ = run(["analyze", "levels", "--input", str(g)], capsys)
    assert rc == 0
    assert "4" in json.loads(out)["report"]["levels"]


def test_verify_structure_exit_codes(tmp_path, capsys):
    g = tmp_path / "lw.json"
    main(["generate", "loomis-whitney", "--N", "3", "--out", str(g)])
    assert run(["verify", "structure", "--input", str(g)], capsys)[0] == 0
    assert run(["verify", "structure", "--input", str(g), "--c1", "1"], capsys)[0] == 3
    b = tmp_path / "bush.json"
    main(["generate", "bush", "--M", "10", "--noncoplanar", "--out", str(b)])
    assert run(["verify", "structure", "--input", str(b), "--search"], capsys)[0] == 3


def test_vanish(tmp_path, capsys):
    spec = {"field": "Q", "n": 2, "constraints": [{"type": "point", "x": [str(t), str(t)], "m": 1} for t in range(3)]}
    f = tmp_path / "spec.json"
    f.write_text(json.dumps(spec))
    rc, out, _ = run(["vanish", "--input", str(f)], capsys)
    d = json.loads(out)
    assert rc == 0 and d["D"] == 1 and d["violations"] == []


def test_census(tmp_path, capsys):
    doc = {"field": "Q", "n": 3, "factors": [{"poly": p} for p in ("x1", "x2", "x3", "x1 + x2 + x3 - 1")]}
    f = tmp_path / "v.json"
    f.write_text(json.dumps(doc))
    rc, out, _ = run(["census", "--input", str(f)], capsys)
    d = json.loads(out)
    assert rc == 0 and d["critical"] == 6 and d["ok"]


def test_sweep_deterministic_and_columns(capsys):
    argv = ["sweep", "axis-grid", "--param", "N", "--range", "2..4", "--fixed", "n=3"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert _strip_csv(a) == _strip_csv(b)
    rows = [l for l in a.splitlines() if not l.startswith("#")]
    assert rows[0].split(",")[:3] == ["kind", "param", "value"]
    assert len(rows) == 4 and all(r.endswith(",ok") for r in rows[1:])


def test_sweep_empty_range(capsys):
    rc, out, _ = run(["sweep", "axis-grid", "--param", "N", "--range", "", "--fixed", "n=3"], capsys)
    assert rc == 0
    assert len([l for l in out.splitlines() if not l.startswith("#")]) == 1


def test_usage_errors(tmp_path, capsys):
    assert run(["generate", "bush", "--M", "1"], capsys)[0] == 2
    assert run(["generate", "ff-counterexample", "--p", "9"], capsys)[0] == 2
    g = tmp_path / "g.json"
    main(["generate", "axis-grid", "--n", "3", "--N", "2", "--out", str(g)])
    assert run(["analyze", "levels", "--input", str(g), "--eps", "1"], capsys)[0] == 2
    assert run(["analyze", "joints", "--input", str(tmp_path / "missing.json")], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2


def test_config_file_defaults(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "N": 2}))
    rc, out, _ = run(["generate", "axis-grid", "--config", str(cfg)], capsys)
    assert rc == 0 and json.loads(out)["config"]["params"] == {"n": 3, "N": 2}
    rc, out, _ = run(["generate", "axis-grid", "--config", str(cfg), "--N", "3"], capsys)
    assert json.loads(out)["config"]["params"]["N"] == 3
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(["generate", "axis-grid", "--config", str(cfg)], capsys)[0] == 2


def test_cap_exit_code():
    env = {"JOINTKIT_CAPS": "max_lines=10", "PATH": ""}
    r = subprocess.run([sys.executable, "-m", "jointkit", "generate", "axis-grid", "--n", "3", "--N", "3"], capture_output=True, text=True, env=env)
    assert r.returncode == 4 and "cap exceeded" in r.stderr
