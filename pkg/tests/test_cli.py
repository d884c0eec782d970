import json
import subprocess
import sys

import pytest

from toricforms.cli import main, parse_levels


def run(args, tmp_path, name="r.json"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, json.loads(out.read_text()), out.read_bytes()


def test_parse_levels():
    assert parse_levels(["11"]) == [11]
    assert parse_levels(["11,13", "17"]) == [11, 13, 17]
    assert parse_levels(["11-14"]) == [11, 12, 13, 14]


def test_invalid_level_exits_2(capsys):
    assert main(["space", "--level", "1"]) == 2
    assert main(["space", "--level", "x"]) == 2


def test_space(tmp_path):
    code, rep, _ = run(["space", "--level", "11,13"], tmp_path)
    assert code == 0
    assert rep["schema"] == "toricforms.report/1"
    r11, r13 = rep["results"]
    assert r11["dim S+"] == "1" and r13["dim S"] == "4"
    assert r11["cusps"] == "10"
    assert r11["eisensteinRank"] == r11["eisensteinExpected"] == "9"


def test_qexp(tmp_path, capsys):
    code, rep, _ = run(["qexp", "--level", "5", "--prec", "6", "--kind", "s", "--a", "1"], tmp_path)
    assert code == 0
    res = rep["results"][0]
    assert len(res["coefficients"]) == 6
    assert "q^1" in capsys.readouterr().out
    code, rep, _ = run(["qexp", "--level", "7", "--kind", "product", "--a", "1", "--b", "1"], tmp_path)
    assert rep["results"][0]["modEisensteinZero"] is True
    assert main(["qexp", "--level", "7", "--kind", "product", "--a", "1"]) == 2


def test_verify_relation_and_determinism(tmp_path, monkeypatch):
    monkeypatch.delenv("TORICFORMS_CACHE_DIR", raising=False)
    cache = tmp_path / "cache"
    base = ["verify", "--level", "7", "--suite", "relation", "--jobs", "1"]
    c1, rep, cold = run([*base, "--cache-dir", str(cache)], tmp_path, "a.json")
    c2, _, warm = run([*base, "--cache-dir", str(cache)], tmp_path, "b.json")
    c3, _, nocache = run([*base, "--no-cache"], tmp_path, "c.json")
    assert c1 == c2 == c3 == 0
    assert cold == warm == nocache
    assert any(cache.rglob("*"))
    check = rep["results"][0]["checks"][0]
    assert check["pass"] is True and check["witness"]["triples"] == "30"
    assert "timings" not in rep["results"][0]


def test_parallel_matches_serial(tmp_path):
    base = ["verify", "--level", "7,11", "--suite", "main", "--no-cache"]
    _, _, serial = run([*base, "--jobs", "1"], tmp_path, "s.json")
    _, rep, par = run([*base, "--jobs", "2"], tmp_path, "p.json")
    assert serial == par
    assert [r["checks"][0]["witness"]["toricDim"] for r in rep["results"]] == ["0", "1"]


def test_low_precision_is_a_precondition_error(tmp_path):
    assert main(["verify", "--level", "11", "--suite", "relation", "--prec", "5", "--no-cache"]) == 2
    code = main(["verify", "--level", "11", "--suite", "relation", "--prec", "5", "--allow-low-precision", "--no-cache"])
    assert code in (0, 1)


def test_timing_flag(tmp_path):
    _, rep, _ = run(["verify", "--level", "5", "--suite", "keytheorem", "--timing", "--no-cache"], tmp_path)
    assert "elapsedSeconds" in rep
    assert "timings" in rep["results"][0]


def test_failed_check_exits_1(tmp_path, monkeypatch):
    import toricforms.suites as suites

    monkeypatch.setitem(suites.KNOWN_CODIMENSION, 11, 99)
    code, rep, _ = run(["verify", "--level", "11", "--suite", "eiscodim", "--no-cache", "--jobs", "1"], tmp_path)
    assert code == 1 and rep["pass"] is False


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "toricforms", "space", "--level", "5"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "dim M = 3" in proc.stdout
