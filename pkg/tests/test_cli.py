import json
import subprocess
import sys

import pytest

from redtypes.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_chain(capsys):
    assert run(capsys, "chain", "inner", "8", "5", "4", "3", "--", "-1")[:2] == (0, "8 5 2 3 4\n")
    assert run(capsys, "chain", "inner", "8", "5", "4", "3", "--depth", "-1")[:2] == (0, "8 5 2 3 4\n")
    assert run(capsys, "chain", "outer", "8", "5", "--json")[:2] == (0, "[8, 5, 2, 1]\n")
    code, _, err = run(capsys, "chain", "inner", "5", "3", "5", "3", "--", "-1")
    assert code == 1 and "minimum" in err
    assert run(capsys, "chain", "inner", "8", "5")[0] == 2


def test_onepath(capsys):
    code, out, _ = run(capsys, "onepath", "19/23", "16/23")
    assert code == 0 and out.split() == "19/23 14/17 9/11 4/5 3/4 5/7 7/10 16/23".split()
    assert run(capsys, "onepath", "x", "1/2")[0] == 2


def test_counts(capsys):
    assert run(capsys, "families", "--genus", "2", "--count")[:2] == (0, "104\n")
    assert run(capsys, "families", "--genus", "2", "--count", "--semistable")[:2] == (0, "7\n")
    assert run(capsys, "shapes", "--genus", "3", "--count")[:2] == (0, "35\n")
    assert run(capsys, "cores", "--chi", "-2")[1].count("\n") == 16
    assert run(capsys, "types", "--chi", "-1")[1].count("\n") == 13
    code, out, _ = run(capsys, "types", "--chi", "-1", "--by-shape", "--json")
    assert sorted(len(v) for v in json.loads(out).values()) == [1, 1, 1, 10]
    assert run(capsys, "cores", "--chi", "2")[0] == 1


def test_parse_label_pipeline(capsys, tmp_path):
    code, out, _ = run(capsys, "parse", "II*", "--json")
    f = json.loads(out)
    assert code == 0 and [c["m"] for c in f["components"]][0] == 6 and len(f["components"]) == 9
    lab = "I*_0-(1)I-(1)II&III*-(0)c2"
    code, out, _ = run(capsys, "parse", lab, "--json")
    p = tmp_path / "f.json"
    p.write_text(out)
    assert run(capsys, "label", str(p))[1] == lab + "\n"
    assert run(capsys, "validate", str(p))[:2] == (0, "ok\n")
    assert run(capsys, "genus", str(p))[1] == "3\n"
    code, out, err = run(capsys, "parse", "I*_0-(")
    assert code == 2 and "position" in err


def test_families_json_idempotent(capsys, tmp_path):
    code, out, _ = run(capsys, "families", "--genus", "2", "--json")
    rows = json.loads(out)
    assert [r["label"] for r in rows] == sorted(r["label"] for r in rows)
    for r in rows[:20]:
        p = tmp_path / "x.json"
        p.write_text(json.dumps(r["fibre"]))
        assert run(capsys, "label", str(p))[1] == r["label"] + "\n"


def test_families_jobs_identical(capsys):
    a = run(capsys, "families", "--genus", "3", "--jobs", "1")[1]
    b = run(capsys, "families", "--genus", "3", "--jobs", "2")[1]
    assert a == b and a.count("\n") == 1901


def test_invalid_inputs(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"components":[{"id":0,"m":2}],"intersections":[]}')
    code, out, _ = run(capsys, "validate", str(p))
    assert code == 1 and "genus" in out
    assert run(capsys, "label", str(p))[0] == 1
    p.write_text("not json")
    assert run(capsys, "label", str(p))[0] == 2
    assert run(capsys, "label", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "bogus")[0] == 2


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "redtypes", "chain", "outer", "8", "5"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "8 5 2 1\n"
