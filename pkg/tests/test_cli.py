from __future__ import annotations

import json
import subprocess
import sys

import pytest

from genforms.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_json(capsys):
    code, out, _ = run(capsys, "classify", "--D", "2", "--format", "json")
    data = json.loads(out)
    assert code == 0 and len(data["survivors"]) == 15 and len(data["candidates"]) == 36


def test_classify_text(capsys):
    code, out, _ = run(capsys, "classify", "--D", "7")
    assert code == 0 and "survivors (1): 49: 2 4 7 0 0 2" in out


def test_represent_indef(capsys):
    code, out, _ = run(capsys, "represent-indef", "--D", "2", "--a", "7", "--format", "json")
    data = json.loads(out)
    x, y, z, w = data["witness"]
    assert code == 0 and data["verified"] and x * x + y * y - 2 * z * z - 2 * w * w == 7
    assert [t["p"] for t in data["local"]] == [2]
    code, out, _ = run(capsys, "represent-indef", "--D", "6", "--a", "-35")
    assert code == 0 and "p = 3:" in out
    code, _, err = run(capsys, "represent-indef", "--D", "3", "--a", "-1000", "--budget", "1")
    assert code == 1 and "no representation" in err
    code, _, _ = run(capsys, "represent-indef", "--D", "4", "--a", "1")
    assert code == 2


def test_check_universal(capsys):
    code, out, _ = run(capsys, "check-universal", "--bhargava", "36: 2 3 6 0 0 0", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["missing"] == []
    code, out, _ = run(capsys, "check-universal", "--matrix", "[[1,0,0,0],[0,2,0,0],[0,0,5,0],[0,0,0,5]]")
    assert code == 1 and "15" in out
    code, _, _ = run(capsys, "check-universal", "--matrix", "[[1,0],[0,2]]", "--critical", "290")
    assert code == 1
    code, _, _ = run(capsys, "check-universal", "--bhargava", "37: 2 3 6 0 0 0")
    assert code == 2


def test_verify_witnesses(capsys):
    code, out, _ = run(capsys, "verify-witnesses", "--D", "10")
    assert code == 0 and "1/1 witnesses verified" in out


def test_assoc(capsys, tmp_path):
    form = tmp_path / "g.json"
    form.write_text(json.dumps({"D": 2, "sextuple": ["1", "-1w", "1", "-1", "0", "-1"]}))
    code, out, _ = run(capsys, "assoc", str(form), "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["M_Q"] == [[1, 0, 0, -2], [0, 6, -2, 0], [0, -2, 1, 0], [-2, 0, 0, 6]]
    assert data["det_law_holds"] and data["ranks_mod_p"] == {"2": 2}
    code, out, _ = run(capsys, "assoc", "--random", "20", "--D", "5", "--seed", "3")
    assert code == 0
    code, out2, _ = run(capsys, "--seed", "3", "assoc", "--random", "20", "--D", "5")
    assert out2 == out


def test_rewrite(capsys, tmp_path):
    poly = tmp_path / "p.json"
    poly.write_text(json.dumps({"D": 3, "n": 1, "terms": [{"i": [1], "j": [1], "c": "1"}]}))
    code, out, _ = run(capsys, "rewrite", str(poly), "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["round_trip"]


def test_two_adic(capsys):
    code, out, _ = run(capsys, "two-adic", "--matrix", "[[1,0,0,0],[0,2,0,0],[0,0,1,0],[0,0,0,2]]")
    assert code == 0 and "canonical symbol [1^+2_4, 2^+2_0]" in out
    code, out, _ = run(capsys, "two-adic", "--bhargava", "4: 1 2 2 0 0 0", "--format", "json")
    assert code == 0 and "symbol" in json.loads(out)


def test_errors(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["classify", "--D", "11"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    code, _, err = run(capsys, "classify", "--D", "2", "--data-dir", str(tmp_path / "missing"))
    assert code == 2 and "error" in err
    code, _, _ = run(capsys, "rewrite", str(tmp_path / "nope.json"))
    assert code == 2


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "genforms.cli", "represent-indef", "--D", "5", "--a", "0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "(1, 2, 1, 0)" in proc.stdout
