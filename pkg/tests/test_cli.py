import json
import subprocess
import sys

import pytest

from bsv.cli import main


def run(*argv):
    return subprocess.run([sys.executable, "-m", "bsv", *argv], capture_output=True, text=True)


def write_candidate(tmp_path, obj):
    path = tmp_path / "candidate.json"
    path.write_text(json.dumps(obj))
    return str(path)


def test_ideals_listing(capsys):
    assert main(["ideals", "--n", "2", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["count"] == 6 and len(out["ideals"]) == 6 and out["schema"] == "1"
    assert main(["ideals", "--n", "1"]) == 0
    assert capsys.readouterr().out.startswith("2 ideals for n=1")


def test_ideals_census(capsys):
    assert main(["ideals", "--n", "3", "--census", "--json"]) == 0
    census = json.loads(capsys.readouterr().out)["census"]
    assert census["subsets_scanned"] == 64
    assert census["b_stable_lie_ideals_not_b_S"] == []


def test_capacity_exit_code(capsys):
    assert main(["ideals", "--n", "5"]) == 2
    assert "max_n" in capsys.readouterr().err


def test_verify_n2(capsys):
    assert main(["verify", "--n", "2"]) == 0
    assert "6/6 ideals pass" in capsys.readouterr().out


def test_verify_parabolic(capsys):
    assert main(["verify", "--n", "3", "--parabolic", "1,1,1", "--json", "--no-timing"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["passed"] and len(out["steps"]) == 3


def test_verify_single_ideal(capsys):
    assert main(["verify", "--n", "2", "--ideal", "[[2,1],[1,1]]"]) == 0
    assert "PASS" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["verify", "--n", "3", "--ideal", "[[1,1]]"],
    ["verify", "--n", "3", "--ideal", "[[2,1],[1,1"],
    ["verify", "--n", "3", "--parabolic", "1,1"],
    ["verify", "--n", "3", "--parabolic", "a,b"],
    ["verify", "--n", "2", "--jobs", "0"],
])
def test_verify_bad_selectors(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err.startswith("bsv: error:")


def test_argparse_errors_exit_2():
    proc = run("verify")
    assert proc.returncode == 2


def test_split_all_variables(tmp_path, capsys):
    lit = "*".join(["u21", "x11", "x12", "x22"])
    path = write_candidate(tmp_path, {"factors": [{"atom": {"lit": lit}, "exp": 1}], "outer": 1})
    assert main(["split", path, "--n", "2", "--p", "2", "--json", "--expect-split"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["splits"] and len(report["ideals"]) == 6
    assert all(row["compatibly_split"] for row in report["ideals"])


def test_split_incompatible_analogue(tmp_path, capsys):
    # x11 plays x and x12 plays y in xy + y^2, padded to a full chart monomial
    lit = "x11*x12*u21*x22 + x12^2*u21*x22"
    path = write_candidate(tmp_path, {"factors": [{"atom": {"lit": lit}, "exp": 1}], "n": 2})
    assert main(["split", path, "--n", "2", "--p", "2", "--json",
                 "--ideal", "[[2,1],[1,1]]"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["splits"]
    (row,) = report["ideals"]
    assert not row["compatibly_split"]
    (var,) = row["variables"]
    assert var["variable"] == "x11" and var["witness"]["multiplier"] == "x12"
    assert main(["split", path, "--n", "2", "--p", "2", "--ideal", "[[2,1],[1,1]]",
                 "--expect-split"]) == 1


def test_split_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["split", str(bad), "--n", "2", "--p", "2"]) == 2
    good = write_candidate(tmp_path, {"factors": []})
    assert main(["split", good, "--n", "2"]) == 2
    assert main(["split", good, "--n", "2", "--p", "4"]) == 2
    assert main(["split", str(tmp_path / "missing.json"), "--n", "2", "--p", "2"]) == 2
    assert main(["split", good, "--n", "2", "--p", "2", "--expect-split"]) == 1


def test_verify_jobs_are_byte_identical():
    one = run("verify", "--n", "3", "--json", "--no-timing", "--jobs", "1")
    many = run("verify", "--n", "3", "--json", "--no-timing", "--jobs", "8")
    assert one.returncode == many.returncode == 0
    assert one.stdout == many.stdout


def test_cache_dir_does_not_change_output(tmp_path):
    plain = run("verify", "--n", "2", "--json", "--no-timing")
    cold = run("verify", "--n", "2", "--json", "--no-timing", "--cache-dir", str(tmp_path))
    warm = run("verify", "--n", "2", "--json", "--no-timing", "--cache-dir", str(tmp_path))
    assert plain.stdout == cold.stdout == warm.stdout
    assert list(tmp_path.rglob("*.poly"))
