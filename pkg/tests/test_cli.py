import csv
import io
import json
import subprocess
import sys

import pytest

from ngtrace.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_scenario2_identical(capsys):
    code, out, _ = run(capsys, "scenario2", "--dist", "identical", "--t", "8,16")
    got = rows(out)
    assert code == 0 and [r["t"] for r in got] == ["8", "16"]
    assert got[0]["max_error_exact"] == "109395/68719476736"
    assert float(got[1]["max_error"]) == 0


def test_scenario1_json(capsys, tmp_path):
    path = tmp_path / "s1.json"
    code, _, err = run(capsys, "scenario1", "--dist", "geometric", "--k", "8,16", "--eps", "0.1",
                       "--repeats", "2", "--format", "json", "--out", str(path))
    data = json.loads(path.read_text())
    assert code == 0 and len(data["rows"]) == 4
    assert data["metadata"]["rank_formula"] == "effrank"
    assert "satisfied" in err


def test_scenario1_deterministic(capsys):
    argv = ("scenario1", "--dist", "arithmetic", "--k", "16", "--eps", "0.01", "--repeats", "2", "--seed", "9")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_exact_oracle_and_fixed_rank(capsys):
    code, out, _ = run(capsys, "scenario1", "--dist", "identical", "--k", "32", "--eps", "1e-3",
                       "--repeats", "1", "--exact-oracle", "--rank-formula", "fixed:16")
    row = rows(out)[0]
    assert code == 0 and row["mode"] == "exact" and row["t"] == "16" and float(row["max_error"]) == 0


def test_failed_bound_exits_2(capsys):
    # two moments cannot carry a geometric spectrum to eps = 0.1 at k = 8
    code, out, _ = run(capsys, "appendixb", "--dist", "geometric", "--k", "8", "--eps", "0.1", "--repeats", "1")
    assert code == 2 and rows(out)[0]["satisfied"] == "False"


def test_estimate(capsys):
    code, out, _ = run(capsys, "estimate", "--dist", "one_dominant", "--k", "12", "--eps", "0.05", "--seed", "3")
    got = rows(out)
    assert code == 0 and len(got) == 12
    assert {r["source"] for r in got} == {"sampled", "extended"}


def test_estimate_from_file(capsys, tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"eigenvalues": ["1/2", "1/3", "1/6"]}))
    code, out, _ = run(capsys, "estimate", "--spectrum", str(path), "--k", "10", "--exact-oracle",
                       "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["metadata"]["t"] == 3
    assert all(r["error"] == 0 for r in data["rows"])


def test_detect(capsys):
    code, out, _ = run(capsys, "detect", "--state", "bell")
    assert code == 0 and rows(out)[0]["verdict"] == "entangled" and rows(out)[0]["index"] == "3"
    code, out, _ = run(capsys, "detect", "--state", "werner:0.3")
    assert rows(out)[0]["verdict"] == "inconclusive"
    code, out, _ = run(capsys, "detect", "--state", "random", "--repeats", "20", "--seed", "4")
    assert code == 0 and len(rows(out)) == 20


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "--dist", "arithmetic", "--t", "2-4", "--repeats", "5")
    got = rows(out)
    assert code == 0
    assert [r["check"] for r in got].count("perturbation") == 5
    assert [r["check"] for r in got].count("truncation") == 3


@pytest.mark.parametrize("argv", [
    ["scenario1", "--k", "eight"],
    ["scenario1", "--rank-formula", "fixed:x"],
    ["scenario2", "--dist", "cauchy"],
    ["scenario2", "--t", "17"],
    ["estimate", "--dist", "geometric,identical"],
    ["detect", "--state", "werner:abc"],
    ["nosuch"],
    [],
])
def test_usage_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as info:
        sys.exit(main(argv))
    assert info.value.code == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ngtrace", "scenario2", "--dist", "identical", "--t", "16"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("distribution,")
