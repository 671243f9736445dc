"""End-to-end checks for the command-line interface.

Each test drives ``mutalm.cli.main`` in process with a real argv list,
so argument parsing, exit codes, file outputs, and printed summaries
are all exercised exactly as a shell user would see them.
"""

import dataclasses
import json
import subprocess
import sys

import pytest

from mutalm.cli import main
from mutalm.factory import generate
from mutalm.files import load_campaign, load_mutant_set, save_mutant_set
from mutalm.harness import KillMatrix, load_kill_matrix, save_kill_matrix
from mutalm.minij import parse
from mutalm.predictor import PredictorConfig

COUNTER = """class Counter {
    int total;

    int bump(int amount) {
        if (amount > 0) {
            total += amount;
        }
        return total;
    }

    boolean anyYet() {
        return total > 0;
    }

    int drain() {
        while (total > 3) {
            total -= 2;
        }
        return total;
    }
}
"""

COUNTER_SUITE = {
    "tests": [
        {"name": "bump_positive", "entry": "Counter.bump",
         "args": [5], "expect": {"value": 5}},
        {"name": "bump_ignores_negative", "entry": "Counter.bump",
         "args": [-2], "expect": {"value": 0}},
        {"name": "any_yet_false_on_fresh", "entry": "Counter.anyYet",
         "args": [], "expect": {"value": False}},
        {"name": "drain_stays_at_zero", "entry": "Counter.drain",
         "args": [], "expect": {"value": 0}},
    ]
}


def run_cli(argv):
    """Invoke main() the way the console script would, capturing the code."""
    try:
        return main(argv)
    except SystemExit as exc:  # argparse usage errors exit directly
        return exc.code


@pytest.fixture()
def program_file(tmp_path):
    path = tmp_path / "counter.mj"
    path.write_text(COUNTER, encoding="utf-8")
    return path


@pytest.fixture()
def suite_file(tmp_path):
    path = tmp_path / "suite.json"
    path.write_text(json.dumps(COUNTER_SUITE), encoding="utf-8")
    return path


def mutate_into(tmp_path, program_file, name, extra=()):
    out = tmp_path / name
    code = run_cli(["mutate", str(program_file), "--seed", "3",
                    "--out", str(out), *extra])
    assert code == 0
    return out


# ------------------------------------------------------------------
# mutate
# ------------------------------------------------------------------

class TestMutate:
    def test_writes_set_and_diff_listing(self, tmp_path, program_file,
                                         capsys):
        out = mutate_into(tmp_path, program_file, "m")
        captured = capsys.readouterr()
        assert "generated" in captured.out
        mset = load_mutant_set(out / "mutants.json")
        assert mset.mutants
        diff_text = (out / "mutants.diff").read_text(encoding="utf-8")
        headers = [line for line in diff_text.splitlines()
                   if line.startswith("== ")]
        assert len(headers) == len(mset.mutants)
        assert "--- original" in diff_text

    def test_same_config_twice_is_byte_identical(self, tmp_path,
                                                 program_file):
        first = mutate_into(tmp_path, program_file, "a")
        second = mutate_into(tmp_path, program_file, "b")
        assert (first / "mutants.json").read_bytes() == \
            (second / "mutants.json").read_bytes()
        assert (first / "mutants.diff").read_bytes() == \
            (second / "mutants.diff").read_bytes()

    def test_quota_truncates_the_set(self, tmp_path, program_file):
        out = mutate_into(tmp_path, program_file, "q", ["--quota", "10"])
        mset = load_mutant_set(out / "mutants.json")
        assert len(mset.mutants) == 10

    def test_quota_zero_is_a_usage_error(self, tmp_path, program_file):
        code = run_cli(["mutate", str(program_file), "--quota", "0",
                        "--out", str(tmp_path)])
        assert code == 64

    def test_remote_mode_without_endpoint_is_a_usage_error(
            self, tmp_path, program_file, monkeypatch):
        monkeypatch.delenv("MUTALM_PREDICTOR_URL", raising=False)
        code = run_cli(["mutate", str(program_file),
                        "--predictor-mode", "remote",
                        "--out", str(tmp_path)])
        assert code == 64

    def test_unreachable_remote_endpoint_exits_3(self, tmp_path,
                                                 program_file, monkeypatch,
                                                 capsys):
        monkeypatch.delenv("MUTALM_PREDICTOR_URL", raising=False)
        code = run_cli(["mutate", str(program_file),
                        "--predictor-mode", "remote",
                        "--predictor-url", "http://127.0.0.1:9/predict",
                        "--out", str(tmp_path)])
        assert code == 3
        assert "error" in capsys.readouterr().err

    def test_endpoint_can_come_from_the_environment(self, tmp_path,
                                                    program_file,
                                                    monkeypatch):
        monkeypatch.setenv("MUTALM_PREDICTOR_URL",
                           "http://127.0.0.1:9/predict")
        code = run_cli(["mutate", str(program_file),
                        "--predictor-mode", "remote",
                        "--out", str(tmp_path)])
        assert code == 3  # reached the (dead) endpoint, not a usage error

    def test_program_that_fails_checking_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.mj"
        bad.write_text("class C { int f() { return true; } }",
                       encoding="utf-8")
        code = run_cli(["mutate", str(bad), "--out", str(tmp_path)])
        assert code == 2
        assert "does not validate" in capsys.readouterr().err

    def test_missing_program_file_exits_2(self, tmp_path):
        code = run_cli(["mutate", str(tmp_path / "absent.mj"),
                        "--out", str(tmp_path)])
        assert code == 2


# ------------------------------------------------------------------
# execute
# ------------------------------------------------------------------

class TestExecute:
    def test_reports_score_and_writes_matrix(self, tmp_path, program_file,
                                             suite_file, capsys):
        out = mutate_into(tmp_path, program_file, "m", ["--quota", "40"])
        capsys.readouterr()
        code = run_cli(["execute", str(out / "mutants.json"),
                        str(suite_file), "--out", str(out)])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "mutation score: " in stdout
        matrix = load_kill_matrix(out / "kill_matrix.json")
        assert len(matrix.mutant_ids) == 40
        assert matrix.test_names == tuple(
            t["name"] for t in COUNTER_SUITE["tests"])

    def test_empty_mutant_set_scores_na(self, tmp_path, program_file,
                                        suite_file, capsys):
        mset = generate(parse(COUNTER), PredictorConfig(), quota=1,
                        seed=0, program_id="counter.mj")
        empty = dataclasses.replace(mset, mutants=())
        set_path = tmp_path / "empty.json"
        save_mutant_set(empty, set_path, str(program_file))
        code = run_cli(["execute", str(set_path), str(suite_file),
                        "--out", str(tmp_path)])
        assert code == 0
        assert "mutation score: n/a" in capsys.readouterr().out

    def test_suite_with_unknown_entry_exits_2(self, tmp_path, program_file,
                                              capsys):
        out = mutate_into(tmp_path, program_file, "m", ["--quota", "5"])
        suite = tmp_path / "broken_suite.json"
        suite.write_text(json.dumps({"tests": [
            {"name": "ghost", "entry": "Counter.noSuchMethod",
             "args": [], "expect": {"value": 0}}]}), encoding="utf-8")
        code = run_cli(["execute", str(out / "mutants.json"), str(suite),
                        "--out", str(out)])
        assert code == 2

    def test_unparseable_suite_json_exits_2(self, tmp_path, program_file):
        out = mutate_into(tmp_path, program_file, "m", ["--quota", "5"])
        suite = tmp_path / "mangled.json"
        suite.write_text("{not json", encoding="utf-8")
        code = run_cli(["execute", str(out / "mutants.json"), str(suite),
                        "--out", str(out)])
        assert code == 2

    def test_worker_count_does_not_change_the_matrix(self, tmp_path,
                                                     program_file,
                                                     suite_file):
        out = mutate_into(tmp_path, program_file, "m", ["--quota", "30"])
        serial = tmp_path / "serial"
        parallel = tmp_path / "parallel"
        for dest, jobs in ((serial, "1"), (parallel, "8")):
            code = run_cli(["execute", str(out / "mutants.json"),
                            str(suite_file), "--jobs", jobs,
                            "--out", str(dest)])
            assert code == 0
        assert (serial / "kill_matrix.json").read_bytes() == \
            (parallel / "kill_matrix.json").read_bytes()

    def test_buggy_program_marks_revealing_tests(self, tmp_path,
                                                 program_file, suite_file):
        buggy = tmp_path / "buggy.mj"
        # Breaks bump() for negative amounts: the guard is dropped.
        buggy.write_text(COUNTER.replace(
            "if (amount > 0) {\n            total += amount;\n        }",
            "total += amount;"), encoding="utf-8")
        out = mutate_into(tmp_path, program_file, "m", ["--quota", "5"])
        code = run_cli(["execute", str(out / "mutants.json"),
                        str(suite_file), "--buggy", str(buggy),
                        "--out", str(out)])
        assert code == 0
        matrix = load_kill_matrix(out / "kill_matrix.json")
        assert matrix.revealing_tests == ("bump_ignores_negative",)


# ------------------------------------------------------------------
# simulate
# ------------------------------------------------------------------

@pytest.fixture()
def matrix_file(tmp_path, program_file, suite_file):
    buggy = tmp_path / "buggy.mj"
    buggy.write_text(COUNTER.replace(
        "if (amount > 0) {\n            total += amount;\n        }",
        "total += amount;"), encoding="utf-8")
    out = mutate_into(tmp_path, program_file, "sim", ["--quota", "25"])
    code = run_cli(["execute", str(out / "mutants.json"), str(suite_file),
                    "--buggy", str(buggy), "--approach", "masked",
                    "--out", str(out)])
    assert code == 0
    return out / "kill_matrix.json"


class TestSimulate:
    def test_writes_campaign_and_prints_ratio(self, tmp_path, matrix_file,
                                              capsys):
        capsys.readouterr()
        code = run_cli(["simulate", str(matrix_file), "--repetitions", "40",
                        "--seed", "7", "--out", str(tmp_path / "c")])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "detection ratio: " in stdout
        result = load_campaign(tmp_path / "c" / "campaign.json")
        assert result.repetitions == 40
        assert result.approach == "masked"
        assert 0.0 <= result.detection_ratio <= 1.0

    def test_same_seed_is_byte_identical(self, tmp_path, matrix_file):
        for name in ("one", "two"):
            code = run_cli(["simulate", str(matrix_file),
                            "--repetitions", "40", "--seed", "7",
                            "--out", str(tmp_path / name)])
            assert code == 0
        assert (tmp_path / "one" / "campaign.json").read_bytes() == \
            (tmp_path / "two" / "campaign.json").read_bytes()

    def test_different_seeds_usually_differ(self, tmp_path, matrix_file):
        ratios = set()
        for seed in ("1", "2", "3", "4"):
            out = tmp_path / f"s{seed}"
            code = run_cli(["simulate", str(matrix_file), "--seed", seed,
                            "--repetitions", "40", "--out", str(out)])
            assert code == 0
            result = load_campaign(out / "campaign.json")
            ratios.add(tuple(result.detection_curve))
        assert len(ratios) > 1

    def test_auto_cap_is_rejected_for_a_single_matrix(self, tmp_path,
                                                      matrix_file):
        code = run_cli(["simulate", str(matrix_file), "--effort-cap", "auto",
                        "--out", str(tmp_path)])
        assert code == 64

    def test_numeric_effort_cap_is_honoured(self, tmp_path, matrix_file):
        code = run_cli(["simulate", str(matrix_file), "--effort-cap", "4",
                        "--repetitions", "20", "--out", str(tmp_path / "n")])
        assert code == 0
        result = load_campaign(tmp_path / "n" / "campaign.json")
        assert result.effort_cap == 4
        assert len(result.detection_curve) == 4


# ------------------------------------------------------------------
# compare
# ------------------------------------------------------------------

def synthetic_matrix(path, revealing_killed: bool, approach=""):
    """Three mutants, two tests; t2 is the revealing test for the bug."""
    kills = ((True, revealing_killed),
             (True, False),
             (False, revealing_killed))
    matrix = KillMatrix(
        mutant_ids=("2:literal:0:aaaaaaaa", "3:identifier:1:bbbbbbbb",
                    "5:binary-operator:0:cccccccc"),
        test_names=("t1", "t2"),
        kills=kills,
        revealing_tests=("t2",),
        approach=approach)
    save_kill_matrix(matrix, path)
    return path


@pytest.fixture()
def manifest_file(tmp_path):
    strong_a = synthetic_matrix(tmp_path / "strong_a.json", True, "strong")
    strong_b = synthetic_matrix(tmp_path / "strong_b.json", True, "strong")
    weak_a = synthetic_matrix(tmp_path / "weak_a.json", False, "weak")
    weak_b = synthetic_matrix(tmp_path / "weak_b.json", False, "weak")
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({"bugs": [
        {"bug": "bug-a", "matrices": {"strong": strong_a.name,
                                      "weak": weak_a.name}},
        {"bug": "bug-b", "matrices": {"strong": strong_b.name,
                                      "weak": weak_b.name}},
    ]}), encoding="utf-8")
    return manifest


class TestCompare:
    def test_report_and_curves_are_written(self, tmp_path, manifest_file,
                                           capsys):
        out = tmp_path / "cmp"
        code = run_cli(["compare", str(manifest_file), "--seed", "11",
                        "--repetitions", "60", "--out", str(out)])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "strong_vs_weak" in stdout
        report = json.loads((out / "comparison.json").read_text())
        assert set(report["detection_ratios"]) == {"strong", "weak"}
        assert set(report["detection_ratios"]["strong"]) == \
            {"bug-a", "bug-b"}
        assert report["summaries"]["strong_vs_weak"]["p_value"] <= 1.0
        lines = (out / "curves.csv").read_text().splitlines()
        assert lines[0] == "bug,approach,effort_fraction,detection_rate"
        # one row per (bug, approach, integer effort)
        total_cap = sum(report["effort_caps"].values())
        assert len(lines) - 1 == 2 * total_cap

    def test_strong_approach_dominates_weak(self, tmp_path, manifest_file):
        out = tmp_path / "cmp"
        run_cli(["compare", str(manifest_file), "--repetitions", "80",
                 "--out", str(out)])
        report = json.loads((out / "comparison.json").read_text())
        strong = report["detection_ratios"]["strong"]
        weak = report["detection_ratios"]["weak"]
        assert all(weak[b] == 0.0 for b in weak)
        assert all(strong[b] > 0.0 for b in strong)
        assert report["summaries"]["strong_vs_weak"]["a12"] == 1.0

    def test_matrix_compared_against_itself_is_a_wash(self, tmp_path):
        path = synthetic_matrix(tmp_path / "m.json", True)
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps({"bugs": [
            {"bug": "bug-a",
             "matrices": {"left": "m.json", "right": "m.json"}},
            {"bug": "bug-b",
             "matrices": {"left": "m.json", "right": "m.json"}},
        ]}), encoding="utf-8")
        out = tmp_path / "cmp"
        code = run_cli(["compare", str(manifest), "--repetitions", "50",
                        "--out", str(out)])
        assert code == 0
        report = json.loads((out / "comparison.json").read_text())
        summary = report["summaries"]["left_vs_right"]
        assert summary["p_value"] == 1.0
        assert summary["a12"] == 0.5
        assert summary["n_effective"] == 0

    def test_two_runs_are_byte_identical(self, tmp_path, manifest_file):
        for name in ("one", "two"):
            code = run_cli(["compare", str(manifest_file), "--seed", "5",
                            "--repetitions", "60",
                            "--out", str(tmp_path / name)])
            assert code == 0
        for artifact in ("comparison.json", "curves.csv"):
            assert (tmp_path / "one" / artifact).read_bytes() == \
                (tmp_path / "two" / artifact).read_bytes()

    def test_auto_caps_are_positive_integers(self, tmp_path, manifest_file):
        out = tmp_path / "cmp"
        run_cli(["compare", str(manifest_file), "--effort-cap", "auto",
                 "--out", str(out)])
        report = json.loads((out / "comparison.json").read_text())
        for cap in report["effort_caps"].values():
            assert isinstance(cap, int) and cap >= 1

    def test_ragged_manifest_exits_2(self, tmp_path):
        synthetic_matrix(tmp_path / "m.json", True)
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps({"bugs": [
            {"bug": "bug-a",
             "matrices": {"left": "m.json", "right": "m.json"}},
            {"bug": "bug-b",
             "matrices": {"left": "m.json", "centre": "m.json"}},
        ]}), encoding="utf-8")
        code = run_cli(["compare", str(manifest), "--out", str(tmp_path)])
        assert code == 2


# ------------------------------------------------------------------
# parser plumbing
# ------------------------------------------------------------------

class TestParserPlumbing:
    def test_no_subcommand_is_a_usage_error(self):
        assert run_cli([]) == 64

    def test_unknown_subcommand_is_a_usage_error(self):
        assert run_cli(["frobnicate"]) == 64

    def test_help_exits_cleanly(self, capsys):
        assert run_cli(["--help"]) == 0
        assert "mutate" in capsys.readouterr().out

    def test_module_is_runnable_as_a_script(self):
        proc = subprocess.run(
            [sys.executable, "-m", "mutalm.cli", "--help"],
            capture_output=True, text=True, timeout=60)
        assert proc.returncode == 0
        assert "usage:" in proc.stdout
