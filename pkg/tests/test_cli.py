"""End-to-end checks of the command-line interface.

Everything runs in-process through ``csts.cli.main`` so the suite stays
fast; one subprocess test proves the installed console script works.
"""

import json
import subprocess
import sys

import pytest

from csts.cli import main
from csts.ingestion import EXAMPLE_EVENTS_FILE

FIXTURE = str(EXAMPLE_EVENTS_FILE)

BASE = ["mine", "--input", FIXTURE, "--radius", "10", "--window", "20"]


def run_records(tmp_path, name, argv):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    assert code == 0
    return [json.loads(line) for line in out.read_text().splitlines()]


def patterns_of(records):
    return [r for r in records if r["record"] == "pattern"]


def run_of(records):
    (rec,) = [r for r in records if r["record"] == "run"]
    return rec


# ---------------------------------------------------------------------------
# mine
# ---------------------------------------------------------------------------

class TestMine:
    def test_csts_run_counts_and_ratios(self, tmp_path):
        recs = run_records(tmp_path, "run.jsonl", BASE + [
            "--theta", "0.2", "--epsilon", "0.25", "--algorithm", "csts"])
        run = run_of(recs)
        assert run["counts"] == {"all": 26, "closed": 14, "csts": 8}
        assert run["ratios"]["csts_over_all"] == "4/13"
        assert run["ratios"]["csts_over_closed"] == "4/7"
        assert run["depth"] == 6 and run["capped"] is False
        assert run["types"] == ["A", "B", "C", "D", "E"]
        assert run["config"]["theta"] == "1/5"
        assert run["config"]["epsilon"] == "1/4"
        assert run["config"]["theta_strictness"] == "gt"

    def test_pattern_records_complete_and_sorted(self, tmp_path):
        recs = run_records(tmp_path, "run.jsonl", BASE + [
            "--theta", "0.2", "--epsilon", "0.25", "--algorithm", "csts"])
        pats = patterns_of(recs)
        assert len(pats) == 26
        keys = [(r["length"], tuple(r["pattern"].split("->"))) for r in pats]
        assert keys == sorted(keys)
        by_name = {r["pattern"]: r for r in pats}
        bbd = by_name["B->B->D"]
        assert bbd["pi"] == "1/3" and bbd["pi_decimal"] == pytest.approx(1 / 3)
        assert by_name["A->B->C"]["pi"] == "3/8"
        assert by_name["C->E"]["pi"] == "4/5"
        full = by_name["A->B->B->C->E->C"]
        assert full["pi"] == "1/4" and full["csts"] is True
        # every member of its own cmax once self-augmented
        assert full["cmax_size"] == 1 and full["rcmax_size"] >= 1
        members = {r["pattern"] for r in pats if r["csts"]}
        assert members == {"A", "B->D", "C->E", "A->B->D", "B->B->D",
                           "B->B->C->E", "A->B->C->E->C", "A->B->B->C->E->C"}

    def test_dataset_record_row_accounting(self, tmp_path):
        recs = run_records(tmp_path, "run.jsonl", BASE + [
            "--theta", "0.2", "--algorithm", "all"])
        (ds,) = [r for r in recs if r["record"] == "dataset"]
        assert ds["rows_read"] == ds["instances"] + sum(ds["rejected"].values())
        assert ds["instances"] == 61 and ds["types"] == 5

    def test_algorithm_all_leaves_closure_fields_null(self, tmp_path):
        recs = run_records(tmp_path, "run.jsonl", BASE + [
            "--theta", "0.2", "--algorithm", "all"])
        run = run_of(recs)
        assert run["counts"] == {"all": 26, "closed": None, "csts": None}
        assert run["ratios"]["csts_over_all"] is None
        for rec in patterns_of(recs):
            assert rec["closed"] is None and rec["csts"] is None
            assert rec["cmax_size"] is None and rec["rcmax_size"] is None

    def test_algorithm_closed_flags_without_csts(self, tmp_path):
        recs = run_records(tmp_path, "run.jsonl", BASE + [
            "--theta", "0.2", "--algorithm", "closed"])
        run = run_of(recs)
        assert run["counts"]["closed"] == 14 and run["counts"]["csts"] is None
        closed = {r["pattern"] for r in patterns_of(recs) if r["closed"]}
        assert "B->B" in closed and "B->C->E" not in closed
        assert all(r["csts"] is None for r in patterns_of(recs))

    def test_oracle_mode_matches_tree_mode_record_for_record(self, tmp_path):
        args = ["--theta", "0.2", "--epsilon", "0.25"]
        tree = run_records(tmp_path, "t.jsonl",
                           BASE + args + ["--algorithm", "csts"])
        oracle = run_records(tmp_path, "o.jsonl",
                             BASE + args + ["--algorithm", "oracle"])
        assert patterns_of(tree) == patterns_of(oracle)
        assert run_of(tree)["counts"] == run_of(oracle)["counts"]

    def test_records_to_stdout_summary_to_stderr(self, capsys):
        assert main(BASE + ["--theta", "0.2", "--algorithm", "all"]) == 0
        captured = capsys.readouterr()
        records = [json.loads(line) for line in
                   captured.out.strip().splitlines()]
        assert {r["record"] for r in records} == {"dataset", "run", "pattern"}
        assert "time:" in captured.err
        assert "topdown=" not in captured.out and "load=" not in captured.out

    def test_synthetic_input(self, tmp_path):
        recs = run_records(tmp_path, "syn.jsonl", [
            "mine", "--synthetic", "4,60", "--seed", "3",
            "--radius", "25", "--window", "60",
            "--theta", "0.25", "--epsilon", "0.1", "--algorithm", "csts"])
        (ds,) = [r for r in recs if r["record"] == "dataset"]
        assert ds["instances"] == 60 and ds["rows_read"] is None
        run = run_of(recs)
        assert run["counts"]["all"] > 0
        assert run["counts"]["csts"] <= run["counts"]["closed"]

    def test_max_length_reports_capped(self, tmp_path):
        recs = run_records(tmp_path, "cap.jsonl", BASE + [
            "--theta", "0", "--theta-strictness", "ge",
            "--max-length", "3", "--algorithm", "all"])
        run = run_of(recs)
        assert run["capped"] is True and run["depth"] == 3

    def test_geodesic_metric_accepted(self, tmp_path):
        recs = run_records(tmp_path, "geo.jsonl", [
            "mine", "--synthetic", "3,30", "--seed", "1",
            "--radius", "200000", "--window", "120",
            "--metric", "geodesic", "--theta", "0.1", "--algorithm", "all"])
        assert run_of(recs)["config"]["metric"] == "geodesic"


class TestDeterminism:
    def test_byte_identical_across_runs_and_threads(self, tmp_path):
        argv = BASE + ["--theta", "0.2", "--epsilon", "0.25",
                       "--algorithm", "csts"]
        blobs = []
        for name, extra in [("a.jsonl", []), ("b.jsonl", []),
                            ("c.jsonl", ["--threads", "4"]),
                            ("d.jsonl", ["--threads", "13"])]:
            out = tmp_path / name
            assert main(argv + extra + ["--out", str(out)]) == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1] == blobs[2] == blobs[3]

    def test_no_timing_keys_in_records(self, tmp_path):
        recs = run_records(tmp_path, "run.jsonl", BASE + [
            "--theta", "0.2", "--epsilon", "0.25", "--algorithm", "csts"])
        text = json.dumps(recs)
        assert "_s\"" not in text and "seconds" not in text
        assert "threads" not in text


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

class TestSweep:
    def test_grid_and_series(self, tmp_path):
        out = tmp_path / "sweep.jsonl"
        code = main(["sweep", "--input", FIXTURE,
                     "--radius", "10", "--window", "20",
                     "--theta", "0,0.2,0.4", "--epsilon", "0,0.25",
                     "--out", str(out)])
        assert code == 0
        recs = [json.loads(line) for line in out.read_text().splitlines()]
        points = [r for r in recs if r["record"] == "sweep_point"]
        series = [r for r in recs if r["record"] == "series"]
        assert len(points) == 6
        # margin zero collapses the summary onto the closed set
        for pt in points:
            if pt["config"]["epsilon"] == "0":
                assert pt["counts"]["csts"] == pt["counts"]["closed"]
        by_cfg = {(p["config"]["theta"], p["config"]["epsilon"]): p["counts"]
                  for p in points}
        assert by_cfg[("1/5", "1/4")] == {"all": 26, "closed": 14, "csts": 8}
        assert by_cfg[("2/5", "1/4")]["all"] == 13
        # two ratios x (two epsilons + three thetas)
        assert len(series) == 10
        assert {s["ratio"] for s in series} == {"csts_over_all",
                                                "csts_over_closed"}
        theta_series = [s for s in series if s["axis"] == "theta"]
        assert all(len(s["points"]) == 3 for s in theta_series)
        sample = theta_series[0]["points"][0]
        assert set(sample) == {"theta", "value", "percent"}

    def test_larger_theta_never_grows_counts(self, tmp_path):
        out = tmp_path / "sweep.jsonl"
        assert main(["sweep", "--input", FIXTURE,
                     "--radius", "10", "--window", "20",
                     "--theta", "0,0.1,0.25,0.5", "--epsilon", "0.25",
                     "--out", str(out)]) == 0
        recs = [json.loads(line) for line in out.read_text().splitlines()]
        points = [r for r in recs if r["record"] == "sweep_point"]
        alls = [p["counts"]["all"] for p in points]
        assert alls == sorted(alls, reverse=True)

    def test_empty_theta_list_is_usage_error(self, capsys):
        code = main(["sweep", "--input", FIXTURE,
                     "--radius", "10", "--window", "20",
                     "--theta", "", "--epsilon", "0.25"])
        assert code == 2
        assert "--theta" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# query
# ---------------------------------------------------------------------------

class TestQuery:
    @pytest.fixture()
    def saved(self, tmp_path):
        out = tmp_path / "saved.jsonl"
        assert main(BASE + ["--theta", "0.25", "--theta-strictness", "ge",
                            "--epsilon", "0.25", "--algorithm", "csts",
                            "--out", str(out)]) == 0
        return str(out)

    def test_interval_for_non_member(self, saved, capsys):
        assert main(["query", "--from", saved,
                     "--pattern", "B->B->C"]) == 0
        text = capsys.readouterr().out
        assert "[3/8, 5/8]" in text
        assert "witness B->B->C->E" in text
        assert "PI-strong" in text

    def test_exact_for_member(self, saved, capsys):
        assert main(["query", "--from", saved,
                     "--pattern", "B->B->C->E"]) == 0
        text = capsys.readouterr().out
        assert "exact pi 3/8" in text

    def test_unknown_label_exits_2(self, saved, capsys):
        assert main(["query", "--from", saved, "--pattern", "B->Q"]) == 2
        err = capsys.readouterr().err
        assert "unknown event type label" in err and "Q" in err

    def test_needs_csts_output(self, tmp_path, capsys):
        out = tmp_path / "all.jsonl"
        assert main(BASE + ["--theta", "0.2", "--algorithm", "all",
                            "--out", str(out)]) == 0
        assert main(["query", "--from", str(out), "--pattern", "B->B"]) == 2
        assert "--algorithm csts" in capsys.readouterr().err

    def test_missing_file_exits_2(self, capsys):
        assert main(["query", "--from", "/nonexistent/x.jsonl",
                     "--pattern", "A"]) == 2


# ---------------------------------------------------------------------------
# guard rails
# ---------------------------------------------------------------------------

class TestErrors:
    def test_no_input_source(self, capsys):
        assert main(["mine", "--radius", "10", "--window", "20"]) == 2

    def test_input_and_synthetic_conflict(self, capsys):
        assert main(["mine", "--input", FIXTURE, "--synthetic", "3,30",
                     "--radius", "10", "--window", "20"]) == 2

    def test_missing_input_file(self, capsys):
        assert main(["mine", "--input", "/nonexistent.csv",
                     "--radius", "10", "--window", "20"]) == 2

    def test_mine_rejects_threshold_lists(self, capsys):
        assert main(BASE + ["--theta", "0.1,0.2"]) == 2
        assert "use sweep" in capsys.readouterr().err

    def test_oracle_size_guard_exits_3(self, capsys):
        assert main(["mine", "--synthetic", "5,250", "--seed", "7",
                     "--radius", "20", "--window", "60",
                     "--theta", "0.2", "--algorithm", "oracle"]) == 3
        assert "guard" in capsys.readouterr().err

    def test_unbounded_inclusive_zero_theta_exits_2(self, capsys):
        assert main(BASE + ["--theta", "0", "--theta-strictness", "ge"]) == 2
        assert "max_length" in capsys.readouterr().err

    def test_bad_synthetic_spec(self, capsys):
        assert main(["mine", "--synthetic", "5", "--radius", "10",
                     "--window", "20"]) == 2

    def test_bad_threshold_value(self, capsys):
        assert main(BASE + ["--theta", "banana"]) == 2

    def test_unknown_flag_is_usage_error(self, capsys):
        assert main(BASE + ["--frobnicate"]) == 2


def test_console_script_help_runs():
    proc = subprocess.run([sys.executable, "-m", "csts.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "mine" in proc.stdout and "sweep" in proc.stdout \
        and "query" in proc.stdout
