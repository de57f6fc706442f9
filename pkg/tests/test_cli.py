"""Harness tests: metrics, run matrices, report files, exit codes."""

import csv
import json

import pytest
from hypothesis import given, settings, strategies as st

from jobshop.cli import gmr, main, prd, run

from oracles import brute_force_makespan

TINY = "2 2\n0 3 1 4\n1 2 0 5\n"
TINY_JOBS = [[(0, 3), (1, 4)], [(1, 2), (0, 5)]]


# ----------------------------------------------------------------- metrics


def test_prd_examples():
    assert prd(926, 926) == 0.0
    assert round(prd(1086, 926), 2) == 17.28
    with pytest.raises(ValueError):
        prd(5, 0)
    with pytest.raises(ValueError):
        prd(5, -2)


@given(st.integers(1, 10**9))
def test_prd_of_a_value_against_itself_is_zero(a):
    assert prd(a, a) == 0.0


def test_gmr_examples():
    assert gmr([3, 5, 7], [3, 5, 7]) == pytest.approx(1.0)
    assert gmr([2], [1]) == pytest.approx(2.0)
    assert gmr([4, 9], [2, 3]) == pytest.approx((2 * 3) ** 0.5)


def test_gmr_is_invariant_under_pair_permutation():
    costs, refs = [4, 9, 5], [2, 3, 7]
    assert gmr(costs[::-1], refs[::-1]) == pytest.approx(gmr(costs, refs))


def test_gmr_rejects_bad_input():
    with pytest.raises(ValueError):
        gmr([1, 2], [1])
    with pytest.raises(ValueError):
        gmr([], [])
    with pytest.raises(ValueError):
        gmr([0], [1])
    with pytest.raises(ValueError):
        gmr([1], [-1])


# ------------------------------------------------------------- run matrices


def write_tiny(tmp_path, name="tiny"):
    f = tmp_path / f"{name}.txt"
    f.write_text(TINY)
    return f


def read_reports(out_dir, fmt="jsonl"):
    if fmt == "jsonl":
        path = out_dir / "reports.jsonl"
        return [json.loads(line) for line in path.read_text().splitlines()]
    with (out_dir / "reports.csv").open() as fh:
        return list(csv.DictReader(fh))


def test_tiny_matrix_solves_every_seed_to_the_oracle(tmp_path):
    f = write_tiny(tmp_path)
    out = tmp_path / "out"
    rc = main(
        ["--model", "jsp", "--instance", str(f), "--seeds", "3", "--out", str(out)]
    )
    assert rc == 0
    reports = read_reports(out)
    opt = brute_force_makespan(TINY_JOBS)
    assert [r["seed"] for r in reports] == [0, 1, 2]
    for r in reports:
        assert r["instance"] == "tiny" and r["variant"] == "jsp"
        assert r["objective"] == opt and r["proven"] is True
        assert r["lower_bound"] == opt and r["error"] is None
    with (out / "summary.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert rows[0]["best"] == rows[0]["worst"] == str(opt)
    assert rows[0]["runs"] == "3" and rows[0]["proven"] == "True"
    assert rows[0]["prd"] == ""


def test_reference_file_fills_the_prd_column(tmp_path):
    f = write_tiny(tmp_path)
    opt = brute_force_makespan(TINY_JOBS)
    ref = tmp_path / "refs.txt"
    ref.write_text(f"# best known\ntiny {opt}\n")
    out = tmp_path / "out"
    rc = main(
        ["--model", "jsp", "--instance", str(f), "--ref", str(ref), "--out", str(out)]
    )
    assert rc == 0
    with (out / "summary.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["prd"] == "0.0"


def test_csv_report_format(tmp_path):
    f = write_tiny(tmp_path)
    out = tmp_path / "out"
    rc = main(
        ["--model", "jsp", "--instance", str(f), "--format", "csv", "--out", str(out)]
    )
    assert rc == 0
    reports = read_reports(out, fmt="csv")
    assert len(reports) == 1 and reports[0]["instance"] == "tiny"


def test_directory_input_runs_every_txt_file(tmp_path):
    write_tiny(tmp_path, "a")
    write_tiny(tmp_path, "b")
    out = tmp_path / "out"
    rc = main(["--model", "jsp", "--dir", str(tmp_path), "--out", str(out)])
    assert rc == 0
    assert [r["instance"] for r in read_reports(out)] == ["a", "b"]


def test_empty_matrix_completes(tmp_path):
    out = tmp_path / "out"
    rc = main(["--model", "jsp", "--out", str(out)])
    assert rc == 0
    assert (out / "reports.jsonl").read_text() == ""
    assert (out / "summary.csv").exists()


def test_derived_lag_cells_rename_and_solve_the_variant(tmp_path):
    f = write_tiny(tmp_path)
    out = tmp_path / "out"
    rc = main(
        [
            "--model", "tl",
            "--instance", str(f),
            "--derive-lag", "2",
            "--greedy-iters", "20",
            "--out", str(out),
        ]
    )
    assert rc == 0
    (report,) = read_reports(out)
    assert report["instance"] == "tiny_0_2"
    # each job has mean duration 3.5, so the derived lag is 7
    assert report["objective"] == brute_force_makespan(TINY_JOBS, lags=[[7], [7]])
    assert report["proven"] is True


def test_no_wait_defaults_to_zero_lag(tmp_path):
    f = write_tiny(tmp_path)
    out = tmp_path / "out"
    rc = main(
        [
            "--model", "nw-interval",
            "--instance", str(f),
            "--greedy-iters", "20",
            "--out", str(out),
        ]
    )
    assert rc == 0
    (report,) = read_reports(out)
    assert report["instance"] == "tiny_0_0"
    assert report["objective"] == brute_force_makespan(TINY_JOBS, lags=[[0], [0]])


@pytest.mark.parametrize(
    "argv",
    [
        ["--model", "jsp", "--instance", "no-such-file.txt"],
        ["--model", "tl"],  # needs --derive-lag
        ["--model", "nw-task", "--derive-lag", "1"],
        ["--model", "jsp", "--derive-lag", "2"],
        ["--model", "jsp", "--seeds", "0"],
        ["--model", "tl", "--derive-lag", "huh"],
    ],
)
def test_unusable_configurations_exit_2(argv, tmp_path, capsys):
    rc = main(argv + ["--out", str(tmp_path / "out")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_cell_errors_are_recorded_not_fatal(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("2 2\n0 3 1 4\n")  # truncated body
    out = tmp_path / "out"
    rc = main(["--model", "jsp", "--instance", str(bad), "--out", str(out)])
    assert rc == 0
    (report,) = read_reports(out)
    assert report["error"] is not None and "ParseError" in report["error"]
    assert report["objective"] is None and report["proven"] is False


def test_reports_are_identical_modulo_timing(tmp_path):
    f = write_tiny(tmp_path)
    runs = []
    for k in range(2):
        out = tmp_path / f"out{k}"
        rc = main(
            ["--model", "jsp", "--instance", str(f), "--seeds", "2", "--out", str(out)]
        )
        assert rc == 0
        batch = read_reports(out)
        for r in batch:
            r.pop("wall_time")
        runs.append(batch)
    assert runs[0] == runs[1]


def test_worker_pool_matches_serial_execution(tmp_path):
    f = write_tiny(tmp_path)
    payloads = [
        (str(f), "tiny", "jsp", None, seed, {}, 60.0) for seed in range(2)
    ]
    serial = run(payloads, jobs=1)
    pooled = run(payloads, jobs=2)
    strip = lambda r: {k: v for k, v in vars(r).items() if k != "wall_time"}
    assert [strip(r) for r in serial] == [strip(r) for r in pooled]
