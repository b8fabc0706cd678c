import json

import numpy as np
import pytest
from click.testing import CliRunner

from zernkit.cli import (
    ACCURACY_HEADER,
    AccuracyRow,
    BENCH_HEADER,
    BenchRecord,
    main,
    read_accuracy_csv,
    read_bench_csv,
    read_precision_csv,
    run_accuracy,
    run_bench,
    run_precision,
)


@pytest.fixture
def runner():
    return CliRunner()


# --- accuracy -------------------------------------------------------------------


def test_accuracy_low_order_rows(runner, tmp_path):
    out = tmp_path / "acc.csv"
    result = runner.invoke(
        main,
        ["accuracy", "--n-max", "2", "--method", "jacobi", "--k-max", "0",
         "--output", str(out)],
    )
    assert result.exit_code == 0, result.output
    rows = read_accuracy_csv(out)
    assert [(r.n, r.m) for r in rows] == [(0, 0), (1, 1), (2, 0), (2, 2)]
    assert all(r.method == "jacobi" for r in rows)
    assert all(r.max_abs_err <= 1e-14 for r in rows)


def test_accuracy_stable_regime_all_methods(runner, tmp_path):
    out = tmp_path / "acc20.csv"
    result = runner.invoke(
        main, ["accuracy", "--n-max", "20", "--serial", "--output", str(out)]
    )
    assert result.exit_code == 0, result.output
    rows = read_accuracy_csv(out)
    by_method = {}
    for r in rows:
        by_method.setdefault(r.method, []).append(r.max_abs_err)
    assert max(by_method["jacobi"]) <= 1e-10
    assert max(by_method["ztt"]) <= 1e-10
    assert max(by_method["direct"]) <= 1e-9  # cancellation floor by n = 20
    assert all(e >= 0.0 and np.isfinite(e) for errs in by_method.values() for e in errs)


def test_accuracy_direct_unstable_by_50(runner, tmp_path):
    out = tmp_path / "acc50.csv"
    result = runner.invoke(
        main,
        ["accuracy", "--n-max", "50", "--method", "direct", "--output", str(out)],
    )
    assert result.exit_code == 0, result.output
    rows = read_accuracy_csv(out)
    assert max(r.max_abs_err for r in rows) > 1e-3


def test_accuracy_rejects_bad_arguments(runner, tmp_path):
    assert runner.invoke(main, ["accuracy", "--n-max", "151"]).exit_code == 2
    assert runner.invoke(main, ["accuracy", "--n-max", "-1"]).exit_code == 2
    assert (
        runner.invoke(main, ["accuracy", "--n-max", "5", "--method", "magic"]).exit_code
        == 2
    )


def test_accuracy_unwritable_output_is_io_error(runner):
    result = runner.invoke(
        main, ["accuracy", "--n-max", "2", "--output", "/nonexistent/dir/out.csv"]
    )
    assert result.exit_code == 3


def test_accuracy_deterministic_bytes(runner, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        result = runner.invoke(
            main,
            ["accuracy", "--n-max", "8", "--k-max", "2", "--serial",
             "--output", str(path)],
        )
        assert result.exit_code == 0
    assert a.read_bytes() == b.read_bytes()


def test_accuracy_parallel_matches_serial():
    serial = run_accuracy(10, methods=("jacobi",), grid_size=40, k_max=2, serial=True)
    threaded = run_accuracy(10, methods=("jacobi",), grid_size=40, k_max=2, serial=False)
    assert serial == threaded


def test_accuracy_ztt_skipped_for_derivatives():
    rows = run_accuracy(4, methods=("jacobi", "ztt"), grid_size=20, k_max=2)
    ztt_orders = {r.deriv_order for r in rows if r.method == "ztt"}
    assert ztt_orders == {0}
    jacobi_orders = {r.deriv_order for r in rows if r.method == "jacobi"}
    assert jacobi_orders == {0, 1, 2}


def test_accuracy_csv_roundtrip(runner, tmp_path):
    out = tmp_path / "acc.csv"
    result = runner.invoke(
        main,
        ["accuracy", "--n-max", "6", "--k-max", "1", "--serial", "--output", str(out)],
    )
    assert result.exit_code == 0
    rows = read_accuracy_csv(out)
    direct = run_accuracy(6, k_max=1, serial=True)
    assert rows == [
        AccuracyRow(r.n, r.m, r.deriv_order, r.method, r.max_abs_err) for r in direct
    ]


# --- bench ----------------------------------------------------------------------


def test_bench_record_count_and_columns(runner, tmp_path):
    out = tmp_path / "bench.csv"
    result = runner.invoke(
        main,
        ["bench", "--n-min", "2", "--n-max", "8", "--step", "3",
         "--grid-size", "16", "--grid-size", "64", "--reps", "3",
         "--serial", "--output", str(out)],
    )
    assert result.exit_code == 0, result.output
    records = read_bench_csv(out)
    # 3 resolutions x 2 grids x 2 strategies
    assert len(records) == 12
    assert all(r.wall_ns_median > 0 for r in records)
    assert all(r.repetitions == 3 for r in records)
    for record in records:
        if record.strategy == "independent":
            twin = next(
                r
                for r in records
                if r.strategy == "cached"
                and (r.resolution, r.grid_size) == (record.resolution, record.grid_size)
            )
            assert twin.recursion_steps <= record.recursion_steps
            if record.resolution >= 6:  # chain sharing starts paying off here
                assert twin.recursion_steps < record.recursion_steps


def test_bench_steps_deterministic_across_runs():
    kwargs = dict(step=4, grid_sizes=(16,), repetitions=3, serial=True)
    first = run_bench(2, 10, **kwargs)
    second = run_bench(2, 10, **kwargs)
    strip = lambda rs: [
        (r.method, r.strategy, r.resolution, r.grid_size, r.recursion_steps)
        for r in rs
    ]
    assert strip(first) == strip(second)


def test_bench_baseline_methods_rows():
    records = run_bench(
        4, 4, grid_sizes=(16,), repetitions=3, methods=("jacobi", "direct", "ztt")
    )
    methods = {(r.method, r.strategy) for r in records}
    assert methods == {
        ("jacobi", "cached"),
        ("jacobi", "independent"),
        ("direct", "permode"),
        ("ztt", "permode"),
    }
    assert all(r.recursion_steps == 0 for r in records if r.strategy == "permode")


def test_bench_rejects_bad_ranges(runner):
    assert runner.invoke(main, ["bench", "--n-min", "10", "--n-max", "5"]).exit_code == 2
    assert runner.invoke(main, ["bench", "--reps", "2"]).exit_code == 2
    assert runner.invoke(main, ["bench", "--step", "0"]).exit_code == 2


# --- eval -----------------------------------------------------------------------


def write_lines(path, rows):
    path.write_text("".join(f"{row}\n" for row in rows))


def test_eval_radial_only(runner, tmp_path):
    modes = tmp_path / "modes.txt"
    rho = tmp_path / "rho.txt"
    write_lines(modes, ["0 0"])
    write_lines(rho, ["0.5"])
    out = tmp_path / "vals.csv"
    result = runner.invoke(
        main,
        ["eval", "--modes", str(modes), "--rho", str(rho), "--output", str(out)],
    )
    assert result.exit_code == 0, result.output
    lines = out.read_text().splitlines()
    assert lines[0] == "rho,R_0_0"
    assert lines[1] == "0.5,1.0"


def test_eval_full_polynomial(runner, tmp_path):
    modes = tmp_path / "modes.txt"
    rho = tmp_path / "rho.txt"
    theta = tmp_path / "theta.txt"
    write_lines(modes, ["1 1"])
    write_lines(rho, ["0.5"])
    write_lines(theta, ["0.0"])
    result = runner.invoke(
        main,
        ["eval", "--modes", str(modes), "--rho", str(rho), "--theta", str(theta)],
    )
    assert result.exit_code == 0, result.output
    lines = result.output.splitlines()
    assert lines[0] == "rho,theta,Z_1_1"
    assert lines[1] == "0.5,0.0,0.5"


def test_eval_json_format(runner, tmp_path):
    modes = tmp_path / "modes.txt"
    rho = tmp_path / "rho.txt"
    write_lines(modes, ["2 0", "2 -2"])
    write_lines(rho, ["0.0", "1.0"])
    out = tmp_path / "vals.json"
    result = runner.invoke(
        main,
        ["eval", "--modes", str(modes), "--rho", str(rho), "--k", "0",
         "--format", "json", "--output", str(out)],
    )
    assert result.exit_code == 0, result.output
    payload = json.loads(out.read_text())
    assert payload["modes"] == [[2, 0], [2, -2]]
    assert payload["theta"] is None
    assert payload["values"][0][0] == -1.0
    assert payload["values"][1][0] == 1.0


def test_eval_invalid_mode_reports_line_and_pair(runner, tmp_path):
    modes = tmp_path / "modes.txt"
    rho = tmp_path / "rho.txt"
    write_lines(modes, ["0 0", "3 2"])
    write_lines(rho, ["0.5"])
    result = runner.invoke(main, ["eval", "--modes", str(modes), "--rho", str(rho)])
    assert result.exit_code == 2
    assert "modes.txt:2" in result.output
    assert "(3, 2)" in result.output


def test_eval_parse_error_reports_line(runner, tmp_path):
    modes = tmp_path / "modes.txt"
    rho = tmp_path / "rho.txt"
    write_lines(modes, ["0 0"])
    write_lines(rho, ["0.5", "not-a-number"])
    result = runner.invoke(main, ["eval", "--modes", str(modes), "--rho", str(rho)])
    assert result.exit_code == 2
    assert "rho.txt:2" in result.output


def test_eval_rejects_out_of_range_rho_and_mismatch(runner, tmp_path):
    modes = tmp_path / "modes.txt"
    rho = tmp_path / "rho.txt"
    theta = tmp_path / "theta.txt"
    write_lines(modes, ["0 0"])
    write_lines(rho, ["1.5"])
    result = runner.invoke(main, ["eval", "--modes", str(modes), "--rho", str(rho)])
    assert result.exit_code == 2
    write_lines(rho, ["0.5", "0.6"])
    write_lines(theta, ["0.0"])
    result = runner.invoke(
        main, ["eval", "--modes", str(modes), "--rho", str(rho), "--theta", str(theta)]
    )
    assert result.exit_code == 2


def test_eval_missing_input_is_io_error(runner, tmp_path):
    rho = tmp_path / "rho.txt"
    write_lines(rho, ["0.5"])
    result = runner.invoke(
        main, ["eval", "--modes", str(tmp_path / "absent.txt"), "--rho", str(rho)]
    )
    assert result.exit_code == 3


# --- precision -------------------------------------------------------------------


def test_precision_rows_sorted_and_monotone(runner, tmp_path):
    out = tmp_path / "prec.csv"
    result = runner.invoke(
        main,
        ["precision", "--n-max", "8", "--bits", "53", "--bits", "30",
         "--bits", "64", "--grid-size", "12", "--output", str(out)],
    )
    assert result.exit_code == 0, result.output
    rows = read_precision_csv(out)
    assert [bits for bits, _ in rows] == [30, 53, 64]
    devs = [dev for _, dev in rows]
    assert devs == sorted(devs, reverse=True)


def test_precision_rejects_narrow_bits(runner):
    result = runner.invoke(main, ["precision", "--n-max", "4", "--bits", "16"])
    assert result.exit_code == 2


def test_precision_deterministic_bytes(runner, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        result = runner.invoke(
            main,
            ["precision", "--n-max", "6", "--bits", "40", "--grid-size", "10",
             "--output", str(path)],
        )
        assert result.exit_code == 0
    assert a.read_bytes() == b.read_bytes()


def test_precision_csv_roundtrip(tmp_path, runner):
    out = tmp_path / "prec.csv"
    result = runner.invoke(
        main,
        ["precision", "--n-max", "6", "--bits", "40", "--bits", "96",
         "--grid-size", "10", "--output", str(out)],
    )
    assert result.exit_code == 0
    assert read_precision_csv(out) == run_precision(6, (40, 96), 10)


# --- shared helpers ---------------------------------------------------------------


def test_headers_are_stable():
    assert ACCURACY_HEADER == ("n", "m", "k", "method", "max_abs_err")
    assert BENCH_HEADER == (
        "method",
        "strategy",
        "resolution",
        "grid_size",
        "wall_ns_median",
        "recursion_steps",
        "repetitions",
    )


def test_bench_csv_roundtrip(tmp_path, runner):
    out = tmp_path / "bench.csv"
    result = runner.invoke(
        main,
        ["bench", "--n-min", "2", "--n-max", "4", "--step", "2",
         "--grid-size", "8", "--reps", "3", "--serial", "--output", str(out)],
    )
    assert result.exit_code == 0
    records = read_bench_csv(out)
    assert all(isinstance(r, BenchRecord) for r in records)
    assert len(records) == 4
