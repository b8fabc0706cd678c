"""Command-line surface: accuracy sweeps, timing runs, evaluation, precision study.

Every subcommand emits machine-readable CSV (or JSON for ``eval``), one row
per data point, to --output or standard output. Exit codes: 0 success,
2 argument/validation error, 3 I/O error.
"""

from __future__ import annotations

import csv
import json
import statistics
import sys
import time
from dataclasses import dataclass
from typing import Sequence

import click
import numpy as np

from .batch import BatchRequest, evaluate_batch
from .exact import max_abs_error, oracle_table, precision_sweep
from .evaluate import radial_direct, radial_ztt_table, zernike_eval
from .modes import Mode, ModeError, ModeSet, full_mode_set, make_mode
from .tables import EvalMatrix, GridError, linear_radial_grid, rational_radial_grid

METHODS = ("jacobi", "direct", "ztt")
ACCURACY_HEADER = ("n", "m", "k", "method", "max_abs_err")
BENCH_HEADER = (
    "method",
    "strategy",
    "resolution",
    "grid_size",
    "wall_ns_median",
    "recursion_steps",
    "repetitions",
)
PRECISION_HEADER = ("bits", "max_deviation")

MAX_ACCURACY_N = 150  # oracle cost guard


class OutputError(click.ClickException):
    """I/O failure writing results; exits with code 3."""

    exit_code = 3


@dataclass(frozen=True)
class AccuracyRow:
    n: int
    m: int
    deriv_order: int
    method: str
    max_abs_err: float


@dataclass(frozen=True)
class BenchRecord:
    method: str
    strategy: str
    resolution: int
    grid_size: int
    wall_ns_median: int
    recursion_steps: int
    repetitions: int


def _radial_sweep_modes(n_max: int) -> ModeSet:
    """All (n, m >= 0) modes with n <= n_max; the radial part ignores sign(m)."""
    return tuple(
        Mode(n, m) for n in range(n_max + 1) for m in range(n % 2, n + 1, 2)
    )


def _candidate_matrix(
    method: str, modes: ModeSet, grid, deriv_order: int, serial: bool
) -> EvalMatrix:
    if method == "jacobi":
        request = BatchRequest(
            modes=modes, grid=grid, deriv_order=deriv_order, strategy="cached"
        )
        return evaluate_batch(request, parallel=not serial)[0]
    if method == "direct":
        values = np.empty((len(grid), len(modes)), dtype=np.float64)
        for col, mode in enumerate(modes):
            values[:, col] = radial_direct(mode.n, mode.m_abs, grid, deriv_order)
        return EvalMatrix(values=values, modes=modes, deriv_order=deriv_order)
    if method == "ztt":
        if deriv_order:
            raise ValueError("ztt has no derivative form")
        return EvalMatrix(
            values=radial_ztt_table(modes, grid), modes=modes, deriv_order=0
        )
    raise ValueError(f"unknown method {method!r}")


def run_accuracy(
    n_max: int,
    methods: Sequence[str] = METHODS,
    grid_size: int = 100,
    k_max: int = 0,
    serial: bool = False,
) -> list[AccuracyRow]:
    """Max-abs error of each method against the exact oracle, per mode and order.

    Sweeps every (n, m >= 0) mode with n <= n_max on grid_size linearly
    spaced points; the oracle evaluates the exact rationals i/(P-1), the
    candidates their binary64 roundings. ztt rows exist only for k = 0.
    """
    if n_max < 0 or n_max > MAX_ACCURACY_N:
        raise ValueError(f"n_max must be in 0..{MAX_ACCURACY_N}, got {n_max}")
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}")
    modes = _radial_sweep_modes(n_max)
    exact_points = rational_radial_grid(grid_size)
    float_points = linear_radial_grid(grid_size)
    rows: list[AccuracyRow] = []
    for k in range(k_max + 1):
        reference = oracle_table(modes, exact_points, k)
        for method in methods:
            if method == "ztt" and k:
                continue
            candidate = _candidate_matrix(method, modes, float_points, k, serial)
            for err in max_abs_error(candidate, reference):
                rows.append(AccuracyRow(err.n, err.m, k, method, err.max_abs_err))
    order = {m: i for i, m in enumerate(methods)}
    rows.sort(key=lambda r: (r.n, r.m, r.deriv_order, order[r.method]))
    return rows


def _timed_ns(fn, repetitions: int) -> int:
    fn()  # untimed warm-up
    samples = []
    for _ in range(repetitions):
        t0 = time.perf_counter_ns()
        fn()
        samples.append(time.perf_counter_ns() - t0)
    return int(statistics.median(samples))


def run_bench(
    n_min: int,
    n_max: int,
    step: int = 10,
    grid_sizes: Sequence[int] = (100, 1000),
    strategies: Sequence[str] = ("cached", "independent"),
    repetitions: int = 5,
    methods: Sequence[str] = ("jacobi",),
    serial: bool = True,
) -> list[BenchRecord]:
    """Time full-mode-set evaluation per resolution, grid size and strategy.

    One untimed warm-up then the median of >= 3 repetitions on the monotonic
    clock. Baseline methods (direct, ztt) are timed per-mode with strategy
    label ``permode``; recursion_steps counts Jacobi recursion applications,
    so baseline rows record 0.
    """
    if n_min < 0 or n_min > n_max:
        raise ValueError(f"need 0 <= n_min <= n_max, got {n_min}..{n_max}")
    if step < 1:
        raise ValueError(f"step must be >= 1, got {step}")
    if repetitions < 3:
        raise ValueError(f"repetitions must be >= 3, got {repetitions}")
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}")
    records: list[BenchRecord] = []
    for resolution in range(n_min, n_max + 1, step):
        modes = full_mode_set(resolution)
        for grid_size in grid_sizes:
            grid = linear_radial_grid(grid_size)
            for method in methods:
                if method == "jacobi":
                    for strategy in strategies:
                        request = BatchRequest(
                            modes=modes, grid=grid, deriv_order=0, strategy=strategy
                        )
                        _, counter = evaluate_batch(request, parallel=not serial)
                        wall = _timed_ns(
                            lambda: evaluate_batch(request, parallel=not serial),
                            repetitions,
                        )
                        records.append(
                            BenchRecord(
                                "jacobi",
                                strategy,
                                resolution,
                                grid_size,
                                wall,
                                counter.recursion_steps,
                                repetitions,
                            )
                        )
                else:
                    wall = _timed_ns(
                        lambda: _candidate_matrix(method, modes, grid, 0, serial),
                        repetitions,
                    )
                    records.append(
                        BenchRecord(
                            method, "permode", resolution, grid_size, wall, 0, repetitions
                        )
                    )
    return records


def run_precision(
    n_max: int, bits: Sequence[int], grid_size: int = 100
) -> list[tuple[int, float]]:
    """Precision sweep rows (bits, max_deviation), ascending bits."""
    return precision_sweep(n_max, sorted(set(int(b) for b in bits)), rational_radial_grid(grid_size))


# --- file I/O ----------------------------------------------------------------


def _write_rows(output: str | None, header: Sequence[str], rows) -> None:
    try:
        if output in (None, "-"):
            _write_csv(sys.stdout, header, rows)
        else:
            with open(output, "w", newline="") as handle:
                _write_csv(handle, header, rows)
    except OSError as exc:
        raise OutputError(f"cannot write output: {exc}")


def _write_csv(handle, header, rows) -> None:
    writer = csv.writer(handle)
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)


def read_accuracy_csv(path) -> list[AccuracyRow]:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = tuple(next(reader))
        if header != ACCURACY_HEADER:
            raise ValueError(f"unexpected header {header}")
        return [
            AccuracyRow(int(n), int(m), int(k), method, float(err))
            for n, m, k, method, err in reader
        ]


def read_bench_csv(path) -> list[BenchRecord]:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = tuple(next(reader))
        if header != BENCH_HEADER:
            raise ValueError(f"unexpected header {header}")
        return [
            BenchRecord(m, s, int(r), int(g), int(w), int(steps), int(reps))
            for m, s, r, g, w, steps, reps in reader
        ]


def read_precision_csv(path) -> list[tuple[int, float]]:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = tuple(next(reader))
        if header != PRECISION_HEADER:
            raise ValueError(f"unexpected header {header}")
        return [(int(bits), float(dev)) for bits, dev in reader]


def _parse_mode_file(path) -> ModeSet:
    modes = []
    try:
        with open(path) as handle:
            for lineno, line in enumerate(handle, start=1):
                text = line.strip()
                if not text:
                    continue
                parts = text.split()
                if len(parts) != 2:
                    raise click.UsageError(
                        f"{path}:{lineno}: expected 'n m', got {text!r}"
                    )
                try:
                    n, m = int(parts[0]), int(parts[1])
                except ValueError:
                    raise click.UsageError(
                        f"{path}:{lineno}: expected integers, got {text!r}"
                    )
                try:
                    modes.append(make_mode(n, m))
                except ModeError as exc:
                    raise click.UsageError(
                        f"{path}:{lineno}: invalid mode ({n}, {m}): {exc}"
                    )
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc}")
    if not modes:
        raise click.UsageError(f"{path}: no modes found")
    return tuple(modes)


def _parse_value_file(path) -> list[float]:
    values = []
    try:
        with open(path) as handle:
            for lineno, line in enumerate(handle, start=1):
                text = line.strip()
                if not text:
                    continue
                try:
                    values.append(float(text))
                except ValueError:
                    raise click.UsageError(
                        f"{path}:{lineno}: expected a decimal value, got {text!r}"
                    )
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc}")
    return values


# --- click wiring -------------------------------------------------------------


@click.group()
def main():
    """Zernike polynomial evaluator: accuracy, timing and precision studies."""


@main.command("accuracy")
@click.option("--n-max", type=int, required=True, help="Highest radial degree.")
@click.option(
    "--method",
    "methods",
    multiple=True,
    type=click.Choice(METHODS),
    default=METHODS,
    show_default=True,
    help="Evaluation method(s) to score.",
)
@click.option("--grid-size", type=int, default=100, show_default=True)
@click.option("--k-max", type=int, default=0, show_default=True)
@click.option("--serial", is_flag=True, help="Force single-threaded evaluation.")
@click.option("--output", default="-", show_default=True, help="CSV path or - for stdout.")
def accuracy_command(n_max, methods, grid_size, k_max, serial, output):
    """Max-abs error of each method vs the exact oracle, per (n, m, k)."""
    try:
        rows = run_accuracy(n_max, methods, grid_size, k_max, serial)
    except (ModeError, GridError, ValueError) as exc:
        raise click.UsageError(str(exc))
    _write_rows(
        output,
        ACCURACY_HEADER,
        [(r.n, r.m, r.deriv_order, r.method, r.max_abs_err) for r in rows],
    )


@main.command("bench")
@click.option("--n-min", type=int, default=10, show_default=True)
@click.option("--n-max", type=int, default=100, show_default=True)
@click.option("--step", type=int, default=10, show_default=True)
@click.option(
    "--grid-size",
    "grid_sizes",
    multiple=True,
    type=int,
    default=(100, 1000),
    show_default=True,
)
@click.option(
    "--strategy",
    "strategies",
    multiple=True,
    type=click.Choice(("cached", "independent")),
    default=("cached", "independent"),
    show_default=True,
)
@click.option(
    "--method",
    "methods",
    multiple=True,
    type=click.Choice(METHODS),
    default=("jacobi",),
    show_default=True,
)
@click.option("--reps", type=int, default=5, show_default=True)
@click.option("--serial", is_flag=True, help="Force single-threaded evaluation.")
@click.option("--output", default="-", show_default=True)
def bench_command(n_min, n_max, step, grid_sizes, strategies, methods, reps, serial, output):
    """Wall time of full-set evaluation per resolution, grid and strategy."""
    try:
        records = run_bench(
            n_min, n_max, step, grid_sizes, strategies, reps, methods, serial
        )
    except (ModeError, GridError, ValueError) as exc:
        raise click.UsageError(str(exc))
    _write_rows(
        output,
        BENCH_HEADER,
        [
            (
                r.method,
                r.strategy,
                r.resolution,
                r.grid_size,
                r.wall_ns_median,
                r.recursion_steps,
                r.repetitions,
            )
            for r in records
        ],
    )


@main.command("eval")
@click.option("--modes", "modes_path", required=True, help="File with one 'n m' per line.")
@click.option("--rho", "rho_path", required=True, help="File with one radial value per line.")
@click.option("--theta", "theta_path", default=None, help="Optional angle file (radians).")
@click.option("--k", type=int, default=0, show_default=True, help="Radial derivative order.")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(("csv", "json")),
    default="csv",
    show_default=True,
)
@click.option("--serial", is_flag=True, help="Force single-threaded evaluation.")
@click.option("--output", default="-", show_default=True)
def eval_command(modes_path, rho_path, theta_path, k, fmt, serial, output):
    """Evaluate modes at given points: full polynomials, or radial-only without --theta."""
    modes = _parse_mode_file(modes_path)
    rho = _parse_value_file(rho_path)
    theta = _parse_value_file(theta_path) if theta_path else None
    try:
        if theta is None:
            request = BatchRequest(modes=modes, grid=rho, deriv_order=k, strategy="cached")
            values = evaluate_batch(request, parallel=not serial)[0].values
        else:
            values = np.empty((len(rho), len(modes)), dtype=np.float64)
            for col, mode in enumerate(modes):
                values[:, col] = zernike_eval(mode, rho, theta, k)
    except (ModeError, GridError, ValueError) as exc:
        raise click.UsageError(str(exc))

    prefix = "R" if theta is None else "Z"
    labels = [f"{prefix}_{mode.n}_{mode.m}" for mode in modes]
    if fmt == "csv":
        header = (["rho", "theta"] if theta is not None else ["rho"]) + labels
        rows = []
        for idx in range(len(rho)):
            lead = [rho[idx], theta[idx]] if theta is not None else [rho[idx]]
            rows.append(lead + [float(v) for v in values[idx]])
        _write_rows(output, header, rows)
    else:
        payload = {
            "modes": [[mode.n, mode.m] for mode in modes],
            "deriv_order": k,
            "rho": list(rho),
            "theta": list(theta) if theta is not None else None,
            "values": [[float(v) for v in row] for row in values],
        }
        try:
            if output in (None, "-"):
                json.dump(payload, sys.stdout, indent=2)
                sys.stdout.write("\n")
            else:
                with open(output, "w") as handle:
                    json.dump(payload, handle, indent=2)
                    handle.write("\n")
        except OSError as exc:
            raise OutputError(f"cannot write output: {exc}")


@main.command("precision")
@click.option("--n-max", type=int, default=100, show_default=True)
@click.option(
    "--bits",
    "bits",
    multiple=True,
    type=int,
    default=(53, 96, 153, 183),
    show_default=True,
    help="Significand widths to simulate.",
)
@click.option("--grid-size", type=int, default=100, show_default=True)
@click.option("--output", default="-", show_default=True)
def precision_command(n_max, bits, grid_size, output):
    """Max deviation of p-bit direct evaluation from the exact oracle."""
    try:
        rows = run_precision(n_max, bits, grid_size)
    except (ModeError, GridError, ValueError) as exc:
        raise click.UsageError(str(exc))
    _write_rows(output, PRECISION_HEADER, rows)


if __name__ == "__main__":
    main()
