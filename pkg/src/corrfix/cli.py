"""Command-line front end: corr, check, repair, compare, bench.

Exit codes: 0 success (and matrix is PSD where that matters), 1 input or
usage error, 2 the run succeeded but the matrix is not a correlation
matrix, 3 an iteration failed to converge or the benchmark could not
generate an indefinite perturbation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .ingest import (
    MissingPolicy,
    PairOverride,
    parse_panel,
    read_matrix,
    sample_correlation,
    write_matrix,
)
from .linalg import ConvergenceError, SymmetricMatrix, diff_norms
from .repair import (
    DEFAULT_EPSILON,
    apd_nearest,
    check_correlation,
    normalize_to_correlation,
    shrink_repair,
)


class GenerationError(RuntimeError):
    """The benchmark could not produce an indefinite perturbation."""


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _nonnegative_float(text: str) -> float:
    value = float(text)
    if not value >= 0.0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def _precision(text: str) -> int:
    value = int(text)
    if not 1 <= value <= 17:
        raise argparse.ArgumentTypeError(f"precision must be in [1, 17], got {text}")
    return value


def _int_at_least(minimum: int):
    def parse(text: str) -> int:
        value = int(text)
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be at least {minimum}, got {text}")
        return value

    return parse


def _override(text: str) -> PairOverride:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f'override must look like "A,B,start:end", got {text!r}'
        )
    a, b, window = (part.strip() for part in parts)
    try:
        start_text, end_text = window.split(":")
        start, end = int(start_text), int(end_text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f'override window must be "start:end" with 1-based inclusive '
            f"date indices, got {window!r}"
        ) from None
    if start < 1:
        raise argparse.ArgumentTypeError("override date indices are 1-based")
    try:
        return PairOverride(a, b, start - 1, end - 1)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str | None, text: str) -> None:
    """Write to stdout, or atomically to a file (temp + rename)."""
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    directory = str(target.parent) if str(target.parent) else "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=target.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(value):
    if isinstance(value, dict):
        return {key: _jsonable(item) for key, item in value.items()}
    if isinstance(value, np.ndarray):
        return [_jsonable(item) for item in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{value:.12g}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_format_value(item) for item in value) + "]"
    return str(value)


def _emit_report(fields: dict, report_format: str, stream) -> None:
    if report_format == "json":
        print(json.dumps(_jsonable(fields), indent=2), file=stream)
    else:
        for key, value in fields.items():
            print(f"{key}: {_format_value(value)}", file=stream)


def _emit_matrix_and_report(csv_text, fields, args) -> None:
    """Matrix to --output (report to stdout), or matrix to stdout (report
    to stderr) so piped output stays machine readable."""
    if args.output is not None:
        _write_text(args.output, csv_text)
        _emit_report(fields, args.report_format, sys.stdout)
    else:
        sys.stdout.write(csv_text)
        _emit_report(fields, args.report_format, sys.stderr)


def cmd_corr(args) -> int:
    panel = parse_panel(_read_text(args.panel))
    matrix = sample_correlation(panel, MissingPolicy(args.policy), args.override)
    report = check_correlation(matrix)
    labels = list(panel.instruments) if args.header else None
    csv_text = write_matrix(matrix, args.precision, labels=labels)
    fields = {
        "n": matrix.n,
        "min_eigenvalue": report.min_eigenvalue,
        "is_psd": report.is_psd,
        "is_correlation": report.is_correlation,
    }
    _emit_matrix_and_report(csv_text, fields, args)
    return 0 if report.is_psd else 2


def cmd_check(args) -> int:
    matrix = read_matrix(_read_text(args.matrix))
    report = check_correlation(matrix)
    _emit_report(dataclasses.asdict(report), args.report_format, sys.stdout)
    return 0 if report.is_correlation else 2


def cmd_repair(args) -> int:
    matrix = read_matrix(_read_text(args.matrix))
    if args.method == "clip":
        result = shrink_repair(matrix, args.epsilon)
    else:
        result = apd_nearest(matrix)
    csv_text = write_matrix(result.repaired.inner, args.precision)
    fields = {
        "method": result.method,
        "epsilon": result.epsilon,
        "clipped_count": result.clipped_count,
        "shifts": result.shifts,
        "distance_frobenius": result.distance.frobenius,
        "distance_max": result.distance.max,
        "distance_scaled_max": result.distance.scaled_max,
    }
    _emit_matrix_and_report(csv_text, fields, args)
    return 0


def cmd_compare(args) -> int:
    a = read_matrix(_read_text(args.matrix_a))
    b = read_matrix(_read_text(args.matrix_b))
    report = diff_norms(a, b)
    fields = {
        "n": a.n,
        "frobenius": report.frobenius,
        "max": report.max,
        "scaled_max": report.scaled_max,
    }
    _emit_report(fields, args.report_format, sys.stdout)
    return 0


def _random_correlation(rng: np.random.Generator, n: int):
    """Random valid correlation matrix: normalize B diag(d) B^T with a
    random orthogonal B and positive d. The spectrum is skewed toward
    near-singularity, mimicking panels of correlated instruments, so that
    modest noise can push the matrix indefinite."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    values = np.sort(rng.uniform(0.02, 2.0, n))[::-1]
    values[-1] = rng.uniform(0.01, 0.08)
    covariance = (q * values) @ q.T
    return normalize_to_correlation(SymmetricMatrix((covariance + covariance.T) / 2.0))


def _indefinite_perturbation(
    rng: np.random.Generator, correlation, noise: float, max_attempts: int = 100
) -> SymmetricMatrix:
    """Additive symmetric noise with the diagonal reset to 1, retried until
    the result is indefinite. Zero noise returns the input unchanged."""
    if noise == 0.0:
        return correlation.inner
    for _ in range(max_attempts):
        raw = rng.standard_normal((correlation.n, correlation.n))
        candidate = correlation.entries + noise * (raw + raw.T) / 2.0
        np.fill_diagonal(candidate, 1.0)
        perturbed = SymmetricMatrix(candidate)
        if np.linalg.eigvalsh(perturbed.entries)[0] < 0.0:
            return perturbed
    raise GenerationError(
        f"no indefinite perturbation found in {max_attempts} attempts "
        f"(noise {noise:g} is too small for this matrix)"
    )


_TRIAL_METRICS = (
    "clip_vs_input_frobenius",
    "clip_vs_input_max",
    "apd_vs_input_frobenius",
    "apd_vs_input_max",
    "clip_vs_original_frobenius",
    "clip_vs_original_max",
    "apd_vs_original_frobenius",
    "apd_vs_original_max",
    "frobenius_ratio",
)


def run_bench(
    size: int,
    trials: int,
    seed: int,
    noise: float,
    epsilon: float = DEFAULT_EPSILON,
) -> tuple[list[dict], dict]:
    """Repair randomized indefinite perturbations with both methods.

    Each trial draws its own generator from seed + trial index, so results
    are bitwise reproducible for fixed arguments. Returns per-trial records
    and a mean/max summary including the clip-vs-apd Frobenius ratio.
    """
    if size < 2:
        raise ValueError(f"size must be at least 2, got {size}")
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    records = []
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        original = _random_correlation(rng, size)
        perturbed = _indefinite_perturbation(rng, original, noise)
        clip = shrink_repair(perturbed, epsilon)
        apd = apd_nearest(perturbed)
        clip_vs_original = diff_norms(original.inner, clip.repaired.inner)
        apd_vs_original = diff_norms(original.inner, apd.repaired.inner)
        record = {
            "clip_vs_input_frobenius": clip.distance.frobenius,
            "clip_vs_input_max": clip.distance.max,
            "apd_vs_input_frobenius": apd.distance.frobenius,
            "apd_vs_input_max": apd.distance.max,
            "clip_vs_original_frobenius": clip_vs_original.frobenius,
            "clip_vs_original_max": clip_vs_original.max,
            "apd_vs_original_frobenius": apd_vs_original.frobenius,
            "apd_vs_original_max": apd_vs_original.max,
        }
        # Both distances vanish together (noise 0), where the ratio is 1 by
        # convention; apd cannot be exactly 0 while clip is not.
        if record["apd_vs_input_frobenius"] > 0.0:
            ratio = record["clip_vs_input_frobenius"] / record["apd_vs_input_frobenius"]
        else:
            ratio = 1.0
        record["frobenius_ratio"] = ratio
        records.append(record)
    summary = {
        "size": size,
        "trials": trials,
        "seed": seed,
        "noise": noise,
        "epsilon": epsilon,
    }
    for key in _TRIAL_METRICS:
        values = [record[key] for record in records]
        summary[f"mean_{key}"] = sum(values) / len(values)
        summary[f"max_{key}"] = max(values)
    return records, summary


def cmd_bench(args) -> int:
    _, summary = run_bench(
        size=args.size,
        trials=args.trials,
        seed=args.seed,
        noise=args.noise,
        epsilon=args.epsilon,
    )
    _emit_report(summary, args.report_format, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrfix",
        description="Compute, validate, and repair correlation matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument(
            "--format",
            dest="report_format",
            choices=["text", "json"],
            default="text",
            help="report format (default: text)",
        )

    corr = sub.add_parser(
        "corr", help="sample correlation matrix from a time-series panel CSV"
    )
    corr.add_argument("panel", help="panel CSV (date column first)")
    corr.add_argument(
        "--policy",
        choices=["fail", "drop", "pairwise"],
        default="fail",
        help="missing-data policy (default: fail)",
    )
    corr.add_argument(
        "--override",
        action="append",
        type=_override,
        default=[],
        metavar='"A,B,start:end"',
        help="restrict one pair to a 1-based inclusive date window (repeatable)",
    )
    corr.add_argument("--precision", type=_precision, default=6)
    corr.add_argument("--output", help="matrix CSV path (default: stdout)")
    corr.add_argument(
        "--header", action="store_true", help="write instrument labels with the matrix"
    )
    add_format(corr)
    corr.set_defaults(run=cmd_corr)

    check = sub.add_parser("check", help="validate a matrix CSV as a correlation matrix")
    check.add_argument("matrix", help="matrix CSV path")
    add_format(check)
    check.set_defaults(run=cmd_check)

    repair = sub.add_parser("repair", help="repair an indefinite matrix")
    repair.add_argument("matrix", help="matrix CSV path")
    repair.add_argument(
        "--epsilon",
        type=_positive_float,
        default=DEFAULT_EPSILON,
        help="eigenvalue floor for the clip method (default: 1e-8)",
    )
    repair.add_argument("--method", choices=["clip", "apd"], default="clip")
    repair.add_argument("--precision", type=_precision, default=6)
    repair.add_argument("--output", help="repaired matrix CSV path (default: stdout)")
    add_format(repair)
    repair.set_defaults(run=cmd_repair)

    compare = sub.add_parser("compare", help="norms of the difference of two matrices")
    compare.add_argument("matrix_a")
    compare.add_argument("matrix_b")
    add_format(compare)
    compare.set_defaults(run=cmd_compare)

    bench = sub.add_parser(
        "bench", help="randomized clip-vs-apd repair distance benchmark"
    )
    bench.add_argument("--size", type=_int_at_least(2), default=10)
    bench.add_argument("--trials", type=_int_at_least(1), default=20)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--noise", type=_nonnegative_float, default=0.1)
    bench.add_argument(
        "--epsilon",
        type=_positive_float,
        default=DEFAULT_EPSILON,
        help="eigenvalue floor for the clip repair (default: 1e-8)",
    )
    add_format(bench)
    bench.set_defaults(run=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
        # argparse uses 2 for usage errors; here 2 means "not a correlation
        # matrix", so usage problems are reported as plain errors.
        return 1 if code == 2 else code
    try:
        return args.run(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except GenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
