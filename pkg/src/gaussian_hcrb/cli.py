"""Command-line front end: ``python -m gaussian_hcrb {bounds,scan,verify,plot}``.

Exit codes: 0 ok, 2 bad arguments, 3 optimiser failure, 4 I/O error,
5 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path

import numpy as np

from . import estimation_bounds as eb
from . import fock_oracle as fo
from . import gaussian_core as gc
from .hcrb import (
    ConvergenceError,
    MinimizerConfig,
    derivative_coefficients,
    hcrb_closed,
    minimize_h,
    optimal_gendyne,
)
from .model import Model, ModelPoint
from .report import bounds_report

log = logging.getLogger(__name__)

EXIT_OK, EXIT_ARGS, EXIT_OPTIMIZER, EXIT_IO, EXIT_VERIFY = 0, 2, 3, 4, 5

QUANTITIES = {
    Model.SINGLE: ("c_s", "c_h", "c_h_closed", "heterodyne", "z_opt", "f_opt", "r_quantumness"),
    Model.TWO: ("c_s", "c_h", "c_h_closed", "double_homodyne", "r_quantumness"),
}
DEFAULT_RANGE = {Model.SINGLE: "0:3:61", Model.TWO: "0:1.5:7"}
FIGURES = {
    "1": (Model.SINGLE, "0:3:61", ("z_opt",)),
    "2": (Model.SINGLE, "0:3:61", ("f_opt",)),
    "3": (Model.TWO, "0:1.5:7", ("c_s", "c_h", "double_homodyne")),
}
CHECKS = ("qfi", "uhlmann", "derivatives", "sld", "moments", "bs")


class UsageError(Exception):
    pass


class CsvFormatError(ValueError):
    pass


def fmt(x: float) -> str:
    """12 significant digits, locale independent."""
    return format(float(x), "#.12g")


def parse_range(text: str) -> np.ndarray:
    try:
        lo, hi, steps = text.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise UsageError(f"range must look like min:max:steps, got {text!r}") from None
    if lo < 0 or not hi > lo or steps < 2:
        raise UsageError(f"need 0 <= min < max and steps >= 2, got {text!r}")
    return np.linspace(lo, hi, steps)


def _config(args) -> MinimizerConfig:
    try:
        return MinimizerConfig(restarts=args.restarts, tol=args.tol, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _row(r: float, model: Model, quantities: tuple, cfg: MinimizerConfig) -> list[float]:
    p = ModelPoint(model, (0.0, 0.0, r))
    out = []
    for q in quantities:
        if q == "c_s":
            out.append(eb.sld_crb(p))
        elif q == "c_h":
            out.append(minimize_h(p, cfg).value)
        elif q == "c_h_closed":
            out.append(hcrb_closed(p))
        elif q == "heterodyne":
            out.append(eb.heterodyne_precision(r))
        elif q == "z_opt":
            out.append(optimal_gendyne(r)[0])
        elif q == "f_opt":
            out.append(optimal_gendyne(r)[1])
        elif q == "double_homodyne":
            out.append(eb.double_homodyne_precision(r))
        elif q == "r_quantumness":
            out.append(eb.quantumness(eb.qfi_matrix(p), eb.uhlmann_matrix(p)))
    return out


def scan_table(model: Model, rs: np.ndarray, quantities: tuple, cfg: MinimizerConfig, jobs: int = 1):
    """Rows ``[r, *quantities]`` in r-order; ``jobs > 1`` evaluates rows in worker processes."""
    work = partial(_row, model=model, quantities=quantities, cfg=cfg)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(work, rs))
    else:
        rows = [work(r) for r in rs]
    return [[float(r), *vals] for r, vals in zip(rs, rows)]


def render_rows(header: list[str], rows: list[list[float]], form: str) -> str:
    if form == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([[fmt(v) for v in row] for row in rows])
        return buf.getvalue()
    if form == "json":
        recs = [{h: float(fmt(v)) for h, v in zip(header, row)} for row in rows]
        return json.dumps({"columns": header, "rows": recs}, indent=2) + "\n"
    width = 20
    lines = ["".join(h.rjust(width) for h in header)]
    lines += ["".join(fmt(v).rjust(width) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text, encoding="utf-8")


def cmd_bounds(args) -> int:
    if args.r is None:
        raise UsageError("--r is required")
    try:
        point = ModelPoint(args.model, (args.theta1, args.theta2, float(args.r)))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = bounds_report(point, _config(args))
    data = report.as_dict()
    if args.format == "json":
        _emit(json.dumps(data, indent=2) + "\n", args.out)
        return EXIT_OK
    lines = []
    for key, val in data.items():
        if key == "gendyne_best":
            lines.append(f"{'z_opt':<16}{fmt(val[0])}")
            lines.append(f"{'f_opt':<16}{fmt(val[1])}")
        elif key in ("model", "theta"):
            lines.append(f"{key:<16}{val}")
        else:
            lines.append(f"{key:<16}{fmt(val)}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.figure:
        model, default_range, quantities = FIGURES[args.figure]
        model_name = model.value
    else:
        model_name = args.model
        model = Model(model_name)
        default_range = DEFAULT_RANGE[model]
        quantities = tuple(q.strip() for q in args.quantities.split(",") if q.strip())
    if args.model and args.figure and Model(args.model) is not model:
        raise UsageError(f"figure {args.figure} uses the {model_name}-mode model")
    bad = [q for q in quantities if q not in QUANTITIES[model]]
    if bad or not quantities:
        raise UsageError(
            f"quantities {bad or quantities} not available for the {model_name}-mode model; "
            f"choose from {', '.join(QUANTITIES[model])}"
        )
    rs = parse_range(args.r_range or default_range)
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    rows = scan_table(model, rs, quantities, _config(args), args.jobs)
    _emit(render_rows(["r", *quantities], rows, args.format), args.out)
    return EXIT_OK


def _verify_points(model: Model, r_max: float):
    grid = np.arange(0.0, r_max + 1e-9, 0.25)
    for r in grid:
        for alpha in (0j, 0.3 + 0.7j):
            yield ModelPoint(model, (alpha.real, alpha.imag, float(r)))


def _subspace_basis(point, policy):
    if point.model is Model.SINGLE:
        idx = [(0, None), (1, None), (2, None)]
    else:
        idx = [(0, 0), (0, 1), (1, 0), (0, 2), (2, 0)]
    return np.stack([fo.model_basis(point, n, m, policy).amplitudes for n, m in idx], axis=1)


def run_checks(models, checks, policy: fo.TruncationPolicy, r_max: float, echo=print) -> bool:
    """Run oracle cross-checks, printing one line per check; True if all pass."""
    ok = True

    def report(name, dev, tol):
        nonlocal ok
        passed = dev < tol
        ok &= passed
        echo(f"{'PASS' if passed else 'FAIL'}  {name:<34} max deviation {dev:.3e} (tol {tol:.0e})")

    for model in models:
        tag = model.value
        try:
            if {"qfi", "uhlmann"} & set(checks):
                dq = du = 0.0
                for p in _verify_points(model, r_max):
                    Q, D = fo.oracle_qfi_uhlmann(p, policy)
                    dq = max(dq, np.max(np.abs(Q - eb.qfi_matrix(p))))
                    du = max(du, np.max(np.abs(D - eb.uhlmann_matrix(p))))
                if "qfi" in checks:
                    report(f"{tag}: QFI matrix", dq, 1e-6)
                if "uhlmann" in checks:
                    report(f"{tag}: Uhlmann curvature", du, 1e-6)
            # amplitude-level comparisons need a tail budget near (1e-8)^2
            strict = fo.TruncationPolicy(policy.N, min(policy.tail_tol, 1e-18), policy.fd_step)
            if "derivatives" in checks:
                dev = 0.0
                for p in _verify_points(model, r_max):
                    frame = "factored" if model is Model.TWO else "original"
                    pol = fo.resolve_truncation(p, strict, frame)
                    basis = _subspace_basis(p, pol)
                    coeffs = derivative_coefficients(p)
                    for mu, der in enumerate(fo.fd_derivatives(p, pol, frame)):
                        dev = max(dev, np.linalg.norm(der.amplitudes - basis @ coeffs[mu]))
                report(f"{tag}: state derivatives", dev, 1e-8)
            if "sld" in checks:
                dev = max(fo.sld_lyapunov_residual(p, policy) for p in _verify_points(model, r_max))
                report(f"{tag}: SLD Lyapunov residual", dev, 1e-6)
            if "moments" in checks:
                dev = 0.0
                for p in _verify_points(model, r_max):
                    if model is Model.SINGLE:
                        g = gc.single_mode_model_gaussian(p)
                        vec = fo.model_state(p, policy)
                    else:
                        g = gc.two_mode_model_gaussian(p)
                        vec = fo.model_state(p, policy, "factored")
                    mean, cov = fo.quadrature_moments(vec)
                    dev = max(dev, np.max(np.abs(mean - g.mean)), np.max(np.abs(cov - g.cov)))
                report(f"{tag}: Gaussian moments", dev, 1e-8)
            if "bs" in checks and model is Model.TWO:
                dev = max(
                    fo.bs_factorization_check(ModelPoint.two(*th), strict)
                    for th in ((0, 0, 0.5), (0.5, 0.5, 0.8), (1, 0, 1.2))
                )
                report(f"{tag}: beam-splitter factorisation", dev, 1e-8)
        except fo.TruncationError as exc:
            ok = False
            echo(f"FAIL  {tag}: {exc}")
    return ok


def cmd_verify(args) -> int:
    checks = tuple(c.strip() for c in args.check.split(",")) if args.check else CHECKS
    bad = [c for c in checks if c not in CHECKS]
    if bad:
        raise UsageError(f"unknown checks {bad}; choose from {', '.join(CHECKS)}")
    if args.r_max < 0:
        raise UsageError("--r-max must be non-negative")
    try:
        policy = fo.TruncationPolicy(N=args.trunc)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    models = [Model(args.model)] if args.model else [Model.SINGLE, Model.TWO]
    ok = run_checks(models, checks, policy, args.r_max)
    print("all checks passed" if ok else "verification FAILED")
    return EXIT_OK if ok else EXIT_VERIFY


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Parse a scan CSV; raises :class:`CsvFormatError` if it is empty or malformed."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise CsvFormatError(f"{path}: no data rows")
    header, body = rows[0], rows[1:]
    if not header or header[0] != "r" or any(len(row) != len(header) for row in body):
        raise CsvFormatError(f"{path}: malformed scan CSV")
    try:
        return header, np.array(body, dtype=float)
    except ValueError:
        raise CsvFormatError(f"{path}: non-numeric entries") from None


def emit_plot(csv_path, svg_path) -> None:
    """Line plot of every scan column against ``r``, written as a deterministic SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    header, data = read_csv(csv_path)
    styles = {"c_s": dict(ls="--"), "c_h": dict(ls="none", marker="o")}
    with matplotlib.rc_context({"svg.hashsalt": "gaussian-hcrb", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for j, name in enumerate(header[1:], start=1):
            ax.plot(data[:, 0], data[:, j], label=name, **styles.get(name, {}))
        ax.set_xlabel(header[0])
        ax.set_ylabel(", ".join(header[1:]))
        ax.legend()
        fig.tight_layout()
        fig.savefig(svg_path, format="svg", metadata={"Date": None})
        plt.close(fig)


def cmd_plot(args) -> int:
    emit_plot(args.csv, args.out or Path(args.csv).with_suffix(".svg"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaussian-hcrb", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def optimiser_flags(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--restarts", type=int, default=MinimizerConfig.restarts)
        p.add_argument("--tol", type=float, default=MinimizerConfig.tol)

    p = sub.add_parser("bounds", help="all bounds at one point")
    p.add_argument("--model", choices=["single", "two"], default="single")
    p.add_argument("--r", type=float)
    p.add_argument("--theta1", type=float, default=0.0)
    p.add_argument("--theta2", type=float, default=0.0)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.add_argument("--out")
    optimiser_flags(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("scan", help="bounds over a grid of squeezing values")
    p.add_argument("--model", choices=["single", "two"])
    p.add_argument("--figure", choices=sorted(FIGURES), help="preset reproducing a figure")
    p.add_argument("--r-range", "--r", dest="r_range", metavar="MIN:MAX:STEPS")
    p.add_argument("--quantities", default="c_s,c_h")
    p.add_argument("--format", choices=["csv", "json", "table"], default="csv")
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    optimiser_flags(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify", help="Fock-space oracle cross-checks")
    p.add_argument("--model", choices=["single", "two"])
    p.add_argument("--check", help=f"comma-separated subset of {','.join(CHECKS)}")
    p.add_argument("--trunc", type=int, help="fixed Fock cutoff (default: automatic)")
    p.add_argument("--r-max", type=float, default=1.25)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="render a scan CSV as SVG")
    p.add_argument("csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.command == "scan" and not (args.model or args.figure):
        args.model = "single"
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except ConvergenceError as exc:
        print(f"optimiser failure: {exc}", file=sys.stderr)
        return EXIT_OPTIMIZER
    except (OSError, CsvFormatError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
