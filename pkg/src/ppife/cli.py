"""Command-line driver: solve, converge, cond-trace and verify."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_GEOMETRY = 3
EXIT_SOLVER = 4

COMMANDS = ("solve", "converge", "cond-trace", "verify")
PROBLEM_NAMES = ("line", "circle", "ellipse")
STEP_COLUMNS = ("step", "t", "l2_norm", "residual", "lambda_min", "lambda_max", "cond")

log = logging.getLogger("ppife")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    problem: str = "line"
    Ns: list = field(default_factory=lambda: [16])
    t_final: float = 1.0
    sigma: float | None = None
    out: str | None = None
    threads: int | None = None
    emit_cond: bool = False
    emit_matrices: bool = False
    emit_steps: bool = False
    strict_geometry: bool = False


def _mesh_list(text: str) -> list:
    try:
        Ns = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed mesh size list {text!r}")
    if not Ns:
        raise argparse.ArgumentTypeError("empty mesh size list")
    if min(Ns) < 2:
        raise argparse.ArgumentTypeError("mesh sizes must be at least 2")
    return Ns


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed number {text!r}")
    if not v > 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {text}")
    return v


def _threads(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed thread count {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("thread count must be positive")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ppife", description="Partially penalized IFE solver for moving-interface heat problems.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--problem", choices=PROBLEM_NAMES, default="line")
    p.add_argument("--n", dest="Ns", type=_mesh_list, default=None,
                   help="mesh size N or comma list (default 16; 8,16,32 for converge)")
    p.add_argument("--t-final", type=_positive, default=1.0)
    p.add_argument("--sigma", type=_positive, default=None, help="penalty (default 100 max beta)")
    p.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    p.add_argument("--threads", type=_threads, default=None, help="BLAS threads (default all cores)")
    p.add_argument("--emit-cond", action="store_true", help="estimate cond(M + tau A) every step")
    p.add_argument("--emit-matrices", action="store_true", help="dump final-step A, M, C in COO text")
    p.add_argument("--emit-steps", action="store_true", help="write per-step records")
    p.add_argument("--strict-geometry", action="store_true",
                   help="fail on edges crossed twice instead of following vertex signs")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def parse_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    if ns.Ns is None:
        ns.Ns = [8, 16, 32] if ns.command == "converge" else [16]
    if ns.command in ("solve", "cond-trace") and len(ns.Ns) != 1:
        raise UsageError(f"ppife: {ns.command} takes a single mesh size")
    if ns.command == "converge" and ns.Ns != sorted(set(ns.Ns)):
        raise UsageError("ppife: converge needs strictly ascending mesh sizes")
    if ns.verbose:
        logging.basicConfig(level=logging.INFO, format="%(message)s")
    return RunConfig(ns.command, ns.problem, ns.Ns, ns.t_final, ns.sigma, ns.out, ns.threads,
                     ns.emit_cond, ns.emit_matrices, ns.emit_steps, ns.strict_geometry)


def _sibling(out, suffix):
    if out is None:
        return Path(f"ppife_{suffix}")
    p = Path(out)
    return p.with_name(f"{p.stem}_{suffix}")


def _emit(write, out):
    if out is None:
        import io
        buf = io.StringIO()
        write(buf)
        sys.stdout.write(buf.getvalue())
    else:
        with open(out, "w", newline="") as fh:
            write(fh)


def _solve(cfg: RunConfig):
    from .analysis import ERROR_COLUMNS, _fmt, solution_errors
    from .assembly import dump_coo
    from .benchmarks import make_problem
    from .stepper import TimeGrid, run, step_matrices

    problem = make_problem(cfg.problem)
    N = cfg.Ns[0]
    grid = TimeGrid(cfg.t_final, N * N)
    keep = "all" if cfg.emit_matrices else "final"
    hist = run(problem, N, grid, cfg.sigma, emit_cond=cfg.emit_cond, keep=keep,
               strict_geometry=cfg.strict_geometry)
    errs = solution_errors(hist.mesh, hist.final_state, hist.final_bases, hist.final, problem, cfg.t_final)

    def write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ERROR_COLUMNS[:6])
        w.writerow([_fmt(v) for v in (N, hist.mesh.h, grid.tau, *errs)])

    _emit(write, cfg.out)
    if cfg.emit_steps:
        with open(_sibling(cfg.out, "steps.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(STEP_COLUMNS)
            for r in hist.records:
                w.writerow([_fmt(getattr(r, c)) for c in STEP_COLUMNS])
    if cfg.emit_matrices:
        from .basis import build_bases

        s_old, s_new = hist.states[-2], hist.states[-1]
        beta = problem.beta
        mats = step_matrices(hist.mesh, s_old, s_new, build_bases(hist.mesh, s_old, beta),
                             hist.final_bases, beta, hist.sigma, problem.f, cfg.t_final)
        for name in ("A", "M", "C"):
            dump_coo(getattr(mats, name), _sibling(cfg.out, f"{name}.txt"))
    return EXIT_OK


def _converge(cfg: RunConfig):
    from .analysis import convergence_study, write_error_csv

    def report(rep):
        log.info("N=%d Linf=%.3e L2=%.3e H1=%.3e %s", rep.N, rep.linf, rep.l2, rep.h1, rep.orders)

    reports = convergence_study(cfg.problem, cfg.Ns, cfg.t_final, cfg.sigma, cfg.emit_cond, report)
    _emit(lambda fh: write_error_csv(reports, fh), cfg.out)
    return EXIT_OK


def _cond_trace(cfg: RunConfig):
    from .analysis import condition_trace, write_cond_csv

    rows = condition_trace(cfg.problem, cfg.Ns[0], cfg.t_final, cfg.sigma)
    _emit(lambda fh: write_cond_csv(rows, fh), cfg.out)
    return EXIT_OK


def _verify(cfg: RunConfig):
    from .checks import run_all

    results = run_all()
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    if cfg.out is not None:
        with open(cfg.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("check", "passed", "value", "tolerance"))
            for r in results:
                w.writerow((r.name, int(r.passed), f"{r.value:.17g}", f"{r.tolerance:.17g}"))
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


_HANDLERS = {"solve": _solve, "converge": _converge, "cond-trace": _cond_trace, "verify": _verify}


def run_config(cfg: RunConfig) -> int:
    from threadpoolctl import threadpool_limits

    from .errors import GeometryViolation, PPIFEError
    from .stepper import StepFailure

    try:
        with threadpool_limits(limits=cfg.threads):
            return _HANDLERS[cfg.command](cfg)
    except (StepFailure, PPIFEError) as exc:
        cause = exc.cause if isinstance(exc, StepFailure) else exc
        print(f"ppife: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY if isinstance(cause, GeometryViolation) else EXIT_SOLVER


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    return run_config(cfg)


if __name__ == "__main__":
    sys.exit(main())
