"""Command-line entry point.

    rpsm solve   --example 1 --order 6
    rpsm errors  --example 3 --order 10 --format md
    rpsm compare --example 2 --order 15
    rpsm sweep   --example 2 --orders 5,10,15,20,25 --grid 0.5:8:0.5
    rpsm --dump-example 1 > example1.json

Exit codes: 0 success, 1 usage or validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import analysis
from .builtin import EXAMPLES, example
from .expression import EvaluationError
from .oracle import DEFAULT_STEP, OracleError, deviation, integrate
from .problem import ProblemError, dump_problem, load_problem
from .series import SeriesError
from .solver import SolveError, solve

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class RunConfig:
    example: int | None = None
    problem: str | None = None
    order: int = 10
    grid: str = "0.2:1.0:0.2"
    format: str = "csv"
    output: str | None = None
    metrics: tuple[str, ...] = analysis.METRICS
    use_oracle: bool = False
    h: float = DEFAULT_STEP
    orders: tuple[int, ...] = ()

    def load(self):
        if self.problem is not None:
            return load_problem(self.problem)
        return example(self.example)


def parse_grid(spec: str) -> list[float]:
    """``start:stop:step`` with ``stop`` included."""
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise UsageError(f"grid must look like start:stop:step, got {spec!r}") from None
    if not step > 0:
        raise UsageError(f"grid step must be positive, got {step!r}")
    if not start > 0:
        raise UsageError(f"grid start must exceed 0 (t in (t0, T]), got {start!r}")
    if stop < start:
        raise UsageError(f"grid stop {stop!r} is below start {start!r}")
    count = int((stop - start) / step + 1e-9) + 1
    return [round(start + k * step, 12) for k in range(count)]


def parse_orders(spec: str) -> tuple[int, ...]:
    parts = [p.strip() for p in spec.split(",") if p.strip()]
    if not parts:
        raise UsageError("--orders needs a comma-separated list of orders, e.g. 5,10,15")
    try:
        ks = tuple(int(p) for p in parts)
    except ValueError:
        raise UsageError(f"orders must be integers, got {spec!r}") from None
    if min(ks) < 1:
        raise UsageError("orders must be >= 1")
    return ks


def parse_metrics(spec: str) -> tuple[str, ...]:
    ms = tuple(m.strip() for m in spec.split(",") if m.strip())
    bad = [m for m in ms if m not in analysis.METRICS]
    if bad or not ms:
        raise UsageError(f"metrics must be drawn from {','.join(analysis.METRICS)}, got {spec!r}")
    return ms


def _grid_for(cfg: RunConfig, t_end: float) -> list[float]:
    grid = parse_grid(cfg.grid)
    if grid[-1] > t_end * (1 + 1e-12):
        raise UsageError(f"grid end {grid[-1]!r} exceeds the problem's t_end = {t_end!r}")
    return grid


def cmd_solve(cfg: RunConfig) -> str:
    if cfg.order < 1:
        raise UsageError(f"order K must be >= 1, got {cfg.order}")
    system, init = cfg.load()
    sol = solve(system, init, cfg.order)
    lines = [f"# {system.label}", f"# order K = {sol.order}",
             "# residual head: " + " ".join(f"{r:.3e}" for r in sol.residual_head),
             "i m c_im"]
    for i, comp in enumerate(sol.components, start=1):
        for m, c in enumerate(comp):
            lines.append(f"{i} {m} {c:.17g}")
    return "\n".join(lines) + "\n"


def cmd_errors(cfg: RunConfig) -> str:
    if cfg.order < 1:
        raise UsageError(f"order K must be >= 1, got {cfg.order}")
    system, init = cfg.load()
    grid = _grid_for(cfg, init.t_end)
    opts = analysis.ReportOptions(metrics=cfg.metrics, use_oracle=cfg.use_oracle, oracle_h=cfg.h)
    report = analysis.build_report(system, init, cfg.order, grid, opts)
    if cfg.format == "md":
        return analysis.report_to_markdown(report)
    return analysis.report_to_csv(report)


def cmd_compare(cfg: RunConfig) -> str:
    if cfg.order < 1:
        raise UsageError(f"order K must be >= 1, got {cfg.order}")
    system, init = cfg.load()
    grid = _grid_for(cfg, init.t_end)
    sol = solve(system, init, cfg.order)
    ref = integrate(system, init, cfg.h, t_end=grid[-1])
    dev = deviation(ref, sol, grid)
    lines = [f"# {system.label}",
             f"# RPSM order K = {cfg.order} vs RK4 h = {cfg.h!r} on {cfg.grid}",
             "i max_abs_deviation"]
    lines += [f"{i} {d:.6e}" for i, d in enumerate(dev, start=1)]
    return "\n".join(lines) + "\n"


def cmd_sweep(cfg: RunConfig) -> str:
    system, init = cfg.load()
    grid = _grid_for(cfg, init.t_end)
    rows = analysis.convergence_sweep(system, init, cfg.orders, grid, oracle_h=cfg.h)
    return analysis.sweep_to_csv(rows)


COMMANDS = {"solve": cmd_solve, "errors": cmd_errors, "compare": cmd_compare, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rpsm", description="Residual power series solver for "
                                         "multi-pantograph delay differential systems.")
    p.add_argument("--dump-example", type=int, metavar="N", choices=sorted(EXAMPLES),
                   help="write built-in example N as a problem file and exit")
    p.add_argument("-o", "--output", help="write to this file instead of standard output")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, order=True, grid=True):
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--example", type=int, choices=sorted(EXAMPLES), help="built-in example")
        src.add_argument("--problem", metavar="PATH", help="problem file (JSON)")
        if order:
            sp.add_argument("--order", "-K", type=int, default=10, help="truncation order (default 10)")
        if grid:
            sp.add_argument("--grid", default="0.2:1.0:0.2", help="start:stop:step (default 0.2:1.0:0.2)")
        sp.add_argument("-o", "--output", dest="sub_output", help="output file")

    sp = sub.add_parser("solve", help="print series coefficients")
    common(sp, grid=False)

    sp = sub.add_parser("errors", help="error tables against closed form or oracle")
    common(sp)
    sp.add_argument("--format", choices=("csv", "md"), default="csv")
    sp.add_argument("--metrics", default=",".join(analysis.METRICS),
                    help="comma-separated subset of res,ext,rel,con,rem")
    sp.add_argument("--oracle", action="store_true",
                    help="also run the RK4 oracle and record its deviation")
    sp.add_argument("--h", type=float, default=DEFAULT_STEP, help="oracle step (default 1e-3)")

    sp = sub.add_parser("compare", help="max deviation between RPSM and the RK4 oracle")
    common(sp)
    sp.add_argument("--h", type=float, default=DEFAULT_STEP)

    sp = sub.add_parser("sweep", help="exact error versus order, as CSV plot data")
    common(sp, order=False)
    sp.add_argument("--orders", required=True, help="comma-separated orders, e.g. 5,10,15,20,25")
    sp.add_argument("--h", type=float, default=DEFAULT_STEP)
    return p


def _config(args) -> RunConfig:
    kw = dict(example=args.example, problem=args.problem,
              output=getattr(args, "sub_output", None) or args.output)
    for name in ("order", "grid", "format", "h"):
        if hasattr(args, name):
            kw[name] = getattr(args, name)
    if hasattr(args, "metrics"):
        kw["metrics"] = parse_metrics(args.metrics)
    if hasattr(args, "oracle"):
        kw["use_oracle"] = args.oracle
    if hasattr(args, "orders"):
        kw["orders"] = parse_orders(args.orders)
    return RunConfig(**kw)


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.dump_example is not None:
            system, init = example(args.dump_example)
            _emit(dump_problem(system, init), args.output)
            return EXIT_OK
        if args.command is None:
            raise UsageError("rpsm: a command is required (solve, errors, compare, sweep)")
        cfg = _config(args)
        _emit(COMMANDS[args.command](cfg), cfg.output)
        return EXIT_OK
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolveError, OracleError, EvaluationError, SeriesError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ProblemError as exc:
        print("invalid problem:", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
