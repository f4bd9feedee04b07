"""
Command Line Interface
Validate specs, simulate ensembles and check queries

Exit codes: 0 success, 1 I/O or run-generation failure, 2 syntax, validation
or usage error, 3 rejected, 4 inconclusive or degenerate comparison.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from backend.avcase.bundle import MODEL_FILE, SPEC_FILE, WCET_FILE, load_wcet
from backend.config import get_settings
from backend.errors import (
    BadParameter,
    CyclicDefinition,
    DegenerateDenominator,
    EmptyEnsemble,
    GeneratorFailure,
    InvalidModel,
    MissingRate,
    ModelDeadlock,
    PrccslError,
    SpecSyntaxError,
    TraceFormatError,
    UndeclaredClock,
    UnknownClock,
)
from backend.models.schemas import VerdictReport
from backend.simulator.batch import simulate_batch
from backend.simulator.model import load_model
from backend.smc.runner import CheckOptions, QueryRunner, fixed_source, simulation_sources
from backend.smc.sources import TraceSource
from backend.speclang.parser import parse_spec_file
from backend.speclang.validator import validate_spec
from backend.trace.trace_io import write_traces

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_REJECT = 3
EXIT_INCONCLUSIVE = 4

DECISION_CODES = {
    "accept": EXIT_OK,
    "holds": EXIT_OK,
    "estimated": EXIT_OK,
    "simulated": EXIT_OK,
    "reject": EXIT_REJECT,
    "fails": EXIT_REJECT,
    "inconclusive": EXIT_INCONCLUSIVE,
}

USAGE_ERRORS = (SpecSyntaxError, BadParameter, UndeclaredClock, UnknownClock, CyclicDefinition, InvalidModel, EmptyEnsemble)
IO_ERRORS = (OSError, TraceFormatError, GeneratorFailure, ModelDeadlock, MissingRate)


def exit_code(decision: str) -> int:
    return DECISION_CODES.get(decision, EXIT_OK)


def _default(path: Optional[str], name: str) -> Path:
    return Path(path) if path else get_settings().av_data_dir / name


def _wcet_for(spec_path: Path, explicit: Optional[str]) -> Optional[dict]:
    """WCET table from --wcet, else wcet.json next to the spec"""
    if explicit:
        return load_wcet(explicit)
    sibling = spec_path.parent / WCET_FILE
    return load_wcet(sibling) if sibling.exists() else None


def _print_report(report: VerdictReport) -> None:
    marker = {EXIT_OK: "✓", EXIT_REJECT: "✗"}.get(exit_code(report.decision), "⚠")
    print(f"  {marker} {report.query_id}: {report.decision} ({report.runs} runs, {report.wall_clock:.2f}s)")
    print(f"    {report.query_text}")
    if report.interval is not None:
        print(f"    interval: [{report.interval[0]:.3f}, {report.interval[1]:.3f}], estimate {report.point_estimate:.3f}")
    if report.mean is not None:
        print(f"    mean: {report.mean:.3f} ± {report.half_width:.3f}")
    if report.ratio is not None:
        print(f"    estimated ratio: {report.ratio:.3f}")
    for line in report.relations:
        print(f"    {line}")
    for path in report.artifacts:
        print(f"    wrote {path}")


def cmd_validate(args) -> int:
    """Parse and validate a spec"""
    spec_path = _default(args.spec, SPEC_FILE)
    print("=" * 60)
    print(f"Validating {spec_path}")
    print("=" * 60)

    try:
        spec = parse_spec_file(spec_path)
        wcet = _wcet_for(spec_path, args.wcet)
    except SpecSyntaxError as e:
        print(f"  ✗ Syntax error at {e}")
        return EXIT_USAGE
    except OSError as e:
        print(f"  ✗ Cannot read spec: {e}")
        return EXIT_IO

    diagnostics = validate_spec(spec, wcet)
    print(f"  ✓ Parsed {len(spec.clocks)} clocks, {len(spec.constraints)} constraints, {len(spec.queries)} queries")
    if wcet is not None:
        print(f"  ✓ WCET table with {len(wcet)} entries")
    for d in diagnostics:
        print(f"  ✗ [{d.severity}] {d.code}: {d.message}")

    print("=" * 60)
    print("Spec is valid" if not diagnostics else f"{len(diagnostics)} problem(s) found")
    print("=" * 60)
    return EXIT_OK if not diagnostics else EXIT_USAGE


def cmd_simulate(args) -> int:
    """Simulate an ensemble and write JSONL traces"""
    settings = get_settings()
    runs = args.runs if args.runs is not None else 1
    if runs < 1:
        print(f"  ✗ --runs must be >= 1, got {runs}")
        return EXIT_USAGE
    model_path = _default(args.model, MODEL_FILE)
    bound = settings.bound if args.bound is None else args.bound
    if bound < 1:
        print(f"  ✗ --bound must be >= 1, got {bound}")
        return EXIT_USAGE
    seed = settings.seed if args.seed is None else args.seed
    jobs = args.jobs or settings.resolved_jobs()
    out_dir = Path(args.out or "traces")

    print("=" * 60)
    print("Simulating")
    print("=" * 60)
    print(f"  Model: {model_path}")
    print(f"  Runs: {runs}, bound: {bound} ms, seed: {seed}, jobs: {jobs}")

    model = load_model(model_path)
    ensemble = simulate_batch(model, bound, seed, runs, jobs=jobs, strict=args.strict)
    paths = write_traces(ensemble, out_dir)
    flagged = [r.meta["stream"] for r in ensemble if "deadlock" in r.meta]

    print(f"  ✓ Wrote {len(paths)} traces to {out_dir}")
    if flagged:
        print(f"  ⚠ Runs truncated by a deadlock: {flagged}")
    print("=" * 60)
    return EXIT_OK


def _runner(args) -> QueryRunner:
    settings = get_settings()
    spec_path = _default(args.spec, SPEC_FILE)
    spec = parse_spec_file(spec_path)
    wcet = _wcet_for(spec_path, args.wcet) or {}
    seed = settings.seed if args.seed is None else args.seed

    if args.traces:
        sources = fixed_source(TraceSource.from_dir(args.traces))
    else:
        model = load_model(_default(args.model, MODEL_FILE))
        sources = simulation_sources(model, seed, jobs=args.jobs or settings.resolved_jobs())

    options = CheckOptions(
        seed=seed,
        runs=args.runs,
        bound=args.bound,
        alpha=args.alpha,
        beta=args.beta,
        delta=args.delta,
        epsilon=args.epsilon,
        max_runs=args.max_runs,
        out_dir=Path(args.out) if args.out else None,
        plot=args.plot,
    )
    return QueryRunner(spec, sources, options, wcet)


def _save(report: VerdictReport, out: Optional[str]) -> None:
    if not out:
        return
    path = Path(out) / f"{report.query_id}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    report.artifacts.append(str(path))


def cmd_check(args) -> int:
    """Run one query (or the ensemble verdict of one constraint)"""
    runner = _runner(args)
    print("=" * 60)
    print(f"Checking {args.query}")
    print("=" * 60)
    report = runner.run(args.query)
    _save(report, args.out)
    _print_report(report)
    print("=" * 60)
    return exit_code(report.decision)


def cmd_table(args) -> int:
    """Run every query of a spec and print a summary table"""
    runner = _runner(args)
    print("=" * 60)
    print(f"Checking {len(runner.spec.queries)} queries")
    print("=" * 60)

    worst = EXIT_OK
    rows = []
    for query in runner.spec.queries:
        try:
            report = runner.run(query.name)
        except DegenerateDenominator as e:
            print(f"  ⚠ {query.name}: {e}")
            rows.append((query.name, "degenerate", "-", "-"))
            worst = max(worst, EXIT_INCONCLUSIVE)
            continue
        _save(report, args.out)
        _print_report(report)
        rows.append((report.query_id, report.decision, str(report.runs), _result_text(report)))
        worst = max(worst, exit_code(report.decision))

    print("\n" + "=" * 60)
    print(f"{'query':<12} {'decision':<13} {'runs':>6}  result")
    print("-" * 60)
    for name, decision, runs, result in rows:
        print(f"{name:<12} {decision:<13} {runs:>6}  {result}")
    print("=" * 60)
    return worst


def _result_text(report: VerdictReport) -> str:
    if report.interval is not None:
        return f"[{report.interval[0]:.3f}, {report.interval[1]:.3f}]"
    if report.mean is not None:
        return f"{report.mean:.2f}±{report.half_width:.2f}"
    if report.ratio is not None:
        return f"ratio {report.ratio:.2f}"
    if report.satisfied is not None:
        return f"{report.satisfied}/{report.runs}"
    return ""


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog="prccsl", description="PrCCSL specification and statistical checking toolkit")
    parser.add_argument("--log-level", default=settings.log_level, help="Logging level (default from PRCCSL_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    validate = sub.add_parser("validate", help="Parse and validate a spec")
    validate.add_argument("spec", nargs="?", help="Spec file (default: bundled AV spec)")
    validate.add_argument("--wcet", help="WCET table (default: wcet.json next to the spec)")
    validate.set_defaults(func=cmd_validate)

    simulate = sub.add_parser("simulate", help="Simulate runs and write JSONL traces")
    simulate.add_argument("--model", help="Model JSON (default: bundled AV model)")
    simulate.add_argument("--runs", type=int, help="Number of runs (default 1)")
    simulate.add_argument("--bound", type=int, help="Horizon in ms")
    simulate.add_argument("--seed", type=int, help="Master seed (default PRCCSL_SEED)")
    simulate.add_argument("--jobs", type=int, help="Worker processes (default: all cores)")
    simulate.add_argument("--out", help="Trace directory (default ./traces)")
    simulate.add_argument("--strict", action="store_true", help="Fail on deadlock instead of truncating")
    simulate.set_defaults(func=cmd_simulate)

    for name, func, text in (
        ("check", cmd_check, "Run one query or constraint check"),
        ("table", cmd_table, "Run every query of a spec"),
    ):
        command = sub.add_parser(name, help=text)
        if name == "check":
            command.add_argument("--query", required=True, help="Query id or constraint id")
        command.add_argument("--spec", help="Spec file (default: bundled AV spec)")
        command.add_argument("--wcet", help="WCET table (default: wcet.json next to the spec)")
        command.add_argument("--model", help="Model JSON (default: bundled AV model)")
        command.add_argument("--traces", help="Check recorded traces instead of simulating")
        command.add_argument("--runs", type=int, help="Runs for ensembles and fixed-size queries")
        command.add_argument("--bound", type=int, help="Horizon for constraint-id checks")
        command.add_argument("--seed", type=int, help="Master seed (default PRCCSL_SEED)")
        command.add_argument("--alpha", type=float, help="False-positive strength")
        command.add_argument("--beta", type=float, help="False-negative strength")
        command.add_argument("--delta", type=float, help="Indifference half-width")
        command.add_argument("--epsilon", type=float, help="Estimation precision")
        command.add_argument("--max-runs", type=int, help="Cap for sequential tests")
        command.add_argument("--jobs", type=int, help="Worker processes (default: all cores)")
        command.add_argument("--out", help="Directory for reports, CSVs and plots")
        command.add_argument("--plot", action="store_true", help="Also write PNG plots")
        command.set_defaults(func=func)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run a command and map errors to exit codes"""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        return args.func(args)
    except DegenerateDenominator as e:
        print(f"  ⚠ {e}")
        return EXIT_INCONCLUSIVE
    except SpecSyntaxError as e:
        print(f"  ✗ Syntax error at line {e.line}, column {e.column}: {e}")
        return EXIT_USAGE
    except USAGE_ERRORS as e:
        print(f"  ✗ {type(e).__name__}: {e}")
        return EXIT_USAGE
    except IO_ERRORS as e:
        print(f"  ✗ {type(e).__name__}: {e}")
        return EXIT_IO
    except PrccslError as e:
        print(f"  ✗ {type(e).__name__}: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
