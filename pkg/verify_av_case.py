"""
AV Case Verification Script
Validates the bundled spec, simulates an ensemble and checks the headline queries
"""

import sys
import time
from pathlib import Path

from dotenv import load_dotenv

from backend.avcase.bundle import build_av_bundle, r_spec_table
from backend.config import get_settings
from backend.errors import PrccslError
from backend.simulator.batch import simulate_batch
from backend.smc.runner import CheckOptions, QueryRunner, simulation_sources
from backend.speclang.validator import validate_spec
from backend.trace.trace_io import write_traces

QUERIES = ["HT_R1", "HT_R2", "HT_R6", "HT_R9", "HT_R27", "EV_cmr", "ENS_R1"]


def main():
    """Main verification process"""
    print("=" * 60)
    print("PrCCSL Toolkit - AV Case Verification")
    print("=" * 60)

    # Load environment variables
    load_dotenv()
    settings = get_settings()
    out_dir = Path("./data/processed/av")

    print(f"\nConfiguration:")
    print(f"  Data dir: {settings.av_data_dir}")
    print(f"  Seed: {settings.seed}")
    print(f"  Bound: {settings.bound} ms")
    print(f"  Jobs: {settings.resolved_jobs()}")
    print()

    # Step 1: Load the bundle
    print("Step 1: Loading model, spec and WCET table...")
    try:
        bundle = build_av_bundle()
        print(f"  ✓ {len(bundle.model.automata)} automata, {len(bundle.model.events)} events")
        print(f"  ✓ {len(r_spec_table(bundle))} requirements, {len(bundle.spec.queries)} queries")
    except (OSError, PrccslError) as e:
        print(f"  ✗ Error loading bundle: {e}")
        sys.exit(1)

    # Step 2: Validate the spec
    print("\nStep 2: Validating spec...")
    diagnostics = validate_spec(bundle.spec, bundle.wcet)
    if diagnostics:
        for d in diagnostics:
            print(f"  ✗ [{d.severity}] {d.code}: {d.message}")
        sys.exit(2)
    print("  ✓ No diagnostics")

    # Step 3: Simulate a small ensemble
    print("\nStep 3: Simulating runs...")
    try:
        runs = simulate_batch(bundle.model, settings.bound, seed=settings.seed, k=10, jobs=settings.resolved_jobs())
        paths = write_traces(runs, out_dir / "traces")
        print(f"  ✓ Wrote {len(paths)} traces to {out_dir / 'traces'}")
    except (OSError, PrccslError) as e:
        print(f"  ✗ Error simulating: {e}")
        sys.exit(1)

    # Step 4: Check queries
    print("\nStep 4: Checking queries...")
    runner = QueryRunner(
        bundle.spec,
        simulation_sources(bundle.model, settings.seed, settings.resolved_jobs()),
        CheckOptions(seed=settings.seed, out_dir=out_dir),
        bundle.wcet,
    )
    started = time.perf_counter()
    failures = 0
    for name in QUERIES:
        try:
            report = runner.run(name)
        except PrccslError as e:
            print(f"  ✗ {name}: {type(e).__name__}: {e}")
            failures += 1
            continue
        ok = report.decision in ("accept", "holds", "estimated")
        failures += not ok
        print(f"  {'✓' if ok else '⚠'} {name}: {report.decision} after {report.runs} runs")

    # Summary
    print("\n" + "=" * 60)
    print("Verification Complete!" if not failures else f"{failures} queries did not pass")
    print("=" * 60)
    print(f"Queries checked: {len(QUERIES)} in {time.perf_counter() - started:.1f}s")
    print(f"Artifacts: {out_dir}")
    print("\nTry the CLI:")
    print("  python -m backend.cli table --seed 42")
    print("=" * 60)
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
