#!/usr/bin/env python3
"""
Development script to run the bundled simulation scenarios and collect their
summary tables.

Usage:
    python dev/reproduce.py [--scenario NAME] [--threads N] [--reps N] [--out DIR]
"""

import argparse
import sys
import time
from pathlib import Path

from mcfauc.model.errors import McfAucError
from mcfauc.simulation.scenario import load_scenario
from mcfauc.simulation.study import power_curve, run_study, tables_to_frame


def find_scenarios(names):
    """Scenario files under scenarios/, optionally filtered by name."""
    # Get the project root directory (parent of dev/)
    project_root = Path(__file__).parent.parent
    paths = sorted((project_root / "scenarios").glob("*.yaml"))
    if names:
        wanted = set(names)
        paths = [p for p in paths if p.stem in wanted]
        missing = wanted - {p.stem for p in paths}
        if missing:
            print(f"❌ Unknown scenario(s): {', '.join(sorted(missing))}")
            sys.exit(1)
    return paths


def run_scenario(path, threads, reps, out_dir):
    spec = load_scenario(path)
    if reps:
        spec = spec.with_overrides(replicates=reps)
    print(f"🎲 {path.stem}: {spec.endpoint} case {spec.case}, {spec.scheme}, n={spec.n}, {spec.replicates} replicates")

    start = time.time()
    if spec.thetas:
        tables = power_curve(spec, spec.thetas, threads=threads)
    else:
        tables = [run_study(spec, threads=threads)]
    elapsed = time.time() - start

    frame = tables_to_frame(tables)
    target = out_dir / f"{path.stem}.csv"
    frame.to_csv(target, index=False)
    violations = sum(t.efficiency_violations for t in tables)
    failures = sum(len(t.failures) for t in tables)
    print(f"✅ Wrote {target} in {elapsed:.0f}s ({failures} failed replicates, {violations} efficiency violations)")
    print(frame[["theta", "estimand", "analysis", "Est", "Bias", "Mean", "MC", "CP", "Power"]].to_string(index=False))
    print()


def main():
    """Main entry point."""
    parser = argparse.ArgumentParser(description="Run the bundled simulation scenarios")
    parser.add_argument(
        "--scenario",
        "-s",
        action="append",
        help="Scenario name, e.g. case1-spb (can be specified multiple times, default: all)",
    )
    parser.add_argument("--threads", type=int, default=4, help="Worker threads per study")
    parser.add_argument("--reps", type=int, default=None, help="Override the replicate count (quick runs)")
    parser.add_argument("--out", type=Path, default=Path("results"), help="Directory for the summary CSVs")

    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for path in find_scenarios(args.scenario):
        try:
            run_scenario(path, args.threads, args.reps, args.out)
        except McfAucError as e:
            print(f"❌ {path.stem}: {type(e).__name__}: {e}")
            sys.exit(1)
        except KeyboardInterrupt:
            print("\n🛑 Interrupted")
            sys.exit(0)


if __name__ == "__main__":
    main()
