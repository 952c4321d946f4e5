#!/usr/bin/env python3
"""Run the full desk-scale acceptance sweep for l = 5, 6, 7.

For each l, every enumerated rooted class member is certified (extract, verify, detect,
discharge), and the property sweeps on the Alon-Tarsi machinery run once.
Summaries are saved to data/acceptance/l<L>.json and data/acceptance/validation.json.

Usage:
  python scripts/run_acceptance_sweep.py                 # l = 5, 6, 7 up to 9 vertices
  python scripts/run_acceptance_sweep.py --l 6 --max-n 7
  python scripts/run_acceptance_sweep.py --resume        # skip completed l values
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
import time
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from rich.console import Console
from rich.table import Table

console = Console()

OUT_DIR = Path("data/acceptance")


def _run_l(l: int, max_n: int, jobs: int, oracle_max_n: int) -> dict:
    from src.orchestrator import BatchConfig, print_batch_stats, run_batch

    config = BatchConfig(l=l, max_n=max_n, jobs=jobs, oracle_max_n=oracle_max_n)
    run = asyncio.run(run_batch(config))
    print_batch_stats(run.stats)
    return run.to_dict()


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("--l", type=int, choices=(5, 6, 7), help="Single l value")
    parser.add_argument("--max-n", type=int, default=9)
    parser.add_argument("--jobs", type=int, default=4)
    parser.add_argument("--oracles-max-n", type=int, default=7)
    parser.add_argument("--skip-validation", action="store_true")
    parser.add_argument("--resume", action="store_true", help="Skip l values with a saved summary")
    args = parser.parse_args()

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    summary = Table(title="Acceptance sweep")
    summary.add_column("Sweep", style="cyan")
    summary.add_column("Graphs / cases", justify="right")
    summary.add_column("Failures", justify="right")
    summary.add_column("Time", justify="right")
    failed = False

    for l in [args.l] if args.l else [5, 6, 7]:
        path = OUT_DIR / f"l{l}.json"
        if args.resume and path.exists():
            console.print(f"[dim]skipping l={l}: {path} exists[/dim]")
            continue
        t0 = time.time()
        result = _run_l(l, args.max_n, args.jobs, args.oracles_max_n)
        path.write_text(json.dumps(result, indent=2))
        stats = result["stats"]
        failed |= stats["failed"] > 0
        summary.add_row(f"certify l={l}", str(stats["graphs"]), str(stats["failed"]), f"{time.time() - t0:.0f}s")

    if not args.skip_validation:
        from src.validation import run_all

        t0 = time.time()
        result = run_all()
        (OUT_DIR / "validation.json").write_text(json.dumps(result, indent=2))
        failed |= not result["passed"]
        for name in ("at_identity", "cut_product", "known_at_values"):
            part = result[name]
            count = part.get("graphs", part.get("trials", len(part.get("cases", []))))
            bad = len(part.get("mismatches", [])) or sum(not c["ok"] for c in part.get("cases", []))
            summary.add_row(name, str(count), str(bad), f"{time.time() - t0:.0f}s")

    console.print(summary)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

