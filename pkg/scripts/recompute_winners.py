#!/usr/bin/env python3
"""
Re-derive the per-run winners of a comparison from its CSV files alone
and check them against report.json.

Usage:
    python scripts/recompute_winners.py results/biorobots

Exits 0 when every winner matches, 1 otherwise.
"""

import json
import math
import os
import sys

import pandas as pd


def best_from_history(path):
    """Lowest finite fitness in a history CSV, or None if it has none."""
    frame = pd.read_csv(path, float_precision="round_trip")
    finite = frame["fitness"].dropna()
    finite = finite[finite.map(math.isfinite)]
    return float(finite.min()) if len(finite) else None


def recompute(output_dir):
    with open(os.path.join(output_dir, "report.json"), encoding="utf-8") as f:
        report = json.load(f)
    summary = report["summary"]
    algorithms = [a for a in summary["algorithms"] if a in ("ga", "de")]

    results = []
    for entry in summary["runs"]:
        run = entry["run"]
        expected = entry["winner"]
        if entry["status"] != "ok" or len(algorithms) < 2:
            results.append((run, expected, None))
            continue
        best = {}
        for alg in algorithms:
            path = os.path.join(output_dir, f"history_{alg}_{run}.csv")
            best[alg] = best_from_history(path)
        ranked = {a: math.inf if v is None else v for a, v in best.items()}
        lowest = min(ranked.values())
        if math.isinf(lowest):
            winner = None
        else:
            leaders = sorted(a for a, v in ranked.items() if v == lowest)
            winner = leaders[0] if len(leaders) == 1 else "tie"
        results.append((run, expected, winner))
    return results


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print(__doc__, file=sys.stderr)
        return 1
    mismatches = 0
    for run, expected, recomputed in recompute(argv[0]):
        ok = expected == recomputed
        mismatches += not ok
        print(f"run {run}: report {expected}, recomputed {recomputed} {'ok' if ok else 'MISMATCH'}")
    return 0 if mismatches == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
