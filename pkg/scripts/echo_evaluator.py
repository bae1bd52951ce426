#!/usr/bin/env python3
"""
Reference external evaluator.

Reads one request line {"genome": [...], "seed": N} from stdin and answers
{"fitness": <sphere value>} on stdout. Flags make it misbehave on purpose
so the subprocess protocol can be exercised.

Usage:
    python scripts/echo_evaluator.py [--noise S] [--sleep S] [--malformed] [--exit-code N] [--nan]
"""

import argparse
import json
import sys
import time

import numpy as np


def main():
    parser = argparse.ArgumentParser(description="sphere evaluator speaking line-delimited JSON")
    parser.add_argument("--noise", type=float, default=0.0, help="std. dev. of seeded Gaussian noise")
    parser.add_argument("--sleep", type=float, default=0.0, help="seconds to wait before answering")
    parser.add_argument("--malformed", action="store_true", help="answer with a line that is not JSON")
    parser.add_argument("--exit-code", type=int, default=0, help="exit with this status instead of answering")
    parser.add_argument("--nan", action="store_true", help="answer with a NaN fitness")
    args = parser.parse_args()

    request = json.loads(sys.stdin.readline())
    genome = np.asarray(request["genome"], dtype=float)
    seed = int(request["seed"])

    if args.sleep:
        time.sleep(args.sleep)
    if args.exit_code:
        print("evaluator asked to fail", file=sys.stderr)
        return args.exit_code
    if args.malformed:
        print("fitness: not json")
        return 0

    fitness = float(np.sum(genome * genome))
    if args.noise:
        fitness += float(np.random.default_rng(seed).normal(0.0, args.noise))
    if args.nan:
        fitness = float("nan")
    print(json.dumps({"fitness": fitness}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
