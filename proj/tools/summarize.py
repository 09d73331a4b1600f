#!/usr/bin/env python3
# Copyright 2026 The cagebo Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Recompute per-iteration run summaries from raw trace CSVs.

With --check, compares against the summary.json written by `cagebo optimize`
and exits nonzero on any mismatch.
"""

import argparse
import csv
import json
import math
import pathlib
import statistics
import sys


def load_trace(path):
    with open(path, newline="") as f:
        return [float(row["best"]) for row in csv.DictReader(f)]


def summarize(traces):
    n = len(traces)
    length = min(len(t) for t in traces)
    out = {"median": [], "mean": [], "ci_low": [], "ci_high": []}
    for i in range(length):
        col = [t[i] for t in traces]
        total = 0.0
        for v in col:
            total += v
        mean = total / n
        ss = 0.0
        for v in col:
            ss += (v - mean) * (v - mean)
        sd = math.sqrt(ss / (n - 1)) if n > 1 else 0.0
        half = 1.96 * sd / math.sqrt(n)
        out["median"].append(statistics.median(col))
        out["mean"].append(mean)
        out["ci_low"].append(mean - half)
        out["ci_high"].append(mean + half)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("run_dir", type=pathlib.Path, help="directory holding trace_seed*.csv")
    parser.add_argument("--check", action="store_true")
    args = parser.parse_args()

    emitted = json.loads((args.run_dir / "summary.json").read_text())
    traces = [load_trace(args.run_dir / f"trace_seed{s}.csv") for s in emitted["seeds"]]
    ours = summarize(traces)
    if not args.check:
        json.dump(ours, sys.stdout, indent=2)
        print()
        return 0
    bad = 0
    for key, values in ours.items():
        if values != emitted[key]:
            bad += 1
            print(f"mismatch in {key}", file=sys.stderr)
    print(f"{args.run_dir}: {len(traces)} traces, {len(ours['median'])} iterations, "
          f"{'match' if bad == 0 else 'MISMATCH'}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
