#!/usr/bin/env python3
"""Compare bedroom metrics with individual cost terms disabled.

Runs the fixture scenario once per ablation plus a baseline, all from
the same seed, and prints a table of the resulting metrics.  Dropping
the boundary term should inflate out-of-bounds area, dropping the
overlap term should inflate object-on-object overlap, and the flat
single-stage mode should degrade at least one of the two.
"""

import argparse
import json
import pathlib
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from roomlayout.cli import main  # noqa: E402

PROMPT = "A bedroom that is 4m x 5m"
ABLATIONS = ["drop_bound", "drop_over", "drop_align", "drop_bal",
             "drop_wall", "no_hierarchy"]


def one_run(out: pathlib.Path, seed: int, restarts: int,
            ablate: str | None) -> dict:
    argv = [
        "generate",
        "--prompt", PROMPT,
        "--fixtures", str(ROOT / "fixtures" / "bedroom_4x5.jsonl"),
        "--out", str(out),
        "--seed", str(seed),
        "--restarts", str(restarts),
    ]
    if ablate:
        argv += ["--ablate", ablate]
    code = main(argv)
    if code != 0:
        raise SystemExit(f"run failed for ablation {ablate!r} (exit {code})")
    metrics = json.loads((out / "metrics.json").read_text())
    report = json.loads((out / "report.json").read_text())
    return {
        "oor": metrics["oor_percent"],
        "oob": metrics["oob_percent"],
        "pathway": metrics["pathway_cost"],
        "diags": len(report["diagnostics"]),
    }


def run(seed: int, restarts: int) -> int:
    rows = []
    with tempfile.TemporaryDirectory() as tmp:
        base = pathlib.Path(tmp)
        rows.append(("baseline", one_run(base / "baseline", seed, restarts, None)))
        for name in ABLATIONS:
            rows.append((name, one_run(base / name, seed, restarts, name)))

    print()
    print(f"{'ablation':<14s} {'OOR %':>8s} {'OOB %':>8s} "
          f"{'pathway':>8s} {'diags':>6s}")
    for name, row in rows:
        print(f"{name:<14s} {row['oor']:8.3f} {row['oob']:8.3f} "
              f"{row['pathway']:8.3f} {row['diags']:6d}")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--restarts", type=int, default=16)
    args = parser.parse_args()
    raise SystemExit(run(args.seed, args.restarts))
