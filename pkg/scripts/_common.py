"""Shared helpers for the experiment scripts."""

import argparse
import pathlib

from weakapprox import bench

RESULTS = pathlib.Path(__file__).resolve().parent.parent / "results"


def parser(description):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out-dir", type=pathlib.Path, default=RESULTS)
    p.add_argument("--quick", action="store_true", help="smaller sample counts for a smoke run")
    return p


def save(path, columns, rows, comments=()):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        bench.write_csv(fh, columns, rows, comments)
    print(f"wrote {path}")
