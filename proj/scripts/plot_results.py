#!/usr/bin/env python3
"""Render figures from the CSV tables the doess CLI writes.

Not part of the core toolchain; everything here consumes the documented file
formats and nothing else. Usage:

    plot_results.py curves   OUTDIR [--save FIG.png]   # *_curve.csv files
    plot_results.py search   RUNDIR [--save FIG.png]   # v*/trajectory.csv
    plot_results.py report   RUNDIR [--save FIG.png]   # report_best_so_far.csv
    plot_results.py surrogate EVAL_REPORT.json [--save FIG.png]
"""

import argparse
import csv
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def finish(fig, save):
    if save:
        fig.savefig(save, dpi=150, bbox_inches="tight")
        print(f"wrote {save}")
    else:
        out = Path("figure.png")
        fig.savefig(out, dpi=150, bbox_inches="tight")
        print(f"wrote {out}")


def plot_curves(outdir, save):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in sorted(Path(outdir).glob("*_curve.csv")):
        rows = read_csv(path)
        t = [float(r["T_us"]) for r in rows]
        mean = [(float(r["cx"]) + float(r["cy"]) + float(r["cz"])) / 3 for r in rows]
        ax.plot(t, mean, marker="o", ms=3, label=path.name.replace("_curve.csv", ""))
    ax.set_xlabel("evolution time (us)")
    ax.set_ylabel("mean survival")
    ax.set_xscale("log")
    ax.legend(fontsize=8)
    finish(fig, save)


def plot_search(rundir, save):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for traj in sorted(Path(rundir).glob("v*/trajectory.csv")):
        rows = read_csv(traj)
        ax.plot(
            [int(r["eval_idx"]) for r in rows],
            [float(r["best_so_far"]) for r in rows],
            label=traj.parent.name,
        )
    ax.set_xlabel("simulator evaluations")
    ax.set_ylabel("best simplified score")
    ax.legend(fontsize=8)
    finish(fig, save)


def plot_report(rundir, save):
    rows = read_csv(Path(rundir) / "report_best_so_far.csv")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    variants = sorted({r["variant"] for r in rows})
    for v in variants:
        sub = [r for r in rows if r["variant"] == v]
        ax.plot(
            [int(r["eval_idx"]) for r in sub],
            [float(r["best_so_far"]) for r in sub],
            label=v,
        )
    ax.set_xlabel("simulator evaluations")
    ax.set_ylabel("best simplified score")
    ax.legend(fontsize=8)
    finish(fig, save)


def plot_surrogate(report_path, save):
    with open(report_path) as fh:
        report = json.load(fh)
    pairs = report["pairs"]
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter([p[0] for p in pairs], [p[1] for p in pairs], s=6, alpha=0.4)
    lo = min(min(p) for p in pairs)
    hi = max(max(p) for p in pairs)
    ax.plot([lo, hi], [lo, hi], "k--", lw=1)
    ax.set_xlabel("target")
    ax.set_ylabel("prediction")
    ax.set_title(f"R2 = {report['r_squared']:.3f}, MAE = {report['mae']:.4f}")
    finish(fig, save)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("mode", choices=["curves", "search", "report", "surrogate"])
    parser.add_argument("path")
    parser.add_argument("--save", default=None)
    args = parser.parse_args()

    if args.mode == "curves":
        plot_curves(args.path, args.save)
    elif args.mode == "search":
        plot_search(args.path, args.save)
    elif args.mode == "report":
        plot_report(args.path, args.save)
    else:
        plot_surrogate(args.path, args.save)


if __name__ == "__main__":
    sys.exit(main())
