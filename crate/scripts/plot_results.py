#!/usr/bin/env python3
"""Plot the CSV trajectories written by the dismagick CLI.

The binary only writes data; figures are made here. Two kinds of input are
understood, both carrying the `# dismagick-csv v1` marker line:

* random-bench output — per-realization rows
  (realization,seed,strategy,sweep,m2,m2_stderr,ee,ee_mean,wall_ms) or the
  aggregate file (strategy,sweep,mean_m2,...). Either works; per-realization
  input is aggregated on the fly.
* heisenberg output — rows
  (sweep,m2,m2_stderr,ee,ee_mean,energy,relative_error,gates,wall_ms).

Usage:
    python3 scripts/plot_results.py bench random_bench.csv -o bench.png
    python3 scripts/plot_results.py heisenberg heisenberg.csv -o chain.png

With no -o the figure lands next to the input with a .png suffix.
"""

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

MARKER = "# dismagick-csv v1"

STRATEGY_STYLE = {
    "clifford_only": dict(color="tab:blue", label="Clifford only"),
    "sequential": dict(color="tab:orange", label="sequential"),
    "joint": dict(color="tab:green", label="joint"),
}


def read_csv(path: Path) -> pd.DataFrame:
    with open(path) as fh:
        first = fh.readline().strip()
    if first != MARKER:
        sys.exit(f"{path}: missing '{MARKER}' marker; is this a dismagick CSV?")
    return pd.read_csv(path, skiprows=1)


def aggregate_bench(df: pd.DataFrame) -> pd.DataFrame:
    """Reduce per-realization rows to the aggregate-file schema."""
    g = df.groupby(["strategy", "sweep"])
    out = g.agg(
        mean_m2=("m2", "mean"),
        std_m2=("m2", lambda s: s.std(ddof=0)),
        mean_ee=("ee", "mean"),
        std_ee=("ee", lambda s: s.std(ddof=0)),
        mean_ee_mean=("ee_mean", "mean"),
        std_ee_mean=("ee_mean", lambda s: s.std(ddof=0)),
    )
    return out.reset_index()


def plot_bench(df: pd.DataFrame, out: Path) -> None:
    if "realization" in df.columns:
        df = aggregate_bench(df)
    fig, (ax_m2, ax_ee) = plt.subplots(1, 2, figsize=(9, 3.6), sharex=True)
    for strategy, cell in df.groupby("strategy"):
        style = STRATEGY_STYLE.get(strategy, dict(label=strategy))
        cell = cell.sort_values("sweep")
        for ax, mean, std in [
            (ax_m2, cell.mean_m2, cell.std_m2),
            (ax_ee, cell.mean_ee, cell.std_ee),
        ]:
            ax.plot(cell.sweep, mean, marker="o", ms=3, **style)
            ax.fill_between(
                cell.sweep, mean - std, mean + std, alpha=0.15, color=style.get("color")
            )
    ax_m2.set_ylabel(r"$M_2$ [bits]")
    ax_ee.set_ylabel("half-chain EE [bits]")
    for ax in (ax_m2, ax_ee):
        ax.set_xlabel("sweep")
        ax.grid(alpha=0.3)
    ax_m2.legend(fontsize=8)
    fig.suptitle("sweep strategies over random states (band: ±1 std)")
    fig.tight_layout()
    fig.savefig(out, dpi=160)
    print(f"wrote {out}")


def plot_heisenberg(df: pd.DataFrame, out: Path) -> None:
    df = df.sort_values("sweep")
    fig, (ax_err, ax_res) = plt.subplots(1, 2, figsize=(9, 3.6), sharex=True)
    ax_err.semilogy(df.sweep, df.relative_error, marker="o", color="tab:red")
    ax_err.set_ylabel("relative energy error")
    ax_res.errorbar(
        df.sweep, df.m2, yerr=df.m2_stderr, marker="o", ms=3,
        color="tab:purple", label=r"$M_2$",
    )
    ax_res.plot(df.sweep, df.ee_mean, marker="s", ms=3, color="tab:cyan", label="mean EE")
    ax_res.set_ylabel("bits")
    ax_res.legend(fontsize=8)
    for ax in (ax_err, ax_res):
        ax.set_xlabel("sweep")
        ax.grid(alpha=0.3, which="both")
    fig.suptitle("cheap-bond DMRG on the rotated Heisenberg chain")
    fig.tight_layout()
    fig.savefig(out, dpi=160)
    print(f"wrote {out}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("kind", choices=["bench", "heisenberg"], help="which CSV family")
    ap.add_argument("csv", type=Path, help="input CSV from the dismagick CLI")
    ap.add_argument("-o", "--out", type=Path, help="output image (default: input with .png)")
    args = ap.parse_args()

    out = args.out or args.csv.with_suffix(".png")
    df = read_csv(args.csv)
    if args.kind == "bench":
        plot_bench(df, out)
    else:
        plot_heisenberg(df, out)


if __name__ == "__main__":
    main()
