#!/usr/bin/env python3
"""Render a figure from an odemimo CSV.

The experiment kind is inferred from the CSV header. Examples:

    odemimo simulate --config configs/mse_theory_vs_sim_8x8_qpsk.conf
    scripts/plot.py mse_theory_vs_sim_8x8_qpsk.csv

    odemimo race --config configs/detector_race_60x80_16qam.conf --trials 500
    scripts/plot.py detector_race_60x80_16qam.csv -o race.png
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def plot_theory_vs_sim(df, ax):
    ax.plot(df["t"], df["mse_theory"], label="formula", color="C0")
    ax.errorbar(
        df["t"],
        df["mse_empirical"],
        yerr=3 * df["stderr"],
        fmt=".",
        ms=4,
        color="C1",
        label="simulation (3 SE)",
    )
    if "mse_ode_ref" in df.columns:
        ax.plot(df["t"], df["mse_ode_ref"], "--", color="C2", label="constant-eta reference")
    ax.set_xlabel("t")
    ax.set_ylabel("MSE")
    ax.set_yscale("log")


def plot_eta_sweep(df, ax):
    for eta, group in df.groupby("eta"):
        (line,) = ax.plot(group["t"], group["mse"], label=f"eta = {eta:g}")
        ax.axhline(group["mse_asymptotic"].iloc[0], ls=":", lw=0.8, color=line.get_color())
    ax.set_xlabel("t")
    ax.set_ylabel("MSE")
    ax.set_yscale("log")


def plot_grid_search(df, ax):
    ax.plot(df["alpha"], df["f_value"], "o-")
    best = df[df["is_best"] == 1]
    ax.plot(best["alpha"], best["f_value"], "r*", ms=14, label="selected")
    ax.set_xlabel("alpha")
    ax.set_ylabel("integrated MSE")
    ax.set_xscale("log")


def plot_mse_vs_tk(df, ax):
    ax.plot(df["t_virtual"], df["mse_theory"], label="formula at T_k", color="C0")
    ax.errorbar(
        df["t_virtual"],
        df["mse_empirical"],
        yerr=3 * df["stderr"],
        fmt=".",
        ms=4,
        color="C1",
        label="iterates (3 SE)",
    )
    ax.set_xlabel("virtual time T_k")
    ax.set_ylabel("MSE")
    ax.set_yscale("log")


def plot_race(df, ax):
    for solver, group in df.groupby("solver"):
        if len(group) == 1:
            ax.axhline(group["mse"].iloc[0], ls="--", label=f"{solver} (floor)")
        else:
            ax.plot(group["iter"], group["mse"], label=solver)
    ax.set_xlabel("iteration")
    ax.set_ylabel("MSE")
    ax.set_yscale("log")


def plot_delta_study(df, ax):
    for delta, group in df.groupby("delta"):
        ax.plot(group["t"], group["mse_empirical"], label=f"delta = {delta:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("MSE")
    ax.set_yscale("log")


def plot_ser(df, ax):
    for solver, group in df.groupby("solver"):
        ax.semilogy(group["snr_db"], group["ser"].clip(lower=1e-12), "o-", label=solver)
    ax.set_xlabel("SNR per receive antenna [dB]")
    ax.set_ylabel("SER")


DISPATCH = [
    ({"t", "mse_theory", "mse_empirical"}, plot_theory_vs_sim),
    ({"eta", "t", "mse", "mse_asymptotic"}, plot_eta_sweep),
    ({"alpha", "f_value", "is_best"}, plot_grid_search),
    ({"iter", "t_virtual", "mse_theory"}, plot_mse_vs_tk),
    ({"solver", "iter", "mse"}, plot_race),
    ({"delta", "t", "mse_empirical"}, plot_delta_study),
    ({"solver", "snr_db", "ser"}, plot_ser),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv")
    parser.add_argument("-o", "--out", help="output image (default: <csv>.png)")
    args = parser.parse_args()

    df = pd.read_csv(args.csv)
    columns = set(df.columns)
    fig, ax = plt.subplots(figsize=(6, 4))
    for required, renderer in DISPATCH:
        if required <= columns:
            renderer(df, ax)
            break
    else:
        sys.exit(f"unrecognized schema: {sorted(columns)}")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    seed = df["seed"].iloc[0]
    ax.set_title(f"{args.csv} (seed {seed})", fontsize=9)
    out = args.out or args.csv + ".png"
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(out)


if __name__ == "__main__":
    main()
