#!/usr/bin/env python3
"""Plot qdiff sweep/csl CSV output.

Usage:
    plot_results.py sweep sweep.csv [out.png]
    plot_results.py csl csl.csv [out.png]

The CSVs carry '#' header lines (config echo) followed by one header row and
numeric columns; degenerate cells hold the string 'degenerate'.
"""
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def load(path):
    rows = []
    header = None
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(line.split(","))
    return header, rows


def numeric(rows, col):
    out = []
    for r in rows:
        try:
            out.append(float(r[col]))
        except ValueError:
            out.append(np.nan)
    return np.asarray(out)


def plot_sweep(path, out):
    header, rows = load(path)
    x = numeric(rows, 1)
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for col in range(7, len(header)):
        ax.loglog(x, numeric(rows, col), label=header[col])
    ax.set_xlabel(r"$\Lambda$ ($\mathrm{m^{-2}s^{-1}}$)")
    ax.set_ylabel(r"$\Delta\hat\Lambda$ ($\mathrm{m^{-2}s^{-1}}$)")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


def plot_csl(path, out):
    header, rows = load(path)
    x = numeric(rows, 0)
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for col in range(1, len(header)):
        ax.loglog(x, numeric(rows, col), label=header[col])
    ax.set_xlabel(r"$r_C$ (m)")
    ax.set_ylabel(r"$\lambda_{\mathrm{min}}$ ($\mathrm{s^{-1}}$)")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


def main():
    if len(sys.argv) < 3 or sys.argv[1] not in ("sweep", "csl"):
        print(__doc__)
        return 1
    kind, path = sys.argv[1], sys.argv[2]
    out = sys.argv[3] if len(sys.argv) > 3 else f"{kind}.png"
    (plot_sweep if kind == "sweep" else plot_csl)(path, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
