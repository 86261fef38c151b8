"""Semilog plot of one or more convergence CSVs written by ``nonlocal-jacobi converge``.

    nonlocal-jacobi converge --out leg.csv
    nonlocal-jacobi converge --basis chebyshev --out cheb.csv
    python3 scripts/plot_csv.py leg.csv cheb.csv -o errors.png

Needs matplotlib (``pip install .[plot]``).
"""

import argparse
import csv
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read(path):
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    return [int(r["N"]) for r in rows], [float(r["linf_error"]) for r in rows]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", nargs="+")
    ap.add_argument("-o", "--output", default="convergence.png")
    args = ap.parse_args()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for path in args.csv:
        n, err = read(path)
        ax.semilogy(n, err, "o-", label=pathlib.Path(path).stem)
    ax.set_xlabel("N")
    ax.set_ylabel("max-norm error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
