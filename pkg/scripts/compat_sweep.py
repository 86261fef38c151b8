"""Asymptotic compatibility: shrink delta = 1/N and compare against the local solution.

    python3 scripts/compat_sweep.py [--N 8,16,32,64] [--mu 0.5]
"""

import argparse

from nonlocal_jacobi.harness import RunConfig, run_compat


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", default="8,16,32,64")
    ap.add_argument("--mu", type=float, default=0.5)
    ap.add_argument("--basis", default="legendre")
    args = ap.parse_args()
    config = RunConfig(command="compat", mu=args.mu, basis=args.basis,
                       n_list=tuple(int(t) for t in args.N.split(",")))
    table = run_compat(config)
    for row in table.rows:
        print(f"N={row['N']:3d}  delta={row['delta']:.5f}  L2 error vs u0 = {row['l2_error_vs_u0']:.3e}")
    slope = table.metadata["slope"]
    print("fitted slope:", "absent" if slope is None else f"{slope:.3f}")


if __name__ == "__main__":
    main()
