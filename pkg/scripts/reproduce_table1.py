"""Max-norm error tables for the constant and Gaussian kernels at delta=0.2, mu=1/2.

    python3 scripts/reproduce_table1.py             # N is the polynomial degree, M = N
    python3 scripts/reproduce_table1.py --points    # N counts nodes: degree N-1, M = N-1

The right-hand columns show the published values and the ratio ours/published.
"""

import argparse

from nonlocal_jacobi import oracle
from nonlocal_jacobi.collocation import Problem, linf_error, solve_problem
from nonlocal_jacobi.nonlocal_op import HorizonGeometry, Kernel
from nonlocal_jacobi.quadrature import CHEBYSHEV, LEGENDRE

GEOM = HorizonGeometry(0.2, 0.5)
PUBLISHED = {
    ("constant", "legendre"): [2.21e-2, 4.85e-4, 1.36e-6, 3.75e-9, 1.16e-11, 1.58e-14, 5.04e-14, 7.29e-14],
    ("constant", "chebyshev"): [4.42e-2, 3.48e-4, 1.07e-6, 1.05e-9, 8.65e-12, 1.84e-14, 5.21e-14, 7.75e-14],
    ("gaussian", "legendre"): [3.32e-4, 1.69e-7, 3.34e-11, 1.43e-13, 9.59e-14, 2.39e-14, 5.70e-14, 1.17e-13],
    ("gaussian", "chebyshev"): [3.43e-4, 1.72e-7, 3.17e-11, 1.40e-13, 9.56e-14, 1.85e-14, 5.67e-14, 1.27e-13],
}
ROWS = range(4, 20, 2)
BASES = {"legendre": LEGENDRE, "chebyshev": CHEBYSHEV}


def problem(kernel, basis, degree, m, mode):
    if kernel == "constant":
        return Problem(GEOM, Kernel.moment_normalized_constant(GEOM),
                       lambda x: oracle.example1_constant_rhs(x, GEOM), oracle.exact_xexp,
                       BASES[basis], degree, m, mode)
    return Problem(GEOM, Kernel.gaussian(), lambda x: oracle.gaussian_quadratic_rhs(x, GEOM),
                   oracle.exact_quadratic, BASES[basis], degree, m, mode)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--points", action="store_true", help="read the row label as a node count")
    ap.add_argument("--c-delta", default=None, choices=("discrete", "exact"),
                    help="diagonal term (default: exact with --points, discrete otherwise)")
    args = ap.parse_args()
    mode = args.c_delta or ("exact" if args.points else "discrete")
    for (kernel, basis), table in PUBLISHED.items():
        print(f"\n{kernel} kernel, {basis} basis ({mode} C_delta)")
        print(f"{'N':>3} {'ours':>10} {'published':>10} {'ratio':>7}")
        for n, ref in zip(ROWS, table):
            degree = n - 1 if args.points else n
            sol = solve_problem(problem(kernel, basis, degree, degree, mode))
            err = linf_error(sol, sol.problem.constraint)
            print(f"{n:3d} {err:10.2e} {ref:10.2e} {err / ref:7.2f}")


if __name__ == "__main__":
    main()
