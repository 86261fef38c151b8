"""Jacobi spectral collocation for the volume-constrained nonlocal problem.

The unknowns are nodal values of ``u_N`` at the ``N + 1`` Jacobi-Gauss-Lobatto
points.  Row ``i`` of the system enforces

    C_delta u_i - (delta/2)^(1-mu) sum_in  w_j gamma(x_i, s_j) u_N(s_j)
        = f(x_i) + (delta/2)^(1-mu) sum_out w_j gamma(x_i, s_j) g(s_j)

over the left and right singular Gauss rules, where "in" images fall inside
(-1, 1) and "out" images land in the constraint band.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import AssemblyError, ParameterDomainError, SingularSystemError
from .nonlocal_op import (HorizonGeometry, Kernel, Side, c_delta, discrete_c_delta,
                          map_points, singular_rules)
from .quadrature import (LEGENDRE, BarycentricBasis, JacobiParams, QuadratureRule,
                         barycentric_basis, basis_matrix, gauss_lobatto_rule, gauss_rule)

C_DELTA_MODES = ("discrete", "exact")


@dataclass(frozen=True)
class Problem:
    """Full problem statement.

    ``c_delta_mode="discrete"`` puts the two-sided weight sum of the
    collocation rules on the diagonal, so constants are annihilated exactly
    whatever the kernel; ``"exact"`` uses the integral from
    :func:`~nonlocal_jacobi.nonlocal_op.c_delta`.  Both coincide for constant
    kernels.
    """

    geom: HorizonGeometry
    kernel: Kernel
    rhs: Callable
    constraint: Callable
    basis: JacobiParams = LEGENDRE
    N: int = 8
    M: int | None = None
    c_delta_mode: str = "discrete"

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ParameterDomainError(f"N must be an integer >= 2, got {self.N}")
        if self.M is not None and (int(self.M) != self.M or self.M < 1):
            raise ParameterDomainError(f"M must be an integer >= 1, got {self.M}")
        if self.c_delta_mode not in C_DELTA_MODES:
            raise ParameterDomainError(f"c_delta_mode must be one of {C_DELTA_MODES}")

    @property
    def quad_size(self) -> int:
        return self.N if self.M is None else self.M


@dataclass(frozen=True, eq=False)
class DiscreteSystem:
    matrix: np.ndarray
    source: np.ndarray
    grid: QuadratureRule
    basis_data: BarycentricBasis
    problem: Problem = field(repr=False)

    def residual(self, nodal_values) -> np.ndarray:
        return self.matrix @ np.asarray(nodal_values, dtype=float) - self.source


@dataclass(frozen=True, eq=False)
class SpectralSolution:
    nodal_values: np.ndarray
    basis_data: BarycentricBasis
    problem: Problem = field(repr=False)
    cond_estimate: float = math.nan

    def __call__(self, x):
        return evaluate(self, x)


def _row(problem, x_i, rules, basis, exact_c):
    geom, kernel = problem.geom, problem.kernel
    n = len(basis)
    a_row = np.zeros(n)
    f_extra = 0.0
    for side, rule in zip((Side.LEFT, Side.RIGHT), rules):
        cls = map_points(x_i, geom, side, rule)
        gam_w = rule.weights * kernel(x_i, cls.images, geom.delta)
        if len(cls.in_indices):
            s_in = cls.images[cls.in_indices]
            a_row -= gam_w[cls.in_indices] @ basis_matrix(basis, s_in)
        if len(cls.out_indices):
            s_out = cls.images[cls.out_indices]
            f_extra += float(gam_w[cls.out_indices] @ np.asarray(problem.constraint(s_out), dtype=float))
    a_row *= geom.prefactor
    c = exact_c if exact_c is not None else discrete_c_delta(kernel, geom, x_i, rules)
    return a_row, c, geom.prefactor * f_extra


def assemble(problem: Problem) -> DiscreteSystem:
    """Build ``A`` and ``F`` on the Gauss-Lobatto grid of ``problem.basis``."""
    grid = gauss_lobatto_rule(problem.basis, problem.N)
    basis = barycentric_basis(grid.nodes)
    rules = singular_rules(problem.geom, problem.quad_size)
    exact_c = c_delta(problem.kernel, problem.geom) if problem.c_delta_mode == "exact" else None

    n = problem.N + 1
    A = np.empty((n, n))
    F = np.asarray(problem.rhs(grid.nodes), dtype=float) * np.ones(n)
    for i, x_i in enumerate(grid.nodes):
        row, c, f_extra = _row(problem, float(x_i), rules, basis, exact_c)
        row[i] += c
        A[i] = row
        F[i] += f_extra

    bad = np.argwhere(~np.isfinite(A))
    if len(bad):
        i, k = bad[0]
        raise AssemblyError(f"non-finite matrix entry at (i={i}, k={k})")
    bad = np.nonzero(~np.isfinite(F))[0]
    if len(bad):
        raise AssemblyError(f"non-finite source entry at i={bad[0]}")
    A.setflags(write=False)
    F.setflags(write=False)
    return DiscreteSystem(A, F, grid, basis, problem)


def solve(system: DiscreteSystem) -> SpectralSolution:
    """LU with partial pivoting; attaches a 1-norm condition estimate."""
    A = np.array(system.matrix)
    anorm = np.linalg.norm(A, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= 1e-300 * max(anorm, 1.0):
        raise SingularSystemError(
            f"numerically singular system (smallest pivot {pivots.min():.3e}); check the assembly")
    u = scipy.linalg.lu_solve((lu, piv), system.source)
    rcond, info = scipy.linalg.lapack.dgecon(lu, anorm, norm="1")
    cond = 1.0 / rcond if info == 0 and rcond > 0 else math.inf
    u.setflags(write=False)
    return SpectralSolution(u, system.basis_data, system.problem, cond)


def solve_problem(problem: Problem) -> SpectralSolution:
    return solve(assemble(problem))


def evaluate(solution: SpectralSolution, x):
    """Evaluate ``u_N`` on [-1, 1]; outside, the constraint data is the solution."""
    xs = np.asarray(x, dtype=float)
    if np.any(xs < -1.0) or np.any(xs > 1.0):
        raise ParameterDomainError("u_N is only defined on [-1, 1]")
    out = basis_matrix(solution.basis_data, xs.ravel()) @ solution.nodal_values
    return float(out[0]) if xs.ndim == 0 else out.reshape(xs.shape)


def linf_error(solution: SpectralSolution, reference: Callable, samples: int = 1000) -> float:
    if samples < 2:
        raise ParameterDomainError("samples must be >= 2")
    xs = np.linspace(-1.0, 1.0, samples)
    return float(np.max(np.abs(evaluate(solution, xs) - reference(xs))))


def l2_error(solution: SpectralSolution, reference: Callable, quad_degree: int | None = None) -> float:
    """Unweighted L2 norm of ``u_N - reference`` by Gauss-Legendre quadrature."""
    n_nodes = len(solution.basis_data)
    if quad_degree is None:
        quad_degree = max(2 * n_nodes, 64)
    if quad_degree < n_nodes:
        raise ParameterDomainError(f"quad_degree must be >= N + 1 = {n_nodes}")
    rule = gauss_rule(LEGENDRE, quad_degree)
    diff = evaluate(solution, rule.nodes) - reference(rule.nodes)
    return math.sqrt(float(np.dot(rule.weights, diff * diff)))
