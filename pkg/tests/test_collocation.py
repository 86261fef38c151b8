import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonlocal_jacobi import oracle
from nonlocal_jacobi.collocation import (Problem, SpectralSolution, assemble, evaluate, l2_error,
                                         linf_error, solve, solve_problem)
from nonlocal_jacobi.errors import ParameterDomainError, SingularSystemError
from nonlocal_jacobi.nonlocal_op import HorizonGeometry, Kernel
from nonlocal_jacobi.quadrature import (CHEBYSHEV, LEGENDRE, JacobiParams, barycentric_basis,
                                        gauss_lobatto_rule)

GEOM = HorizonGeometry(0.2, 0.5)
CONST = Kernel.moment_normalized_constant(GEOM)


def zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def constant_problem(basis=LEGENDRE, n=8, m=None, mode="discrete", geom=GEOM):
    return Problem(geom, Kernel.moment_normalized_constant(geom),
                   lambda x: oracle.example1_constant_rhs(x, geom), oracle.exact_xexp,
                   basis, n, m, mode)


def gaussian_problem(basis=LEGENDRE, n=8, m=None, mode="discrete"):
    return Problem(GEOM, Kernel.gaussian(), lambda x: oracle.gaussian_quadratic_rhs(x, GEOM),
                   oracle.exact_quadratic, basis, n, m, mode)


class TestProblem:
    def test_defaults(self):
        p = constant_problem()
        assert p.quad_size == 8 and p.c_delta_mode == "discrete"
        assert constant_problem(m=11).quad_size == 11

    @pytest.mark.parametrize("kw", [{"n": 1}, {"n": 4.5}, {"m": 0}, {"mode": "fancy"}])
    def test_validation(self, kw):
        with pytest.raises(ParameterDomainError):
            constant_problem(**kw)


class TestTrivialSolutions:
    def test_zero(self):
        sol = solve_problem(Problem(GEOM, CONST, zero, zero, LEGENDRE, 8))
        assert np.max(np.abs(sol.nodal_values)) == 0.0

    @pytest.mark.parametrize("basis", [LEGENDRE, CHEBYSHEV, JacobiParams(-0.5, 0.0)])
    def test_affine(self, basis):
        g = lambda x: 2.0 - 0.5 * np.asarray(x)  # noqa: E731
        sol = solve_problem(Problem(GEOM, Kernel.gaussian(), zero, g, basis, 9))
        assert linf_error(sol, g) < 1e-12

    def test_zero_kernel_is_singular(self):
        with pytest.raises(SingularSystemError):
            solve_problem(Problem(GEOM, Kernel.constant(0.0), zero, zero, LEGENDRE, 6))


class TestAssembly:
    def test_shapes_and_readonly(self):
        system = assemble(constant_problem(n=6))
        assert system.matrix.shape == (7, 7) and system.source.shape == (7,)
        with pytest.raises(ValueError):
            system.matrix[0, 0] = 1.0

    def test_row_zero_against_independent_oracle(self):
        # x_0 = -1: the whole left half and part of the right half fall in the band
        n = 6
        p = constant_problem(n=n)
        A = assemble(p).matrix
        nodes = gauss_lobatto_rule(LEGENDRE, n).nodes
        theta, w = oracle.golub_welsch(n, 0.0, -0.5)
        s = -1.0 + 0.1 + 0.1 * theta
        inside = s > -1.0 + 1e-14

        def lagrange(k, x):
            others = np.delete(nodes, k)
            return np.prod((x[:, None] - others) / (nodes[k] - others), axis=1)

        pref = GEOM.prefactor
        c = CONST.coefficient * 2 * GEOM.delta ** 0.5 / 0.5
        expected = np.array([-pref * CONST.coefficient * np.dot(w[inside], lagrange(k, s[inside]))
                             for k in range(n + 1)])
        expected[0] += c
        np.testing.assert_allclose(A[0], expected, rtol=1e-12, atol=1e-12 * c)

    @pytest.mark.parametrize("basis", [LEGENDRE, CHEBYSHEV])
    def test_residual_small_for_exact_data(self, basis):
        system = assemble(constant_problem(basis, 12))
        res = system.residual(oracle.exact_xexp(system.grid.nodes))
        assert np.max(np.abs(res)) < 1e-5

    @pytest.mark.parametrize("make", [constant_problem, gaussian_problem])
    def test_centro_symmetry(self, make):
        # symmetric basis and kernel: A is invariant under reversing both indices
        A = assemble(make(CHEBYSHEV, 9)).matrix
        assert np.max(np.abs(A - A[::-1, ::-1])) <= 1e-12 * np.max(np.abs(A))

    def test_modes_agree_for_constant_kernel(self):
        a = solve_problem(constant_problem(n=10)).nodal_values
        b = solve_problem(constant_problem(n=10, mode="exact")).nodal_values
        assert np.max(np.abs(a - b)) < 1e-12

    def test_exact_mode_misses_constants_for_gaussian(self):
        one = lambda x: np.ones_like(np.asarray(x, dtype=float))  # noqa: E731
        p = Problem(GEOM, Kernel.gaussian(), zero, one, LEGENDRE, 6, c_delta_mode="exact")
        assert linf_error(solve_problem(p), one) > 1e-10


class TestConvergence:
    def test_nesting(self):
        errs = [linf_error(solve_problem(constant_problem(n=n)), oracle.exact_xexp) for n in (4, 6, 8, 10)]
        assert all(b < a for a, b in zip(errs, errs[1:]))

    def test_basis_independence(self):
        a = solve_problem(constant_problem(LEGENDRE, 14))
        b = solve_problem(constant_problem(CHEBYSHEV, 14))
        xs = np.linspace(-1, 1, 501)
        assert np.max(np.abs(a(xs) - b(xs))) < 1e-11

    @pytest.mark.parametrize("m", [6, 10, 16])
    def test_quadrature_size_independent_of_degree(self, m):
        err = linf_error(solve_problem(constant_problem(n=10, m=m)), oracle.exact_xexp)
        assert err < 1e-9

    def test_condition_estimate(self):
        sol = solve_problem(constant_problem(n=10))
        assert 1.0 <= sol.cond_estimate < 1e6


class TestEvaluation:
    sol = SpectralSolution(gauss_lobatto_rule(LEGENDRE, 4).nodes.copy(),
                           barycentric_basis(gauss_lobatto_rule(LEGENDRE, 4).nodes),
                           None)

    def test_identity_interpolant(self):
        assert evaluate(self.sol, 0.3) == pytest.approx(0.3, abs=1e-15)
        assert self.sol(np.array([[-1.0, 1.0]])).shape == (1, 2)

    def test_domain(self):
        with pytest.raises(ParameterDomainError):
            evaluate(self.sol, 1.5)

    def test_linf(self):
        assert linf_error(self.sol, zero, samples=11) == pytest.approx(1.0)
        with pytest.raises(ParameterDomainError):
            linf_error(self.sol, zero, samples=1)

    def test_l2(self):
        assert l2_error(self.sol, zero) == pytest.approx(math.sqrt(2 / 3), rel=1e-14)
        assert l2_error(self.sol, lambda x: x) < 1e-15
        with pytest.raises(ParameterDomainError):
            l2_error(self.sol, zero, quad_degree=3)


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.sampled_from([0.25, 0.5, 0.75]),
       st.floats(0.05, 0.6), st.integers(2, 12))
def test_affine_reproduced_for_any_geometry(a, b, mu, delta, n):
    geom = HorizonGeometry(delta, mu)
    g = lambda x: a + b * np.asarray(x)  # noqa: E731
    sol = solve_problem(Problem(geom, Kernel.gaussian(), zero, g, LEGENDRE, n))
    assert linf_error(sol, g, 200) <= 1e-10 * max(1.0, abs(a) + abs(b))


# ---------------------------------------------------------------------------
# Reference error tables. The reported Legendre errors line up with this
# solver when the row label counts collocation points (degree N - 1, N - 1
# quadrature points per side) and the diagonal uses the exact integral.

REPORTED_GAUSSIAN = {4: 3.32e-4, 6: 1.69e-7, 8: 3.34e-11}
REPORTED_CONSTANT = {4: 2.21e-2, 6: 4.85e-4, 8: 1.36e-6, 10: 3.75e-9, 12: 1.16e-11}


@pytest.mark.parametrize("points", sorted(REPORTED_GAUSSIAN))
def test_gaussian_errors_when_rows_count_points(points):
    d = points - 1
    err = linf_error(solve_problem(gaussian_problem(LEGENDRE, d, d, "exact")), oracle.exact_quadratic)
    assert 1 / 1.25 <= err / REPORTED_GAUSSIAN[points] <= 1.25


@pytest.mark.parametrize("points", sorted(REPORTED_CONSTANT))
def test_constant_errors_when_rows_count_points(points):
    d = points - 1
    err = linf_error(solve_problem(constant_problem(LEGENDRE, d, d)), oracle.exact_xexp)
    assert 1 / 4 <= err / REPORTED_CONSTANT[points] <= 4


@pytest.mark.xfail(strict=True, reason="degree-N reading is ~60x more accurate; see criterion 3")
def test_gaussian_chebyshev_degree_eight_example():
    err = linf_error(solve_problem(gaussian_problem(CHEBYSHEV, 8)), oracle.exact_quadratic)
    assert err == pytest.approx(3.17e-11, rel=0.5)
