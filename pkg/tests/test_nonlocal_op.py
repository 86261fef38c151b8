import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonlocal_jacobi import oracle
from nonlocal_jacobi.errors import ContractError, ParameterDomainError
from nonlocal_jacobi.nonlocal_op import (HorizonGeometry, Kernel, KernelKind, Side, c_delta,
                                         discrete_c_delta, map_points, moment_check,
                                         singular_rules)
from nonlocal_jacobi.quadrature import LEGENDRE, JacobiParams, gauss_lobatto_rule, gauss_rule

GEOM = HorizonGeometry(0.2, 0.5)


def triangle(x, y, delta):
    return 1.0 - np.abs(y - x) / delta


class TestGeometry:
    @pytest.mark.parametrize("mu", [0.0, 1.0, -0.2, 1.3])
    def test_mu_range(self, mu):
        with pytest.raises(ParameterDomainError, match="mu"):
            HorizonGeometry(0.2, mu)

    @pytest.mark.parametrize("delta", [0.0, -0.1, math.inf, math.nan])
    def test_delta_positive(self, delta):
        with pytest.raises(ParameterDomainError, match="delta"):
            HorizonGeometry(delta, 0.5)

    def test_prefactor(self):
        assert GEOM.prefactor == pytest.approx(math.sqrt(0.1), rel=1e-15)

    def test_constraint_band(self):
        assert GEOM.constraint_band == ((-1.2, -1.0), (1.0, 1.2))
        assert list(GEOM.in_constraint_band([-1.1, -1.0, 0.0, 1.0, 1.2, 1.3])) == [
            True, True, False, True, False, False]


class TestKernel:
    def test_kinds(self):
        assert Kernel.constant(2.0).kind is KernelKind.CONSTANT
        assert Kernel.gaussian().kind is KernelKind.GAUSSIAN
        assert Kernel.custom(triangle).kind is KernelKind.CUSTOM

    def test_moment_normalized_value(self):
        assert Kernel.moment_normalized_constant(GEOM).coefficient == pytest.approx(
            2.5 * 0.2 ** -2.5, rel=1e-14)

    def test_broadcast(self):
        out = Kernel.gaussian()(np.zeros((3, 1)), np.linspace(-0.1, 0.1, 4), 0.2)
        assert out.shape == (3, 4)
        assert Kernel.constant(3.0)(0.0, np.zeros(5), 0.2).shape == (5,)

    @settings(max_examples=50)
    @given(st.floats(-1.2, 1.2), st.floats(-1.2, 1.2), st.floats(0.01, 1.0),
           st.sampled_from(["constant", "gaussian", "triangle"]))
    def test_symmetric_and_nonnegative(self, x, y, delta, name):
        kernel = {"constant": Kernel.constant(2.0), "gaussian": Kernel.gaussian(),
                  "triangle": Kernel.custom(triangle)}[name]
        if name == "triangle" and abs(x - y) > delta:
            return
        assert kernel(x, y, delta) == kernel(y, x, delta)
        assert kernel(x, y, delta) >= 0.0


class TestCDelta:
    def test_normalized_constant(self):
        k = Kernel.moment_normalized_constant(GEOM)
        assert c_delta(k, GEOM) == pytest.approx(250.0, rel=1e-13)

    def test_zero_kernel(self):
        assert c_delta(Kernel.constant(0.0), GEOM) == 0.0

    def test_gaussian_against_adaptive_panel(self):
        d = GEOM.delta
        ref = 2.0 * oracle.adaptive_panel(lambda y: np.exp(-(y / d) ** 2) * y ** -0.5, 0.0, d,
                                          tol=1e-14, max_panels=20000).value
        assert abs(c_delta(Kernel.gaussian(), GEOM) - ref) <= 1e-12 * ref

    def test_gaussian_closed_form(self):
        # int_{-d}^{d} e^{-(y/d)^2} |y|^{-mu} dy = d^{1-mu} gamma_lower((1-mu)/2, 1)
        d = GEOM.delta
        closed = d ** 0.5 * oracle.gamma_lower(0.25, 1.0)
        assert c_delta(Kernel.gaussian(), GEOM) == pytest.approx(closed, rel=1e-12)

    @pytest.mark.parametrize("mu", [0.25, 0.5, 0.75])
    def test_quadrature_path_matches_closed_form(self, mu):
        geom = HorizonGeometry(0.3, mu)
        k = Kernel.constant(1.7)
        via_rule = c_delta(Kernel.custom(lambda x, y, d: np.full(np.broadcast(x, y).shape, 1.7)), geom)
        assert via_rule == pytest.approx(c_delta(k, geom), rel=1e-13)

    def test_linear_in_coefficient(self):
        a, b = c_delta(Kernel.constant(1.0), GEOM), c_delta(Kernel.constant(3.5), GEOM)
        assert b == pytest.approx(3.5 * a, rel=1e-15)

    def test_bad_points(self):
        with pytest.raises(ParameterDomainError):
            c_delta(Kernel.gaussian(), GEOM, oracle_points=0)

    def test_discrete_is_exact_for_constant_kernels(self):
        k = Kernel.moment_normalized_constant(GEOM)
        rules = singular_rules(GEOM, 6)
        assert discrete_c_delta(k, GEOM, 0.3, rules) == pytest.approx(c_delta(k, GEOM), rel=1e-13)


class TestMapPoints:
    def rules(self, m=8, geom=GEOM):
        return dict(zip((Side.LEFT, Side.RIGHT), singular_rules(geom, m)))

    def test_centre_all_in(self):
        for side, rule in self.rules().items():
            cls = map_points(0.0, GEOM, side, rule)
            assert len(cls.in_indices) == 8 and len(cls.out_indices) == 0

    def test_near_left_wall(self):
        # x = -0.95: left images lie in (-1.15, -0.95); theta > 0.5 keeps them inside
        rule = self.rules()[Side.LEFT]
        cls = map_points(-0.95, GEOM, Side.LEFT, rule)
        assert np.all(rule.nodes[cls.in_indices] > 0.5)
        assert np.all(rule.nodes[cls.out_indices] <= 0.5)
        assert len(cls.in_indices) > 0 and len(cls.out_indices) > 0

    def test_right_wall(self):
        rule = self.rules()[Side.RIGHT]
        cls = map_points(1.0, GEOM, Side.RIGHT, rule)
        assert len(cls.in_indices) == 0
        assert np.all(cls.images > 1.0)

    def test_images_formula(self):
        rule = self.rules()[Side.LEFT]
        cls = map_points(0.1, GEOM, Side.LEFT, rule)
        np.testing.assert_allclose(cls.images, 0.1 - 0.1 + 0.1 * rule.nodes, atol=1e-16)

    def test_wrong_rule(self):
        with pytest.raises(ContractError):
            map_points(0.0, GEOM, Side.RIGHT, self.rules()[Side.LEFT])
        with pytest.raises(ContractError):
            map_points(0.0, GEOM, Side.LEFT, gauss_rule(LEGENDRE, 8))
        with pytest.raises(ContractError):
            map_points(0.0, GEOM, Side.LEFT, gauss_lobatto_rule(JacobiParams(-0.5, 0.0), 8))

    def test_outside_domain(self):
        with pytest.raises(ParameterDomainError):
            map_points(1.01, GEOM, Side.LEFT, self.rules()[Side.LEFT])

    @settings(max_examples=80, deadline=None)
    @given(st.floats(-1.0, 1.0), st.integers(1, 32), st.sampled_from([Side.LEFT, Side.RIGHT]))
    def test_partition_and_order(self, x, m, side):
        rule = self.rules(m)[side]
        cls = map_points(x, GEOM, side, rule)
        assert len(cls.in_indices) + len(cls.out_indices) == m
        assert set(cls.in_indices).isdisjoint(cls.out_indices)
        assert np.all(np.diff(cls.images) > 0)
        lo, hi = (x - GEOM.delta, x) if side is Side.LEFT else (x, x + GEOM.delta)
        assert np.all(cls.images > lo - 1e-15) and np.all(cls.images < hi + 1e-15)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
    def test_in_count_monotone(self, x1, x2):
        # moving away from the left wall never loses left-side interior images
        x1, x2 = sorted((x1, x2))
        rule = self.rules(16)[Side.LEFT]
        n1 = len(map_points(x1, GEOM, Side.LEFT, rule).in_indices)
        n2 = len(map_points(x2, GEOM, Side.LEFT, rule).in_indices)
        assert n1 <= n2


class TestMomentCheck:
    @pytest.mark.parametrize("mu", [0.25, 0.5, 0.75])
    @pytest.mark.parametrize("delta", [0.05, 0.2, 1.0])
    def test_normalized_constant_is_one(self, mu, delta):
        geom = HorizonGeometry(delta, mu)
        assert moment_check(Kernel.moment_normalized_constant(geom), geom) == pytest.approx(1.0, rel=1e-12)

    def test_zero_kernel(self):
        assert moment_check(Kernel.constant(0.0), GEOM) == 0.0

    def test_gaussian_against_oracle(self):
        d = GEOM.delta
        ref = oracle.adaptive_panel(lambda y: np.exp(-(y / d) ** 2) * y ** 1.5, 0.0, d).value
        assert moment_check(Kernel.gaussian(), GEOM) == pytest.approx(ref, rel=1e-12)
