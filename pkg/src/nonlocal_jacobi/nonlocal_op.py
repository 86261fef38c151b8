"""Kernels, horizon geometry and the two-sided singular quadrature plumbing.

The horizon integral over ``(x - delta, x + delta)`` is split at ``x``.  The
left half is mapped onto [-1, 1] by ``s1 = x - delta/2 + delta/2 * theta``,
which turns ``(x - s1)**-mu`` into the Jacobi weight ``(1 - theta)**-mu``; the
right half uses ``s2 = x + delta/2 + delta/2 * theta`` and the weight
``(1 + theta)**-mu``.  Both halves carry the prefactor ``(delta/2)**(1-mu)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ContractError, ParameterDomainError
from .quadrature import JacobiParams, QuadratureRule, RuleKind, gauss_rule

BOUNDARY_TIE = 1e-14
DEFAULT_C_DELTA_POINTS = 64


class KernelKind(enum.Enum):
    CONSTANT = "constant"
    GAUSSIAN = "gaussian"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Kernel:
    """Symmetric, nonnegative kernel ``gamma_delta(x, y)``.

    Build one with :meth:`constant`, :meth:`gaussian` or :meth:`custom`.
    Calling the kernel broadcasts over ``x`` and ``y``.
    """

    kind: KernelKind
    coefficient: float = 1.0
    evaluator: Callable | None = field(default=None, compare=False)
    name: str = ""

    @classmethod
    def constant(cls, coefficient: float) -> Kernel:
        return cls(KernelKind.CONSTANT, float(coefficient), name="constant")

    @classmethod
    def moment_normalized_constant(cls, geom: HorizonGeometry, diffusion: float = 1.0) -> Kernel:
        """Constant kernel scaled so the local-limit diffusion constant equals ``diffusion``.

        For ``mu = 1/2`` this is ``(5/2) * delta**(-5/2)``.
        """
        mu, d = geom.mu, geom.delta
        return cls.constant(diffusion * (3.0 - mu) * d ** (mu - 3.0))

    @classmethod
    def gaussian(cls) -> Kernel:
        return cls(KernelKind.GAUSSIAN, name="gaussian")

    @classmethod
    def custom(cls, evaluator: Callable, name: str = "custom") -> Kernel:
        """Wrap a pure, vectorised ``evaluator(x, y, delta)``."""
        return cls(KernelKind.CUSTOM, evaluator=evaluator, name=name)

    def __call__(self, x, y, delta: float):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind is KernelKind.CONSTANT:
            return np.full(np.broadcast(x, y).shape, self.coefficient)
        if self.kind is KernelKind.GAUSSIAN:
            return np.exp(-((y - x) / delta) ** 2)
        return np.asarray(self.evaluator(x, y, delta), dtype=float) * np.ones(np.broadcast(x, y).shape)


@dataclass(frozen=True)
class HorizonGeometry:
    """Horizon radius, singularity exponent and the domain (-1, 1)."""

    delta: float
    mu: float

    def __post_init__(self):
        if not (0.0 < self.mu < 1.0):
            raise ParameterDomainError(f"mu must lie in (0, 1), got {self.mu}")
        if not (self.delta > 0.0) or not math.isfinite(self.delta):
            raise ParameterDomainError(f"delta must be positive, got {self.delta}")

    domain = (-1.0, 1.0)

    @property
    def constraint_band(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """``(-1 - delta, -1]`` and ``[1, 1 + delta)`` as two (lo, hi) pairs."""
        return (-1.0 - self.delta, -1.0), (1.0, 1.0 + self.delta)

    def in_constraint_band(self, x) -> np.ndarray:
        ax = np.abs(np.asarray(x, dtype=float))
        return (ax >= 1.0) & (ax < 1.0 + self.delta)

    @property
    def prefactor(self) -> float:
        """``(delta/2)**(1 - mu)`` from the change of variables."""
        return (0.5 * self.delta) ** (1.0 - self.mu)


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


def side_params(geom: HorizonGeometry, side: Side) -> JacobiParams:
    if side is Side.LEFT:
        return JacobiParams(-geom.mu, 0.0)
    return JacobiParams(0.0, -geom.mu)


def singular_rules(geom: HorizonGeometry, m: int) -> tuple[QuadratureRule, QuadratureRule]:
    """The left ``(-mu, 0)`` and right ``(0, -mu)`` Gauss rules with ``m`` points."""
    return gauss_rule(side_params(geom, Side.LEFT), m), gauss_rule(side_params(geom, Side.RIGHT), m)


def side_images(x, geom: HorizonGeometry, side: Side, theta) -> np.ndarray:
    shift = -geom.delta if side is Side.LEFT else geom.delta
    return (2.0 * x + shift) / 2.0 + 0.5 * geom.delta * np.asarray(theta)


@dataclass(frozen=True, eq=False)
class PointClassification:
    in_indices: np.ndarray
    out_indices: np.ndarray
    images: np.ndarray


def map_points(x: float, geom: HorizonGeometry, side: Side, rule: QuadratureRule) -> PointClassification:
    """Map the rule onto one half-horizon of ``x`` and split images by location.

    An image strictly inside (-1, 1) and farther than 1e-14 from the boundary
    is "in"; everything else (the closed complement) is "out".
    """
    if rule.kind is not RuleKind.GAUSS or rule.params != side_params(geom, side):
        raise ContractError(
            f"{side.value} side needs the Gauss rule for {side_params(geom, side)}, got {rule.params}")
    if not (-1.0 <= x <= 1.0):
        raise ParameterDomainError(f"collocation point {x} lies outside [-1, 1]")
    s = side_images(x, geom, side, rule.nodes)
    inside = (s > -1.0 + BOUNDARY_TIE) & (s < 1.0 - BOUNDARY_TIE)
    return PointClassification(np.nonzero(inside)[0], np.nonzero(~inside)[0], s)


def _two_sided_sum(kernel, geom, x, g, points):
    total = 0.0
    for side, rule in zip((Side.LEFT, Side.RIGHT), singular_rules(geom, points)):
        s = side_images(x, geom, side, rule.nodes)
        total += np.dot(rule.weights, kernel(x, s, geom.delta) * g(s - x))
    return geom.prefactor * total


def c_delta(kernel: Kernel, geom: HorizonGeometry, oracle_points: int = DEFAULT_C_DELTA_POINTS) -> float:
    """``int_{-delta}^{delta} gamma(0, y) |y|**-mu dy``.

    Closed form for constant kernels, otherwise the two-sided Gauss-Jacobi
    rule with ``oracle_points`` nodes per half.
    """
    if kernel.kind is KernelKind.CONSTANT:
        return kernel.coefficient * 2.0 * geom.delta ** (1.0 - geom.mu) / (1.0 - geom.mu)
    if oracle_points < 1:
        raise ParameterDomainError("oracle_points must be >= 1")
    return float(_two_sided_sum(kernel, geom, 0.0, np.ones_like, oracle_points))


def discrete_c_delta(kernel: Kernel, geom: HorizonGeometry, x: float,
                     rules: tuple[QuadratureRule, QuadratureRule]) -> float:
    """``C_delta`` as the collocation rules see it at ``x``: the full two-sided weight sum.

    Using this on the diagonal makes the discrete operator annihilate
    constants exactly for any kernel.
    """
    total = 0.0
    for side, rule in zip((Side.LEFT, Side.RIGHT), rules):
        s = side_images(x, geom, side, rule.nodes)
        total += np.dot(rule.weights, kernel(x, s, geom.delta))
    return geom.prefactor * float(total)


def moment_check(kernel: Kernel, geom: HorizonGeometry, points: int = DEFAULT_C_DELTA_POINTS) -> float:
    """Local-limit diffusion constant ``(1/2) int gamma |r|**-mu r**2 dr``."""
    return 0.5 * float(_two_sided_sum(kernel, geom, 0.0, np.square, points))
