"""Jacobi polynomials, Gauss / Gauss-Lobatto rules and barycentric interpolation.

Everything here is for the weight ``(1 - x)**alpha * (1 + x)**beta`` on
[-1, 1].  Nodes are found by safeguarded Newton iteration on the three-term
recurrence, weights from the derivative formula, so no eigen-solver is
involved.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DegenerateGridError, ParameterDomainError, ShapeError

MAX_DEGREE = 256
NEWTON_TOL = 1e-15
NEWTON_MAXITER = 100
NODE_SNAP = 1e-14


@dataclass(frozen=True)
class JacobiParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1.0):
            raise ParameterDomainError(f"alpha must exceed -1, got {self.alpha}")
        if not (self.beta > -1.0):
            raise ParameterDomainError(f"beta must exceed -1, got {self.beta}")

    @property
    def gamma(self) -> float:
        """max(alpha, beta), the exponent that governs the error estimate."""
        return max(self.alpha, self.beta)

    def reflected(self) -> JacobiParams:
        return JacobiParams(self.beta, self.alpha)

    def zeroth_moment(self) -> float:
        a, b = self.alpha, self.beta
        return math.exp((a + b + 1) * math.log(2.0) + math.lgamma(a + 1)
                        + math.lgamma(b + 1) - math.lgamma(a + b + 2))


LEGENDRE = JacobiParams(0.0, 0.0)
CHEBYSHEV = JacobiParams(-0.5, -0.5)


class RuleKind(enum.Enum):
    GAUSS = "gauss"
    GAUSS_LOBATTO = "gauss-lobatto"


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    params: JacobiParams
    kind: RuleKind
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return len(self.nodes)

    def integrate(self, f) -> float:
        """Apply the rule to ``f`` (integral of f times the Jacobi weight)."""
        return float(np.dot(self.weights, f(self.nodes)))


@dataclass(frozen=True, eq=False)
class BarycentricBasis:
    nodes: np.ndarray
    bary_weights: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.bary_weights.setflags(write=False)

    def __len__(self):
        return len(self.nodes)


def _check_degree(n, lower, name):
    if int(n) != n or n < lower:
        raise ParameterDomainError(f"{name} must be an integer >= {lower}, got {n}")
    if n > MAX_DEGREE:
        raise ParameterDomainError(f"{name}={n} exceeds the degree cap {MAX_DEGREE}")


def recurrence_coefficients(params: JacobiParams, n: int) -> list[tuple[float, float]]:
    """Monic three-term recurrence ``p_{k+1} = (x - a_k) p_k - b_k p_{k-1}``.

    Returns ``[(a_0, b_0), ..., (a_{n-1}, b_{n-1})]`` where ``b_0`` is the
    zeroth moment of the weight, following the Golub-Welsch convention.
    """
    if int(n) != n or n < 1:
        raise ParameterDomainError(f"n must be a positive integer, got {n}")
    a, b = params.alpha, params.beta
    s = a + b
    out = []
    for k in range(n):
        if k == 0:
            ak = (b - a) / (s + 2)
            bk = params.zeroth_moment()
        else:
            ak = (b * b - a * a) / ((2 * k + s) * (2 * k + s + 2))
            if k == 1:
                # (k + s) cancels against (2k + s - 1); both vanish when s = -1
                bk = 4 * (1 + a) * (1 + b) / ((2 + s) ** 2 * (3 + s))
            else:
                bk = (4 * k * (k + a) * (k + b) * (k + s)
                      / ((2 * k + s) ** 2 * (2 * k + s + 1) * (2 * k + s - 1)))
        out.append((ak, bk))
    return out


def _jacobi_value(n, a, b, x):
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev
    p = 0.5 * (a - b + (a + b + 2.0) * x)
    s = a + b
    for k in range(2, n + 1):
        c1 = 2.0 * k * (k + s) * (2.0 * k + s - 2.0)
        c2 = (2.0 * k + s - 1.0) * (a * a - b * b)
        c3 = (2.0 * k + s - 2.0) * (2.0 * k + s - 1.0) * (2.0 * k + s)
        c4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * (2.0 * k + s)
        p, p_prev = ((c2 + c3 * x) * p - c4 * p_prev) / c1, p
    return p


def jacobi_eval(params: JacobiParams, n: int, x):
    """Value and first derivative of the degree-``n`` Jacobi polynomial.

    Standard normalisation, ``P_n(1) = binom(n + alpha, n)``.  ``x`` may be a
    scalar or an array; the derivative uses
    ``P_n' = (n + alpha + beta + 1) / 2 * P_{n-1}^{(alpha+1, beta+1)}``.
    """
    if int(n) != n or n < 0:
        raise ParameterDomainError(f"degree must be a non-negative integer, got {n}")
    a, b = params.alpha, params.beta
    value = _jacobi_value(n, a, b, x)
    if n == 0:
        deriv = np.zeros_like(value)
    else:
        deriv = 0.5 * (n + a + b + 1) * _jacobi_value(n - 1, a + 1, b + 1, x)
    if np.ndim(x) == 0:
        return float(value), float(deriv)
    return value, deriv


def _seed_nodes(n, a, b):
    # Tricomi-type angle approximation; exact for Chebyshev
    k = np.arange(1, n + 1)
    phi = (k + 0.5 * a - 0.25) * np.pi / (n + 0.5 * (a + b + 1))
    return np.sort(np.cos(np.clip(phi, 0.0, np.pi)))


def _brackets_ok(n, a, b, lo, hi):
    plo = _jacobi_value(n, a, b, lo)
    phi = _jacobi_value(n, a, b, hi)
    return bool(np.all(np.sign(plo) * np.sign(phi) < 0))


def _scan_brackets(n, a, b):
    phi = np.linspace(np.pi, 0.0, 32 * n + 1)
    grid = np.cos(phi)
    grid[0], grid[-1] = -1.0, 1.0
    vals = _jacobi_value(n, a, b, grid)
    change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if len(change) != n:
        raise ConvergenceError(
            f"sign scan found {len(change)} of {n} roots for P_{n}^({a},{b})")
    return grid[change], grid[change + 1]


def _find_roots(n, a, b):
    seeds = _seed_nodes(n, a, b)
    mids = 0.5 * (seeds[1:] + seeds[:-1])
    lo = np.concatenate([[-1.0], mids])
    hi = np.concatenate([mids, [1.0]])
    x = seeds
    if not _brackets_ok(n, a, b, lo, hi):
        lo, hi = _scan_brackets(n, a, b)
        x = 0.5 * (lo + hi)
    sign_lo = np.sign(_jacobi_value(n, a, b, lo))
    done = np.zeros(n, dtype=bool)
    for _ in range(NEWTON_MAXITER):
        p = _jacobi_value(n, a, b, x)
        dp = 0.5 * (n + a + b + 1) * _jacobi_value(n - 1, a + 1, b + 1, x)
        hit = p == 0.0
        left = np.sign(p) == sign_lo
        lo = np.where(left & ~hit, x, lo)
        hi = np.where(~left & ~hit, x, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_new = x - p / dp
        bisect = ~np.isfinite(x_new) | (x_new <= lo) | (x_new >= hi)
        x_new = np.where(bisect, 0.5 * (lo + hi), x_new)
        x_new = np.where(hit, x, x_new)
        step = np.abs(x_new - x)
        done = hit | ((step <= NEWTON_TOL) & ~bisect) | (hi - lo <= 4 * np.spacing(np.abs(x) + 1.0))
        x = x_new
        if done.all():
            break
    else:
        raise ConvergenceError(
            f"Newton iteration for P_{n}^({a},{b}) did not converge in {NEWTON_MAXITER} steps")
    return x


def gauss_rule(params: JacobiParams, m: int) -> QuadratureRule:
    """``m``-point Gauss-Jacobi rule, exact for degree ``2m - 1``."""
    _check_degree(m, 1, "M")
    a, b = params.alpha, params.beta
    x = _find_roots(m, a, b)
    _, dp = jacobi_eval(params, m, x)
    log_c = ((a + b + 1) * math.log(2.0) + math.lgamma(m + a + 1) + math.lgamma(m + b + 1)
             - math.lgamma(m + 1) - math.lgamma(m + a + b + 1))
    w = math.exp(log_c) / ((1.0 - x) * (1.0 + x) * dp ** 2)
    return QuadratureRule(params, RuleKind.GAUSS, x, w)


def gauss_lobatto_rule(params: JacobiParams, n: int) -> QuadratureRule:
    """``n + 1``-point Gauss-Lobatto-Jacobi rule including both endpoints."""
    _check_degree(n, 2, "N")
    a, b = params.alpha, params.beta
    inner = gauss_rule(JacobiParams(a + 1, b + 1), n - 1)
    xi = np.asarray(inner.nodes)
    wi = np.asarray(inner.weights) / ((1.0 - xi) * (1.0 + xi))
    common = (a + b + 1) * math.log(2.0) + math.lgamma(n) - math.lgamma(n + a + b + 2)
    w_left = math.exp(common + math.lgamma(b + 1) + math.lgamma(b + 2)
                      + math.lgamma(n + a + 1) - math.lgamma(n + b + 1))
    w_right = math.exp(common + math.lgamma(a + 1) + math.lgamma(a + 2)
                       + math.lgamma(n + b + 1) - math.lgamma(n + a + 1))
    nodes = np.concatenate([[-1.0], xi, [1.0]])
    weights = np.concatenate([[w_left], wi, [w_right]])
    return QuadratureRule(params, RuleKind.GAUSS_LOBATTO, nodes, weights)


def monomial_moments(params: JacobiParams, degree: int) -> np.ndarray:
    """Exact moments ``int x**k w(x) dx`` for ``k = 0..degree``.

    Uses the integration-by-parts recurrence
    ``(k + alpha + beta + 2) m_{k+1} = (beta - alpha) m_k + k m_{k-1}``,
    which is free of the cancellation that plagues the binomial expansion.
    """
    a, b = params.alpha, params.beta
    m = np.empty(degree + 1)
    m[0] = params.zeroth_moment()
    if degree >= 1:
        m[1] = m[0] * (b - a) / (a + b + 2)
    for k in range(1, degree):
        m[k + 1] = ((b - a) * m[k] + k * m[k - 1]) / (k + a + b + 2)
    return m


def barycentric_basis(nodes) -> BarycentricBasis:
    """Barycentric weights ``1 / prod_{j != k}(x_k - x_j)``, rescaled.

    Products are accumulated as log-magnitudes and normalised so the largest
    weight has modulus one.
    """
    x = np.array(nodes, dtype=float)
    if x.ndim != 1 or len(x) < 1:
        raise ShapeError("nodes must be a non-empty 1-d sequence")
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    if np.any(diff == 0.0):
        raise DegenerateGridError("interpolation nodes must be distinct")
    log_mag = -np.sum(np.log(np.abs(diff)), axis=1)
    sign = np.prod(np.sign(diff), axis=1)
    w = sign * np.exp(log_mag - log_mag.max())
    return BarycentricBasis(x, w)


def basis_matrix(basis: BarycentricBasis, x) -> np.ndarray:
    """Rows ``[h_0(x_i), ..., h_N(x_i)]`` for every evaluation point ``x_i``."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    d = xs[:, None] - basis.nodes[None, :]
    on_node = np.abs(d) <= NODE_SNAP
    d[on_node] = 1.0
    t = basis.bary_weights / d
    h = t / t.sum(axis=1, keepdims=True)
    snapped = on_node.any(axis=1)
    if snapped.any():
        nearest = np.argmin(np.abs(xs[snapped, None] - basis.nodes[None, :]), axis=1)
        h[snapped] = 0.0
        h[np.nonzero(snapped)[0], nearest] = 1.0
    return h


def basis_row(basis: BarycentricBasis, x: float) -> np.ndarray:
    return basis_matrix(basis, x)[0]


def interpolate(basis: BarycentricBasis, values, x):
    """Evaluate the interpolant of ``values`` at ``x`` (scalar or array)."""
    v = np.asarray(values, dtype=float)
    if v.shape != (len(basis),):
        raise ShapeError(f"expected {len(basis)} values, got shape {v.shape}")
    out = basis_matrix(basis, x) @ v
    if np.ndim(x) == 0:
        return float(out[0])
    return out
