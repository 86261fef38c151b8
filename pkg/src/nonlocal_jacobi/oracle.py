"""Independent reference machinery.

Nothing here reuses the Newton node solver in :mod:`quadrature`: Jacobi
rules come from the eigen-decomposition of the Jacobi matrix (Golub-Welsch,
via :func:`scipy.linalg.eigh_tridiagonal`) and panel rules from
:func:`numpy.polynomial.legendre.leggauss`, so agreement with the
collocation path is evidence rather than tautology.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import eigh_tridiagonal

from .errors import OracleError, ParameterDomainError
from .nonlocal_op import HorizonGeometry, Kernel
from .quadrature import JacobiParams, recurrence_coefficients

MAX_ORACLE_ORDER = 512
_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class AdaptiveResult:
    value: float
    error_estimate: float
    panels_used: int


# ---------------------------------------------------------------------------
# quadrature

@lru_cache(maxsize=None)
def _leggauss(n):
    return leggauss(n)


@lru_cache(maxsize=None)
def golub_welsch(n: int, a: float, b: float):
    """Gauss-Jacobi nodes and weights from the symmetric Jacobi matrix."""
    rc = recurrence_coefficients(JacobiParams(a, b), n)
    diag = np.array([c[0] for c in rc])
    off = np.sqrt(np.array([c[1] for c in rc[1:]]))
    x, vecs = eigh_tridiagonal(diag, off)
    return x, rc[0][1] * vecs[0] ** 2


def adaptive_panel(f, a: float, b: float, tol: float = 1e-13, order: int = 10,
                   max_panels: int = 4000) -> AdaptiveResult:
    """Integrate ``f`` over [a, b] by panel halving with global error control.

    A panel's error is estimated as the gap between its own ``order``-point
    Gauss-Legendre value and the sum over its two halves.  The worst panel
    is halved until the summed estimate drops below ``tol``, so integrable
    endpoint singularities just attract a geometric cluster of panels.
    """
    x, w = _leggauss(order)

    def rule(lo, hi):
        half = 0.5 * (hi - lo)
        return half * float(np.dot(w, f(lo + half * (x + 1.0))))

    def panel(lo, hi):
        mid = 0.5 * (lo + hi)
        left, right = rule(lo, mid), rule(mid, hi)
        return (-abs(left + right - rule(lo, hi)), lo, hi, left + right)

    heap = [panel(a, b)]
    while True:
        err = -sum(p[0] for p in heap)
        if err <= tol:
            break
        if len(heap) >= max_panels:
            raise OracleError(f"adaptive quadrature stalled at error {err:.3e} > {tol:g}")
        _, lo, hi, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        heapq.heappush(heap, panel(lo, mid))
        heapq.heappush(heap, panel(mid, hi))
    value = math.fsum(p[3] for p in heap)
    return AdaptiveResult(value, err, len(heap))


def _half_horizon(u, x, kernel, geom, n, left):
    a, b = (-geom.mu, 0.0) if left else (0.0, -geom.mu)
    theta, w = golub_welsch(n, a, b)
    shift = -0.5 * geom.delta if left else 0.5 * geom.delta
    y = x + shift + 0.5 * geom.delta * theta
    return geom.prefactor * float(np.dot(w, kernel(x, y, geom.delta) * (u(y) - u(x))))


def reference_nonlocal_apply(u, x: float, kernel: Kernel, geom: HorizonGeometry,
                             tol: float = 1e-13) -> AdaptiveResult:
    """``L_delta u(x) = int gamma(x,y) |y-x|**-mu (u(y) - u(x)) dy`` by order doubling."""
    if tol < 1e-13:
        raise ParameterDomainError(f"tol must be >= 1e-13, got {tol}")
    n = 8
    prev = _half_horizon(u, x, kernel, geom, n, True) + _half_horizon(u, x, kernel, geom, n, False)
    while n < MAX_ORACLE_ORDER:
        n *= 2
        cur = _half_horizon(u, x, kernel, geom, n, True) + _half_horizon(u, x, kernel, geom, n, False)
        diff = abs(cur - prev)
        if diff < tol:
            return AdaptiveResult(cur, diff, 2 * n)
        prev = cur
    raise OracleError(f"L_delta u({x}) not converged at order {MAX_ORACLE_ORDER} (last change {diff:.3e})")


def manufactured_rhs(u, kernel: Kernel, geom: HorizonGeometry, tol: float = 1e-13):
    """Return ``f = -L_delta u`` as a vectorised callable."""

    def f(x):
        xs = np.asarray(x, dtype=float)
        vals = np.array([-reference_nonlocal_apply(u, float(t), kernel, geom, tol).value
                         for t in xs.ravel()])
        if xs.ndim == 0:
            return float(vals[0])
        return vals.reshape(xs.shape)

    return f


# ---------------------------------------------------------------------------
# special functions

def erf(x: float) -> float:
    """Error function for ``|x| <= 6`` (saturates to +-1 beyond).

    Uses the all-positive series
    ``erf(x) = 2x/sqrt(pi) e^{-x^2} sum (2x^2)^k / (1*3*...*(2k+1))``,
    which does not suffer cancellation.
    """
    ax = abs(x)
    if ax > 6.0:
        return math.copysign(1.0, x)
    t = 2.0 * ax * ax
    term = 1.0
    total = 1.0
    k = 0
    while term > 1e-17 * total:
        k += 1
        term *= t / (2 * k + 1)
        total += term
    return math.copysign(2.0 * ax / _SQRT_PI * math.exp(-ax * ax) * total, x)


def erfi(x: float) -> float:
    """Imaginary error function ``-i erf(ix)`` by its Maclaurin series."""
    x2 = x * x
    power = x
    total = 0.0
    k = 0
    fact = 1.0
    while True:
        term = power / (fact * (2 * k + 1))
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1e-300):
            break
        k += 1
        fact *= k
        power *= x2
    return 2.0 / _SQRT_PI * total


_LANCZOS_G = 7
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_complete(a: float) -> float:
    """Gamma function on (0, 5] by the Lanczos approximation (g=7, 9 terms)."""
    if not (0.0 < a <= 5.0):
        raise ParameterDomainError(f"gamma_complete supports a in (0, 5], got {a}")
    if a < 0.5:
        # reflection keeps the Lanczos sum in its accurate range
        return math.pi / (math.sin(math.pi * a) * gamma_complete(1.0 - a))
    z = a - 1.0
    s = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        s += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * s


def gamma_lower(a: float, x: float) -> float:
    """Lower incomplete gamma ``gamma(a, x)`` via the upper function."""
    return gamma_complete(a) - gamma_upper(a, x)


def _lower_series(a, x):
    term = 1.0 / a
    total = term
    n = 0
    while abs(term) > 1e-17 * abs(total):
        n += 1
        term *= x / (a + n)
        total += term
        if n > 1000:
            raise OracleError("lower incomplete gamma series did not converge")
    return total * math.exp(-x + a * math.log(x))


def _upper_fraction(a, x):
    # modified Lentz evaluation of the Legendre continued fraction
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        d = tiny if abs(d) < tiny else d
        c = b + an / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < 1e-16:
            return math.exp(-x + a * math.log(x)) * h
    raise OracleError("upper incomplete gamma continued fraction did not converge")


def gamma_upper(a: float, x: float) -> float:
    """Upper incomplete gamma ``Gamma(a, x)`` for ``a in (0, 5]``, ``x in [0, 50]``."""
    if not (0.0 < a <= 5.0) or not (0.0 <= x <= 50.0):
        raise ParameterDomainError(f"gamma_upper supports a in (0, 5], x in [0, 50]; got a={a}, x={x}")
    if x == 0.0:
        return gamma_complete(a)
    if x < a + 1.0:
        return gamma_complete(a) - _lower_series(a, x)
    return _upper_fraction(a, x)


# ---------------------------------------------------------------------------
# closed-form sources

def _require_half(geom):
    if geom.mu != 0.5:
        raise ParameterDomainError(f"closed-form source needs mu = 1/2, got {geom.mu}")


def exact_xexp(x):
    x = np.asarray(x, dtype=float)
    return x * np.exp(x)


def exact_quadratic(x):
    x = np.asarray(x, dtype=float)
    return x * (1.0 - x)


def local_source_xexp(x):
    """``-u0''`` for ``u0 = x e^x``, i.e. ``-x e^x - 2 e^x``."""
    x = np.asarray(x, dtype=float)
    return -(x + 2.0) * np.exp(x)


def example1_constant_rhs(x, geom: HorizonGeometry):
    """Source for ``u = x e^x`` under the constant kernel ``(5/2) delta**(-5/2)``, ``mu = 1/2``."""
    _require_half(geom)
    d = geom.delta
    sd = math.sqrt(d)
    special = erf(sd) + erfi(sd)
    x = np.asarray(x, dtype=float)
    return -1.25 * d ** -3 * np.exp(x) * (
        2.0 * d * math.exp(-d) * (1.0 + math.exp(2.0 * d))
        - 8.0 * d * x
        + sd * _SQRT_PI * (2.0 * x - 1.0) * special)


def gaussian_quadratic_rhs(x, geom: HorizonGeometry):
    """Source for ``u = x(1 - x)`` under the Gaussian kernel; constant in ``x``.

    Equals ``delta**(3 - mu) * gamma_lower((3 - mu)/2, 1)``, which for
    ``mu = 1/2`` is ``delta**(5/2) (Gamma(5/4) - Gamma(5/4, 1))``.
    """
    a = 0.5 * (3.0 - geom.mu)
    value = geom.delta ** (3.0 - geom.mu) * (gamma_complete(a) - gamma_upper(a, 1.0))
    return np.full(np.shape(x), value) if np.ndim(x) else value
