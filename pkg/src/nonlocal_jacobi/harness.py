"""Experiment drivers behind the CLI: single solves, sweeps and quadrature checks.

Every driver returns a :class:`Table`; writing CSV is a separate step so the
numbers can be inspected in tests without touching the filesystem.
"""

from __future__ import annotations

import io
import math
import re
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .collocation import Problem, assemble, l2_error, linf_error, solve
from .errors import ConfigError
from .nonlocal_op import HorizonGeometry, Kernel
from .quadrature import CHEBYSHEV, LEGENDRE, JacobiParams, gauss_rule, monomial_moments

SCHEMA_VERSION = 1
COMMANDS = ("solve", "converge", "compat", "quadcheck")
KERNELS = ("constant", "gaussian")
RHS_MODES = ("analytic", "oracle")

EXACT_SOLUTIONS = {
    "xexp": oracle.exact_xexp,
    "quadratic": oracle.exact_quadratic,
}
DEFAULT_EXACT = {"constant": "xexp", "gaussian": "quadratic"}


@dataclass(frozen=True)
class RunConfig:
    command: str = "converge"
    kernel_name: str = "constant"
    mu: float = 0.5
    delta: float = 0.2
    basis: str = "legendre"
    n_list: tuple[int, ...] = (4, 6, 8, 10, 12, 14, 16, 18)
    rhs_mode: str = "analytic"
    output_path: str = "-"
    samples: int = 1000
    M: str = "N"
    exact: str | None = None
    c_delta_mode: str = "discrete"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown command {self.command!r}")
        if self.kernel_name not in KERNELS:
            raise ConfigError(f"kernel: expected one of {KERNELS}, got {self.kernel_name!r}")
        if not (0.0 < self.mu < 1.0):
            raise ConfigError(f"mu: must lie in (0, 1), got {self.mu}")
        if not (self.delta > 0.0) or not math.isfinite(self.delta):
            raise ConfigError(f"delta: must be positive, got {self.delta}")
        if not self.n_list:
            raise ConfigError("N: list must be nonempty")
        if any(n < 2 for n in self.n_list):
            raise ConfigError(f"N: every degree must be >= 2, got {list(self.n_list)}")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ConfigError(f"N: list must be strictly increasing, got {list(self.n_list)}")
        if self.rhs_mode not in RHS_MODES:
            raise ConfigError(f"rhs: expected one of {RHS_MODES}, got {self.rhs_mode!r}")
        if self.samples < 2:
            raise ConfigError(f"samples: must be >= 2, got {self.samples}")
        if self.exact is not None and self.exact not in EXACT_SOLUTIONS:
            raise ConfigError(f"exact: expected one of {tuple(EXACT_SOLUTIONS)}, got {self.exact!r}")
        if self.c_delta_mode not in ("discrete", "exact"):
            raise ConfigError(f"c_delta: expected 'discrete' or 'exact', got {self.c_delta_mode!r}")
        parse_basis(self.basis)
        quad_size(self.M, self.n_list[0])

    @property
    def geom(self) -> HorizonGeometry:
        return HorizonGeometry(self.delta, self.mu)


@dataclass
class Table:
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    formats: dict = field(default_factory=dict)

    def column(self, name):
        return [r[name] for r in self.rows]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(f"# schema={SCHEMA_VERSION}\n")
        out.write(",".join(self.columns) + "\n")
        for row in self.rows:
            out.write(",".join(_fmt(row[c], self.formats.get(c)) for c in self.columns) + "\n")
        for key, value in self.metadata.items():
            out.write(f"# {key}={_fmt(value, None)}\n")
        return out.getvalue()

    def write(self, path: str) -> None:
        text = self.to_csv()
        if path == "-":
            sys.stdout.write(text)
            return
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _fmt(value, spec):
    if value is None:
        return "absent"
    if spec is not None:
        return format(value, spec)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".16e")
    return str(value)


def parse_basis(name: str) -> JacobiParams:
    """``legendre``, ``chebyshev`` or ``jacobi:alpha,beta``."""
    if name == "legendre":
        return LEGENDRE
    if name == "chebyshev":
        return CHEBYSHEV
    m = re.fullmatch(r"jacobi:\s*([-+.\deE]+)\s*,\s*([-+.\deE]+)\s*", name)
    if not m:
        raise ConfigError(f"basis: expected legendre, chebyshev or jacobi:a,b, got {name!r}")
    try:
        return JacobiParams(float(m.group(1)), float(m.group(2)))
    except ValueError as exc:
        raise ConfigError(f"basis: {exc}") from None


def quad_size(spec: str, n: int) -> int:
    """Resolve an ``M`` spec (``N``, ``N+k``, ``N-k`` or an integer) at degree ``n``."""
    s = str(spec).replace(" ", "")
    m = re.fullmatch(r"N(?:([+-])(\d+))?", s)
    if m:
        off = int(m.group(2) or 0) * (-1 if m.group(1) == "-" else 1)
        value = n + off
    elif re.fullmatch(r"\d+", s):
        value = int(s)
    else:
        raise ConfigError(f"M: expected an integer or N, N+k, N-k, got {spec!r}")
    if value < 1:
        raise ConfigError(f"M: resolves to {value} at N={n}, must be >= 1")
    return value


def build_kernel(config: RunConfig, geom: HorizonGeometry) -> Kernel:
    if config.kernel_name == "constant":
        return Kernel.moment_normalized_constant(geom)
    return Kernel.gaussian()


def exact_name(config: RunConfig) -> str:
    return config.exact or DEFAULT_EXACT[config.kernel_name]


def build_problem(config: RunConfig, n: int) -> tuple[Problem, object]:
    """Problem for one sweep entry plus its exact solution."""
    geom = config.geom
    kernel = build_kernel(config, geom)
    name = exact_name(config)
    exact = EXACT_SOLUTIONS[name]
    if config.rhs_mode == "oracle":
        rhs = oracle.manufactured_rhs(exact, kernel, geom)
    elif (config.kernel_name, name) == ("constant", "xexp"):
        if config.mu != 0.5:
            raise ConfigError("rhs: the analytic constant-kernel source needs mu = 0.5; use --rhs oracle")
        def rhs(x):
            return oracle.example1_constant_rhs(x, geom)
    elif (config.kernel_name, name) == ("gaussian", "quadratic"):
        def rhs(x):
            return oracle.gaussian_quadratic_rhs(x, geom)
    else:
        raise ConfigError(f"exact: no analytic source for kernel {config.kernel_name!r} "
                          f"with exact solution {name!r}; use --rhs oracle")
    problem = Problem(geom, kernel, rhs, exact, parse_basis(config.basis), n,
                      quad_size(config.M, n), config.c_delta_mode)
    return problem, exact


def _timed_solve(problem):
    t0 = time.perf_counter()
    system = assemble(problem)
    t1 = time.perf_counter()
    sol = solve(system)
    t2 = time.perf_counter()
    return sol, 1e3 * (t1 - t0), 1e3 * (t2 - t1)


def _l2_points(n):
    return max(2 * (n + 1), 64)


def run_solve(config: RunConfig) -> Table:
    """Nodal solution at the first degree of ``n_list``."""
    n = config.n_list[0]
    problem, exact = build_problem(config, n)
    sol, _, _ = _timed_solve(problem)
    x = sol.basis_data.nodes
    ue = exact(x)
    table = Table(["i", "x", "u_N", "u_exact", "abs_error"])
    for i, (xi, ui, vi) in enumerate(zip(x, sol.nodal_values, ue)):
        table.rows.append({"i": i, "x": float(xi), "u_N": float(ui),
                           "u_exact": float(vi), "abs_error": float(abs(ui - vi))})
    table.metadata = {"N": n, "M": problem.quad_size,
                      "linf_error": linf_error(sol, exact, config.samples),
                      "l2_error": l2_error(sol, exact, _l2_points(n)),
                      "cond_estimate": sol.cond_estimate}
    return table


def run_converge(config: RunConfig) -> Table:
    """Error versus degree for a fixed horizon, one row per entry of ``n_list``."""
    table = Table(["N", "linf_error", "l2_error", "cond_estimate", "assembly_ms", "solve_ms"],
                  formats={"assembly_ms": ".3f", "solve_ms": ".3f"})
    for n in config.n_list:
        problem, exact = build_problem(config, n)
        sol, t_asm, t_sol = _timed_solve(problem)
        table.rows.append({
            "N": n,
            "linf_error": linf_error(sol, exact, config.samples),
            "l2_error": l2_error(sol, exact, _l2_points(n)),
            "cond_estimate": float(sol.cond_estimate),
            "assembly_ms": t_asm,
            "solve_ms": t_sol,
        })
    return table


def log_slope(x, y) -> float | None:
    """Least-squares slope of ``log y`` against ``log x``; ``None`` under three points."""
    if len(x) < 3:
        return None
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def run_compat(config: RunConfig) -> Table:
    """Asymptotic-compatibility sweep with ``delta = 1/N``.

    The constant kernel is rescaled at each step so the local diffusion
    constant stays 1; the nonlocal solution is compared against the local
    solution ``u0 = x e^x`` of ``-u0'' = f0``.
    """
    if config.kernel_name != "constant":
        raise ConfigError("kernel: the compatibility sweep uses the constant kernel")
    table = Table(["N", "delta", "l2_error_vs_u0"])
    basis = parse_basis(config.basis)
    for n in config.n_list:
        geom = HorizonGeometry(1.0 / n, config.mu)
        problem = Problem(geom, Kernel.moment_normalized_constant(geom), oracle.local_source_xexp,
                          oracle.exact_xexp, basis, n, quad_size(config.M, n), config.c_delta_mode)
        sol = solve(assemble(problem))
        table.rows.append({"N": n, "delta": geom.delta,
                           "l2_error_vs_u0": l2_error(sol, oracle.exact_xexp, _l2_points(n))})
    table.metadata["slope"] = log_slope(table.column("delta"), table.column("l2_error_vs_u0"))
    return table


def exactness_error(params: JacobiParams, m: int) -> tuple[float, float]:
    """Worst monomial error up to degree ``2m - 1`` and the weight-sum deviation.

    Monomial errors are relative to ``max(|m_k|, int |x|^k w)`` so odd
    moments that vanish by symmetry are still measured on a sensible scale.
    """
    rule = gauss_rule(params, m)
    moments = monomial_moments(params, 2 * m - 1)
    powers = np.vander(rule.nodes, 2 * m, increasing=True)
    approx = rule.weights @ powers
    scale = np.maximum(np.maximum(np.abs(moments), rule.weights @ np.abs(powers)), np.finfo(float).tiny)
    worst = float(np.max(np.abs(approx - moments) / scale))
    return worst, float(abs(rule.weights.sum() - moments[0]))


def run_quadcheck(config: RunConfig) -> Table:
    """Exactness diagnostics for the collocation basis and both singular rules."""
    families = []
    for p in (parse_basis(config.basis), JacobiParams(-config.mu, 0.0), JacobiParams(0.0, -config.mu)):
        if p not in families:
            families.append(p)
    table = Table(["alpha", "beta", "M", "max_exactness_error", "weight_sum_deviation"],
                  formats={"alpha": "g", "beta": "g"})
    for p in families:
        for m in config.n_list:
            worst, dev = exactness_error(p, m)
            table.rows.append({"alpha": p.alpha, "beta": p.beta, "M": m,
                               "max_exactness_error": worst, "weight_sum_deviation": dev})
    return table


RUNNERS = {
    "solve": run_solve,
    "converge": run_converge,
    "compat": run_compat,
    "quadcheck": run_quadcheck,
}


def run(config: RunConfig) -> Table:
    return RUNNERS[config.command](config)
