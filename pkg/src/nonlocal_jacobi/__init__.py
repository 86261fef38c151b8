"""Jacobi spectral collocation for weakly singular nonlocal diffusion in 1D."""

from .collocation import (DiscreteSystem, Problem, SpectralSolution, assemble, evaluate,
                          l2_error, linf_error, solve, solve_problem)
from .errors import (AssemblyError, ConfigError, ContractError, ConvergenceError,
                     DegenerateGridError, NonlocalJacobiError, OracleError,
                     ParameterDomainError, ShapeError, SingularSystemError)
from .nonlocal_op import (HorizonGeometry, Kernel, KernelKind, PointClassification, Side,
                          c_delta, map_points, moment_check)
from .quadrature import (CHEBYSHEV, LEGENDRE, BarycentricBasis, JacobiParams, QuadratureRule,
                         RuleKind, barycentric_basis, basis_row, gauss_lobatto_rule, gauss_rule,
                         interpolate, jacobi_eval, recurrence_coefficients)

__version__ = "0.1.0"
