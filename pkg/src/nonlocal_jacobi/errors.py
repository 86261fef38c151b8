"""Exception hierarchy shared by every module of the package."""


class NonlocalJacobiError(Exception):
    """Base class for all package errors."""


class ParameterDomainError(NonlocalJacobiError, ValueError):
    """A parameter lies outside its admissible range."""


class ConvergenceError(NonlocalJacobiError, ArithmeticError):
    """An iterative numerical routine did not converge."""


class DegenerateGridError(NonlocalJacobiError, ValueError):
    """Interpolation nodes are not distinct."""


class ShapeError(NonlocalJacobiError, ValueError):
    pass


class ContractError(NonlocalJacobiError, ValueError):
    """Arguments are individually valid but mutually inconsistent."""


class AssemblyError(NonlocalJacobiError, ArithmeticError):
    pass


class SingularSystemError(NonlocalJacobiError, ArithmeticError):
    pass


class OracleError(NonlocalJacobiError, ArithmeticError):
    """The reference quadrature failed to reach its tolerance."""


class ConfigError(NonlocalJacobiError, ValueError):
    pass
