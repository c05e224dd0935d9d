"""Exception types shared across the package.

Every error carries an ``exit_code`` so the command-line layer can map a
failure onto a process status without inspecting types one by one:

    2  bad configuration (arguments, config file, unknown model, parse errors)
    3  structural failure (algebra caps, broken Cartan relations, shape clashes)
    4  optimizer failure (no convergence within budget)
    5  numerical failure (verification mismatch beyond tolerance)
"""


class CartanSimError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(CartanSimError):
    """Invalid user input: CLI arguments, config files, model names."""

    exit_code = 2


class PauliParseError(ConfigError):
    """A Pauli label contained something other than I/X/Y/Z."""


class DimensionError(CartanSimError):
    """Operands built over different qubit counts were mixed."""

    exit_code = 3


class StructuralError(CartanSimError):
    """An algebraic invariant failed (involution, Cartan relations, ...)."""

    exit_code = 3


class CapacityError(StructuralError):
    """Lie-algebra closure exceeded the configured dimension cap."""


class ResourceLimitError(CartanSimError):
    """A dense-matrix operation was requested above the qubit cap."""

    exit_code = 3


class OptimizerError(CartanSimError):
    """Minimization did not reach the requested tolerance."""

    exit_code = 4


class StagnationError(OptimizerError):
    """Line search could not produce a decreasing step."""


class NumericalError(CartanSimError):
    """A verification quantity exceeded its tolerance."""

    exit_code = 5
