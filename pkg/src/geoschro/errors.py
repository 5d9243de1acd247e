"""Exception hierarchy.

Three families matter for the CLI exit-code mapping: configuration errors
(exit 1), numeric-domain errors (exit 2) and I/O errors (exit 3).
"""


class GeoschroError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(GeoschroError):
    """Bad configuration input (file syntax, schema, unknown names)."""


class ParseError(ConfigError):
    """Config file is not syntactically valid JSON."""


class SchemaError(ConfigError):
    """Config violates the schema; carries a JSON pointer to the offender."""

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        self.message = message
        super().__init__(f"{pointer}: {message}")


class UnknownOperator(ConfigError):
    """Hamiltonian term names neither a builtin operator nor a readable file."""


class UnknownSuite(ConfigError):
    """Verification suite name is not recognized."""


class NumericError(GeoschroError):
    """Numeric-domain failure (bad matrix, unsafe truncation, collapse...)."""


class NotHermitian(NumericError):
    """Matrix fails the Hermiticity tolerance."""


class NotSkewHermitian(NumericError):
    """Matrix fails the skew-Hermiticity tolerance."""


class ConvergenceFailure(NumericError):
    """Eigensolver did not converge."""


class BasisMismatch(NumericError):
    """Operands carry different bases (or different base points)."""


class LengthMismatch(NumericError):
    """Coefficient/coordinate lengths disagree."""


class UnsupportedBasis(NumericError):
    """Operation not defined for the given basis kind."""


class UnsafeSubspace(NumericError):
    """Vector support exceeds the truncation-safe index range."""


class DomainExhausted(NumericError):
    """Requested operator power walks out of the truncated space."""


class ZeroVector(NumericError):
    """A (near-)zero vector where a direction is required."""


class NonNegativeMu(NumericError):
    """Momentum level mu must be strictly negative."""


class NotTangent(NumericError):
    """Vector is not tangent to the momentum level set."""


class RankCollapse(NumericError):
    """Projector state lost rank-1 dominance."""


class IntegratorMismatch(NumericError):
    """Integrator cannot handle the given Hamiltonian (e.g. exact_eig with
    time-dependent coefficients)."""


class MissingInput(GeoschroError):
    """A referenced input file does not exist."""

    def __init__(self, path):
        self.path = str(path)
        super().__init__(f"missing input file: {self.path}")
