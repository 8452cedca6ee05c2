"""Exception hierarchy shared across the toolkit."""


class CieigError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(CieigError):
    """Operand shapes are incompatible."""


class SingularShiftError(CieigError):
    """A shifted matrix (zB - A) is singular or numerically singular.

    Carries the offending shift in ``.shift`` and, when raised inside a
    quadrature loop, the node index in ``.node_index``.
    """

    def __init__(self, shift, node_index=None, message=None):
        self.shift = shift
        self.node_index = node_index
        if message is None:
            message = f"singular shifted matrix at z={shift!r}"
            if node_index is not None:
                message += f" (quadrature node {node_index})"
        super().__init__(message)


class RankZeroError(CieigError):
    """All columns were dropped during orthonormalization/truncation."""


class IndefiniteBError(CieigError):
    """B (or a projected B) is not positive definite."""


class ParameterError(CieigError):
    """A parameter is outside its allowed range."""


class ParameterWarning(UserWarning):
    """A parameter was silently adjusted (e.g. degenerate scout span)."""


class CutUndefinedError(CieigError):
    """An interval holds fewer than two eigenvalues; no cut point exists."""


class EmptyPredictionError(CieigError):
    """A spectrum prediction or Ritz estimate holds no values."""


class NoEigenvaluesFound(CieigError):
    """A contour expected to hold eigenvalues produced none."""


class ConvergenceError(CieigError):
    """Residual tolerance not met within the iteration budget."""

    def __init__(self, best_residual, message=None):
        self.best_residual = best_residual
        super().__init__(
            message or f"not converged; best residual {best_residual:.3e}"
        )


class OracleCapError(CieigError):
    """Problem too large for the dense ground-truth oracle."""


class FormatError(CieigError):
    """Malformed file content. Carries ``.line`` when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(CieigError):
    """File content violates a schema invariant."""


class VersionError(CieigError):
    """Unknown schema version."""


class MetricError(CieigError):
    """A benchmark metric is undefined (e.g. zero denominator)."""


class DatasetError(CieigError):
    """Dataset samples are inconsistent."""
