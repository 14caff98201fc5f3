"""Exception types raised by the shell library.

Every failure mode that callers are expected to handle gets its own class so
that scenario drivers and tests can discriminate without string matching.
"""


class IgaShellError(Exception):
    """Base class for all library errors."""


class InvalidDimensions(IgaShellError):
    """Geometry or mesh constructor arguments are out of range."""


class OutOfDomain(IgaShellError):
    """A parametric coordinate lies outside the patch domain."""


class DegenerateElement(IgaShellError):
    """Surface tangents at a quadrature point do not span a plane."""


class DegenerateLayer(IgaShellError):
    """A through-thickness layer metric lost positive definiteness."""


class NonPositiveLayerJacobian(IgaShellError):
    """The in-plane layer area ratio J* is not positive."""


class ConstitutiveOverflow(IgaShellError):
    """An exponential material law was driven past the overflow guard."""


class ParseError(IgaShellError):
    """A scenario file is malformed.

    Attributes:
        line: 1-based line number of the offending input, if known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SingularTangent(IgaShellError):
    """The assembled tangent could not be factorized."""


class NonConvergence(IgaShellError):
    """Newton iteration failed to converge within the bisection budget.

    Attributes:
        report: the NewtonReport accumulated up to the failure.
    """

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


SolverFailure = NonConvergence
"""Alias: command-line entry points report solver breakdowns under this name."""


class UnsupportedGeometry(IgaShellError):
    """An operation requires a geometry class the mesh does not satisfy."""
