"""Exception types shared across the package."""


class HopfHJError(Exception):
    """Base class for all library errors."""


class ExprError(HopfHJError):
    """Base class for expression parsing/evaluation errors."""


class ParseError(ExprError):
    """Syntax or identifier error, with the offending offset in the source text."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class UnboundVariableError(ExprError):
    """An expression was evaluated with a free variable missing from the bindings."""


class EvalDomainError(ExprError):
    """Evaluation left the natural domain (ln/sqrt of a negative, division by zero, overflow)."""


class NonDifferentiableError(EvalDomainError):
    """Derivative requested at a nondifferentiable point (abs or sqrt at zero)."""


class ConjugateDomainError(HopfHJError):
    """A query point lies outside the effective domain of the conjugate."""


class InconsistencyError(HopfHJError):
    """An internal cross-check failed, signalling bad caller data (e.g. a nonconvex v)."""


class PreconditionError(HopfHJError):
    """A documented operation precondition does not hold for the given arguments."""


class ProblemValidationError(HopfHJError):
    """Construction-time invariants of a problem or convex-data record failed."""


class ResolutionFailure(HopfHJError):
    """A search that must succeed came back empty at the current grid resolution."""


class NonMonotonePredicateError(HopfHJError):
    """The transition-time predicate alternated more than once along the scan.

    Carries the probe list as ``probes``: pairs (s, predicate_value).
    """

    def __init__(self, message, probes):
        super().__init__(message)
        self.probes = list(probes)


class NumericFailure(HopfHJError):
    """A numeric routine could not produce a result (e.g. empty effective domain)."""


class ConfigError(HopfHJError):
    """Invalid run configuration (file syntax, missing keys, malformed values)."""
