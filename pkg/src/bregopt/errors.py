"""Exception types shared across the toolkit."""


class BregoptError(Exception):
    """Base class for all toolkit errors."""


class DomainViolation(BregoptError):
    """A point lies outside the domain required by the operation."""


class NoMaximizer(BregoptError):
    """The mirror map's argmax is not attained for the given dual vector."""


class StepTooLarge(BregoptError):
    """A prox step left the reference function's domain (log-barrier only).

    The caller must shrink the step; silently projecting back would corrupt
    the residual sequence that drives the adaptive step-size.
    """


class DegenerateInit(BregoptError):
    """The two initial points coincide, so the prestart residual vanishes."""


class CertificateViolation(BregoptError):
    """A sampled regularity certificate (RC/RS constant) failed to hold."""


class SolverAbort(BregoptError):
    """A solver run stopped early; carries the partial trace and the cause."""

    def __init__(self, message, trace=None, cause=None):
        super().__init__(message)
        self.trace = trace
        self.cause = cause


class LemmaViolation(BregoptError):
    """A numeric-sequence inequality failed; carries the offending sequence."""

    def __init__(self, message, sequence=None):
        super().__init__(message)
        self.sequence = sequence


class MissingOptimum(BregoptError):
    """An operation needs a reference optimum the problem does not carry."""


class NonPositiveGap(BregoptError):
    """A log-log rate fit hit gaps at or below float precision (<= 1e-15)."""


class MismatchedHorizons(BregoptError):
    """Multi-seed aggregation got traces of different lengths."""
