class DistGeoError(Exception):
    """Base class for errors raised by distgeo."""


class DomainError(DistGeoError, ValueError):
    """A point or region lies outside the admissible domain."""


class DegeneracyError(DomainError):
    """A chart point sits in the pole-exclusion band of its chart."""


class IntegrationError(DistGeoError):
    pass


class ConvergenceError(DistGeoError):
    pass


class BisectionError(DistGeoError):
    """The cut predicate was not monotone; ``trace`` holds the bracketing history."""

    def __init__(self, msg, trace=()):
        super().__init__(msg)
        self.trace = list(trace)


class StructureViolation(DistGeoError):
    """A cutpoint satisfied neither branch of the cut dichotomy."""


class CoverageError(DistGeoError):
    def __init__(self, msg, gaps=()):
        super().__init__(msg)
        self.gaps = list(gaps)


class VerificationFailure(DistGeoError):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


class ConfigError(DistGeoError, ValueError):
    def __init__(self, msg, path=""):
        super().__init__(f"{path}: {msg}" if path else msg)
        self.path = path


class UsageError(DistGeoError, ValueError):
    """A request the harness cannot serve (unknown plot kind, missing series)."""
