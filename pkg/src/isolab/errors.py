"""Exception hierarchy shared by every isolab module."""


class IsolabError(Exception):
    """Base class; the CLI maps it to exit code 2 unless noted otherwise."""


class DomainError(IsolabError, ValueError):
    """Argument outside the domain where a quantity is defined."""


class ConstructionError(IsolabError, ValueError):
    """Invalid parameters for a density, coefficient or shape."""


class QuadratureError(IsolabError, ArithmeticError):
    """Quadrature failed to reach the requested tolerance."""

    def __init__(self, message, interval=None):
        if interval is not None:
            message = f"{message} on [{interval[0]!r}, {interval[1]!r}]"
        super().__init__(message)
        self.interval = interval


class LevelSetError(IsolabError, ArithmeticError):
    """Super-level sets could not be resolved on the sampling grid."""


class HypothesisError(IsolabError):
    """A comparison theorem's hypothesis fails for the given instance."""


class OverlapError(IsolabError, ValueError):
    """Shape components are not pairwise disjoint with disjoint closures."""


class FeasibilityError(IsolabError):
    """No feasible optimizer start could be sampled."""


class SpecParseError(IsolabError, ValueError):
    """Malformed density or shape specification file."""

    def __init__(self, message, line=None, key=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
        self.line = line
        self.key = key
