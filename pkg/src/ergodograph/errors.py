"""Exception types shared across the package."""


class ErgodographError(Exception):
    pass


class CapExceeded(ErgodographError):
    """An enumeration produced more items than the caller allowed."""

    def __init__(self, what, cap, count):
        super().__init__(f"{what}: more than {cap} items (stopped at {count})")
        self.what = what
        self.cap = cap
        self.count = count


class ParseError(ErgodographError):
    def __init__(self, message, line=None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line
        self.path = path


class InvalidGraph(ErgodographError):
    pass


class CoverError(ErgodographError):
    """A vertex map failed cover validation; ``report`` says why."""

    def __init__(self, report):
        super().__init__(report.summary())
        self.report = report


class EndpointMismatch(ErgodographError):
    pass


class InvalidTower(ErgodographError):
    pass


class NotInvariant(ErgodographError):
    pass


class NegativeWeight(ErgodographError):
    pass


class NotChainConstant(ErgodographError):
    """A weight vector varies along a chain of a compressed graph."""


class InfeasibleSystem(ErgodographError):
    pass


class MissingExpression(ErgodographError):
    pass


class NonIntegralDecomposition(ErgodographError):
    pass


class NotMeanZero(ErgodographError):
    pass


class NotApplicable(ErgodographError):
    pass


class InvalidSchedule(ErgodographError):
    pass


class UnroutableRequest(ErgodographError):
    def __init__(self, message, vertex=None):
        super().__init__(message if vertex is None else f"{message} (at vertex {vertex})")
        self.vertex = vertex
