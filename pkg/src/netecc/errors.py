class NetcodeError(Exception):
    """Base class for errors raised by netecc."""


class ParseError(NetcodeError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InsufficientCapacity(NetcodeError):
    """Fewer edge-disjoint paths exist than were requested."""


class InfeasibleError(NetcodeError):
    """Parameters violate the Singleton bound for the network."""


class ConstructionError(NetcodeError):
    """The greedy coefficient search ran out of candidates."""


class DecompositionError(NetcodeError, ValueError):
    pass


class CodeDefectError(NetcodeError):
    """Message and error images at a sink intersect nontrivially."""
