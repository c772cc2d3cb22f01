"""Exception hierarchy shared by every module."""


class ShortHHGError(Exception):
    """Base class for all library errors."""


class ParseError(ShortHHGError, ValueError):
    """Malformed word, graph file or quasimorphism spec."""


class GraphValidationError(ShortHHGError, ValueError):
    """Defining graph violates a structural requirement."""


class GroupMismatchError(ShortHHGError, ValueError):
    """Operands live in different groups."""


class EnumerationCapError(ShortHHGError, RuntimeError):
    """An enumeration would exceed its configured size cap."""


class DomainError(ShortHHGError, ValueError):
    """A map was evaluated outside the subgroup it is defined on."""


class InfeasibleError(ShortHHGError, ValueError):
    """Input data admit no solution."""


class NotASimplexError(ShortHHGError, ValueError):
    """Vertex set does not span a simplex of the blowup."""
