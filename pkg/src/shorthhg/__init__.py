"""Short hierarchically hyperbolic structures on right-angled Artin groups."""

from .errors import (
    DomainError,
    EnumerationCapError,
    GraphValidationError,
    GroupMismatchError,
    InfeasibleError,
    NotASimplexError,
    ParseError,
    ShortHHGError,
)
from .raag import RAAG, DefiningGraph, Word

__all__ = [
    "RAAG",
    "DefiningGraph",
    "Word",
    "DomainError",
    "EnumerationCapError",
    "GraphValidationError",
    "GroupMismatchError",
    "InfeasibleError",
    "NotASimplexError",
    "ParseError",
    "ShortHHGError",
]
