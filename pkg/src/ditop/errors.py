"""Exception hierarchy shared by all ditop modules.

Operations that return reports (validators) never raise; everything else
fails fast with one of the classes below so callers and the CLI can map
failures to precise exit codes.
"""


class DitopError(Exception):
    """Base class for all errors raised by this package."""


class DomainMismatch(DitopError):
    """Range of the inner map is not contained in the domain of the outer one."""


class EndpointMismatch(DitopError):
    """Two paths were composed but their endpoints do not agree."""


class NotSurjective(DitopError):
    """A reparametrization was required to be onto its stated range."""


class NotMonotone(DitopError):
    """A reparametrization was required to be non-decreasing."""


class IllFormedWord(DitopError):
    """A composite path word violates its shape constraints."""


class UnknownCell(DitopError):
    """A cell or state name does not exist in the complex."""


class UnknownState(UnknownCell):
    """A state name does not exist in the complex."""


class InvalidFaces(DitopError):
    """Face data of a precubical set is inconsistent."""


class BadChordSpec(DitopError):
    """A 2-cell chord subdivision was requested with an invalid spec."""


class NotLoopFree(DitopError):
    """The 1-skeleton contains a directed cycle or a loop edge."""


class UnsupportedDimension(DitopError):
    """The complex contains cells of dimension >= 3, which engines reject."""


class CapExceeded(DitopError):
    """An enumeration grew past its configured cap."""


class NoTrace(DitopError):
    """No chain of cells connects the requested pair."""


class NotExecutionPath(DitopError):
    """The clock of a directed path is not surjective onto [0, n]."""


class NotCubical(DitopError):
    """A map between path complexes does not commute with face maps."""


class NotFunctorial(DitopError):
    """A cellular map does not induce a functor on discrete traces."""


class NotOpen(DitopError):
    """A span leg was required to be an open map but is not."""


class ParseError(DitopError):
    """A text input (GCX/PCX/CMAP/path spec) could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
