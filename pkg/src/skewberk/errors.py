"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class SkewBerkError(Exception):
    """Base class for all errors raised by this package."""


class PrecisionLoss(SkewBerkError):
    """A truncated series cannot certify the requested answer."""


class CoeffRootUnavailable(SkewBerkError):
    """An operation needs a root of a rational number that is not rational."""


class PoleAtCenter(SkewBerkError):
    pass


class PoleInDisk(SkewBerkError):
    pass


class PoleInAnnulus(SkewBerkError):
    pass


class InfiniteWdeg(SkewBerkError):
    pass


class TypeIUnsupported(SkewBerkError):
    pass


class SamePoint(SkewBerkError):
    pass


class InvalidPhi1(SkewBerkError):
    pass


class NotFixed(SkewBerkError):
    pass


class NotContracting(SkewBerkError):
    pass


class HypothesisFailed(SkewBerkError):
    pass


class Indeterminate(SkewBerkError):
    """The residue field Q cannot settle the question either way."""


class SpecSyntaxError(SyntaxError, SkewBerkError):
    """Parse failure carrying 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.msg_text = message
        self.line = line
        self.column = column
