"""Exception hierarchy shared by all hdalang modules."""


class HdaError(Exception):
    """Base class for all domain errors raised by this package."""


class AxiomViolation(HdaError):
    """An iposet or cell table breaks a structural axiom."""


class InterfaceMismatch(HdaError):
    """Gluing attempted along interfaces that are not isomorphic lo-sets."""


class TruncationMismatch(HdaError):
    """Two languages with different truncation windows were combined."""


class ExprSyntaxError(HdaError):
    """Rational-expression text does not conform to the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class IllegalFace(HdaError):
    """Face map requested outside its domain (interface or disjointness)."""


class InvalidPath(HdaError):
    """A path literal or step sequence is inconsistent with the cell table."""


class NotInterval(HdaError):
    """An operation defined only for interval ipomsets got a non-interval one."""


class InvalidMap(HdaError):
    """A cell-to-cell function is not a valid (i)HDA map."""


class ShapeMismatch(HdaError):
    """Gluing attempted between cells with different event lo-sets."""


class NotSimple(HdaError):
    """A construction requiring a unique start or accept cell got several."""


class PreconditionViolation(HdaError):
    """A gluing precondition (initiality, finality, acyclicity, ...) fails."""


class ImagesNotDisjoint(HdaError):
    """Cylinder construction requires the two leg images to be disjoint."""


class NotSeparated(HdaError):
    """Start and accept cell neighbourhoods overlap, so the plus construction
    for separated languages does not apply."""


class IdentityOverlap(HdaError):
    """A cell is both a start and an accept cell where that is not allowed."""


class DocumentError(HdaError):
    """An interchange document is malformed or fails validation."""


class SizeCeiling(HdaError):
    """An intermediate automaton exceeded the configured cell-count ceiling."""
