"""Exception types shared across the package."""


class SkewprodError(Exception):
    """Base class for all package errors."""


class InvalidPresentation(SkewprodError):
    """A presentation is structurally malformed."""


class WordParseError(SkewprodError):
    """A word string failed to parse; carries the byte offset of the error."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class CapacityExceeded(SkewprodError):
    """Coset enumeration did not close within the allotted table size."""


class NotAGroup(SkewprodError):
    """Commutation data does not assemble into an associative table."""


class NotAutomorphism(SkewprodError):
    """A mapping claimed to be an automorphism is not one."""


class StructuralMismatch(SkewprodError):
    """Family parameters violate a structural precondition (divisibility)."""


class Collapse(SkewprodError):
    """A family presentation enumerated to a group smaller than expected.

    This is a mathematical finding, not an engineering failure: a collapse
    on a tuple that passed validation would contradict the classification.
    """

    def __init__(self, message: str, got_order: int, expected_order: int):
        super().__init__(message)
        self.got_order = got_order
        self.expected_order = expected_order


class BoxTooLarge(SkewprodError):
    """A parameter residue box exceeds the configured scan cardinality."""


class BoundExceeded(SkewprodError):
    """A search exceeded its configured node or order limit."""


class AmbiguousMaximum(SkewprodError):
    """Two maximal subgroup candidates of equal order are incomparable."""


class NoTableRow(SkewprodError):
    """A factorization matched no row of the five-case table."""
