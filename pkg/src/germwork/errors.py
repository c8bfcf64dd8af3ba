"""Exception types raised across the package.

Every error carries an optional ``witness`` so callers (and the CLI report)
can print the offending elements without parsing the message.
"""


class GermworkError(Exception):
    """Base class. ``witness`` is a tuple of element indices or None."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SizeMismatch(GermworkError):
    pass


class NonAssociative(GermworkError):
    pass


class SignatureTooWeak(GermworkError):
    pass


class NotCompatible(GermworkError):
    pass


class NoRestrictionZero(GermworkError):
    pass


class NotBelow(GermworkError):
    pass


class Degenerate(GermworkError):
    pass


class NotMeetMorphism(GermworkError):
    pass


class NoLocalUnits(GermworkError):
    pass


class NotASlice(GermworkError):
    pass


class TooLarge(GermworkError):
    pass


class NotRange(GermworkError):
    pass


class NotMorphism(GermworkError):
    pass


class InvalidAction(GermworkError):
    pass


class NotInductive(GermworkError):
    pass


class NotProper(GermworkError):
    pass


class NotProperAction(GermworkError):
    pass


class NotEUnitary(GermworkError):
    pass


class RingMismatch(GermworkError):
    pass


class CategoryMismatch(GermworkError):
    pass


class NotGroupoid(GermworkError):
    pass


class UnknownName(GermworkError):
    pass


class SchemaError(GermworkError):
    pass


class IncompatibleKind(GermworkError):
    pass


class DegenerateOnProjections(GermworkError):
    pass


class P1Violation(NotProperAction):
    pass


class P2Violation(NotProperAction):
    pass
