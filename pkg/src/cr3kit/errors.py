"""Exception types shared across the toolkit."""


class Cr3kitError(Exception):
    """Base class for all toolkit errors."""


class DegenerateJet(Cr3kitError):
    """Division by a jet whose constant term is zero."""


class DomainError(Cr3kitError):
    """Function evaluated outside its domain (log/sqrt of a non-positive value, etc.)."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class ParseError(Cr3kitError):
    """Expression could not be parsed.

    Attributes:
        offset: byte offset into the source where parsing failed.
        expected: set of token descriptions that would have been accepted.
    """

    def __init__(self, message, offset, expected=()):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset
        self.expected = frozenset(expected)


class NotIntegrated(Cr3kitError):
    """Custom base chart supplied without a connection potential."""


class ReductionInvalid(Cr3kitError):
    """Torsion gate failed: the reduced curvature formula does not apply here."""


class NonPositive(Cr3kitError):
    """A field required to be positive is not, at the reported point."""

    def __init__(self, message, point=None, value=None):
        super().__init__(message)
        self.point = point
        self.value = value


class NonCompactCell(Cr3kitError):
    """Global integral requested on a chart without a compact integration cell."""


class ContactDegenerate(Cr3kitError):
    """Deformed 1-form fails the contact condition somewhere on the sampled cell."""

    def __init__(self, message, point=None, value=None):
        super().__init__(message)
        self.point = point
        self.value = value
