"""
Error hierarchy for the embedding.

Every error carries a stable ``code`` (the class name, used by the CLI error
JSON) and a human readable ``detail``. Errors that point into a term or a JSON
document also carry a ``location``.
"""

from typing import Optional


class EmbedError(Exception):
    def __init__(self, detail: str = "", location: Optional[str] = None):
        self.detail = detail
        self.location = location
        super().__init__(self.message)

    @property
    def code(self) -> str:
        return type(self).__name__

    @property
    def message(self) -> str:
        if self.location is None:
            return self.detail
        return f"{self.detail} (at {self.location})"

    def to_json(self) -> dict:
        return {"error": self.code, "detail": self.message}


# registry / representation

class DuplicateAdt(EmbedError):
    """An ADT with this name is already registered."""


class UnknownFieldType(EmbedError):
    """A constructor field names an ADT that is not registered."""


class MutualRecursionUnsupported(EmbedError):
    """Distinct ADTs reference each other recursively."""


class UnknownAdt(EmbedError):
    pass


class ArityMismatch(EmbedError):
    pass


class BadTag(EmbedError):
    """A TAG value is out of range for its ADT."""


class PoisonRead(EmbedError):
    """An undefined (poisoned) value was observed."""


# typing

class TypeMismatch(EmbedError):
    pass


class UnboundVar(EmbedError):
    pass


class BadProjection(EmbedError):
    pass


class BadRoll(EmbedError):
    pass


class BadUnroll(EmbedError):
    pass


# construction / matching

class ResidualMatch(EmbedError):
    """A Match proxy node survived into a finished program."""


class MatchOutsideContext(EmbedError):
    """Embedded pattern used outside of a match context."""


class RecursiveSubPattern(EmbedError):
    """Nested pattern attempted on a recursive field."""


class PurityViolation(EmbedError):
    pass


# evaluation / lowering

class NoBranchMatched(EmbedError):
    pass


class IntegerDivByZero(EmbedError):
    pass


class MalformedTraces(EmbedError):
    """Case branch traces are not a complete enumeration of the scrutinee type."""


# serialisation / cli

class ParseError(EmbedError):
    pass


class UnknownExample(EmbedError):
    pass


class BadArgs(EmbedError):
    pass
