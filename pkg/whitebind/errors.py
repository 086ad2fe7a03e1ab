"""Exception hierarchy for whitebind."""

from typing import Any


class WhitebindError(Exception):
    """Base class for every error raised by whitebind."""


class WordSyntaxError(WhitebindError, ValueError):
    """A word string does not follow either word grammar."""

    def __init__(self, message: str, text: str = "", position: int | None = None) -> None:
        self.text = text
        self.position = position
        if position is not None:
            message = f"{message} (at position {position} of {text!r})"
        super().__init__(message)


class RankExceeded(WhitebindError, ValueError):
    """A generator index is larger than the rank of the free group."""

    def __init__(self, generator: int, rank: int) -> None:
        self.generator = generator
        self.rank = rank
        super().__init__(f"generator x{generator} does not exist in rank {rank}")


class RankMismatch(WhitebindError, ValueError):
    """Two objects that must share a rank do not."""


class EmptyWord(WhitebindError, ValueError):
    """The operation needs a non-trivial word."""


class ResourceLimit(WhitebindError):
    """A configured search cap was reached before the search finished.

    Attributes:
        stage: Name of the search that stopped ("minimize", "level_set", ...)
        limit: The cap that was hit
        count: How far the search got
        partial: Whatever partial state the search had built (may be None)
    """

    def __init__(self, stage: str, limit: int, count: int, partial: Any = None) -> None:
        self.stage = stage
        self.limit = limit
        self.count = count
        self.partial = partial
        super().__init__(f"{stage}: resource limit {limit} reached after {count}")


class CertificateError(WhitebindError):
    """A certificate is malformed or its replay does not confirm the verdict."""
