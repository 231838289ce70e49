"""Exception hierarchy shared by all codecs."""

from __future__ import annotations


class DKCodeError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(DKCodeError, ValueError):
    """A parameter lies outside the range an operation accepts."""


class DomainError(DKCodeError, ValueError):
    """A real argument lies outside the function's domain."""


class LengthMismatchError(DKCodeError, ValueError):
    pass


class BitstreamUnderflowError(DKCodeError, EOFError):
    """Attempt to read past the end of a bit buffer."""


class TransformerUnderflowError(DKCodeError, EOFError):
    """The unbiased input ran out before the requested output was produced."""

    def __init__(self, produced: int, requested: int):
        super().__init__(
            f"input exhausted after producing {produced} of {requested} biased symbols"
        )
        self.produced = produced
        self.requested = requested


class DecodeDivergenceError(DKCodeError):
    """Inverse transform disagrees with the forward transform."""

    def __init__(self, index: int, message: str = ""):
        super().__init__(message or f"transformer diverged at symbol {index}")
        self.index = index


class CorruptStreamError(DKCodeError):
    """A constrained stream cannot have been produced by the encoder."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (offset {offset})"
        super().__init__(message)
        self.offset = offset


class CorruptContainerError(DKCodeError):
    """Header and payload of an encoded container are inconsistent."""


class NotFactorableError(DKCodeError, ValueError):
    """k - d + 1 is prime, so no multi-factor interleaving exists."""
