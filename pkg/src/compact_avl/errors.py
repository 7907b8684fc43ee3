"""Exception hierarchy shared by all modules."""


class AvlError(Exception):
    """Base class for every error raised by this package."""


class StructureError(AvlError, ValueError):
    """The node arrays do not describe a single rooted binary tree."""


class InvalidTreeError(AvlError, ValueError):
    """A structurally sound tree violates the AVL (or LLAVL) balance rule."""


class FormatError(AvlError, ValueError):
    """Malformed serialized input (text, bitmap, archive or recursion file)."""


class ResourceLimitError(AvlError):
    """A requested size exceeds a configured exhaustive or counting limit."""


class ModelError(AvlError, ValueError):
    """A frequency table is unusable by the range coder."""


class TruncatedStreamError(AvlError, EOFError):
    """The coded byte stream ended before decoding finished."""


class IntegrityError(AvlError):
    """Decoded data disagrees with the header it was stored under."""


class NoFixedPointError(AvlError, ArithmeticError):
    """The recursion polynomial has no isolated positive fixed point."""
