"""Exception hierarchy shared across the package."""


class NarrowlabError(Exception):
    """Base class for all package errors."""


class DomainError(NarrowlabError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ResourceError(NarrowlabError, RuntimeError):
    """A computation would exceed a configured size or time budget."""


class NumericError(NarrowlabError, ArithmeticError):
    """A numeric routine failed to reach its accuracy target."""


class UnsupportedError(NarrowlabError, NotImplementedError):
    """A requested variant is recognised but not implemented."""


class FormatError(NarrowlabError, ValueError):
    """A file or stream does not match the expected binary layout."""
