"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class DecodeError(RuntimeError):
    """A user could not reconstruct its demanded file from cache and batch."""
