"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument violates a documented precondition."""


class Unsupported(RuntimeError):
    """The request exceeds a size guard or names an unsupported configuration."""


class RankDeficient(ArithmeticError):
    """A sampled linear map is not full rank; the caller should resample."""


class DecodeError(ValueError):
    """Bytes could not be parsed as the expected canonical encoding."""


class SessionError(RuntimeError):
    """A protocol session failed for transport or ordering reasons."""
