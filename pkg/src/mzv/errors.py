"""Shared exception types."""


class InsufficientPrecision(RuntimeError):
    """The requested question cannot be resolved inside the exact window;
    retry with a higher precision or layer cutoff."""

    def __init__(self, message: str, suggested_prec: int | None = None):
        super().__init__(message)
        self.suggested_prec = suggested_prec


class PrecisionTooLow(RuntimeError):
    """The relation-discovery window has too few rows to trust a nullspace."""

    def __init__(self, message: str, suggested_prec: int | None = None,
                 suggested_d_max: int | None = None):
        super().__init__(message)
        self.suggested_prec = suggested_prec
        self.suggested_d_max = suggested_d_max


class ResidualNonzero(RuntimeError):
    """A reconstruction that theory says must vanish did not, at the
    precision used; either the precision is too low or there is a bug."""
