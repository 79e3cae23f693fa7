"""Exception hierarchy shared by the solver modules."""


class QRESBError(Exception):
    """Base class for every error raised by this package."""


class InvalidGame(QRESBError, ValueError):
    """Payoffs violate the coordination-game orderings.

    ``failed`` names the first inequality that does not hold
    (``"a<=c"``, ``"b<=d"``, ``"b<=a"`` or ``"a<=d"``).
    """

    def __init__(self, failed: str, message: str | None = None):
        self.failed = failed
        super().__init__(message or f"invalid coordination game: {failed}")


class DomainError(QRESBError, ValueError):
    """An argument lies outside the domain of an operation."""


class NotContraction(QRESBError):
    """The logit map is not a contraction for these parameters."""

    def __init__(self, modulus: float):
        self.modulus = modulus
        super().__init__(
            f"contraction modulus {modulus:.6g} >= 1; use find_all_fixed_points"
        )


class NoConvergence(QRESBError):
    """Iteration budget exhausted before the residual tolerance was met."""
