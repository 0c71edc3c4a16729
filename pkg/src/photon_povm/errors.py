"""Exception hierarchy shared by every module."""


class PhotonPovmError(Exception):
    """Base class for all library errors."""


class DomainError(PhotonPovmError, ValueError):
    """A width parameter or other real argument lies outside its domain."""


class InvalidParam(PhotonPovmError, ValueError):
    """A state or configuration parameter violates its invariants."""


class DegenerateFrame(PhotonPovmError, ValueError):
    """The reference vector m is parallel to the momentum p."""


class ZeroMomentum(PhotonPovmError, ValueError):
    """A momentum-dependent quantity was requested at p = 0."""


class VanishingProjection(PhotonPovmError, ValueError):
    """The physical projection of an extended state is (numerically) zero."""

    def __init__(self, k_squared: float, threshold: float):
        self.k_squared = k_squared
        self.threshold = threshold
        super().__init__(
            f"projected squared norm {k_squared:.3e} is below {threshold:.1e}; "
            "the preparation has no physical content"
        )


class ToleranceNotMet(PhotonPovmError, RuntimeError):
    """Two quadrature refinement levels disagree beyond the requested tolerance."""

    def __init__(self, coarse, fine, tol: float, context: str = ""):
        self.coarse = coarse
        self.fine = fine
        self.tol = tol
        self.context = context
        where = f" ({context})" if context else ""
        super().__init__(
            f"quadrature refinement mismatch{where}: {coarse!r} vs {fine!r}, tol {tol:.1e}"
        )


class RegimeMismatch(PhotonPovmError, ValueError):
    """An asymptotic series was evaluated outside its validity window."""
