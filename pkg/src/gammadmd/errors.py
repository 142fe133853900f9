"""Exception and warning types shared across the package."""


class GammaDmdError(Exception):
    """Base class for errors raised by this package."""


class ShapeError(GammaDmdError, ValueError):
    """Operands have incompatible shapes."""


class DegenerateSpectrumError(GammaDmdError):
    """Eigenvalue entries collide (or the exponential basis lost rank)."""


class DegenerateSpectrumWarning(UserWarning):
    """Eigenvalue entries are nearly coincident; results may be unstable."""


class FidelitySingularityError(GammaDmdError):
    """A denoised entry is zero where the observed entry is not."""


class SimulationDivergedError(GammaDmdError):
    """Time integration produced a non-finite state."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time
