"""Exception types raised by the simulator."""


class WsquidError(Exception):
    """Base class for all simulator errors."""


class GridTooNarrow(WsquidError, ValueError):
    """Eigenfunctions have not decayed at the edges of the flux grid."""


class NotConverged(WsquidError, RuntimeError):
    """Grid doubling moved an eigenvalue by more than the tolerance."""


class DriveZero(WsquidError, ValueError):
    """The drive envelope vanishes, so the dark state coefficients diverge."""


class StepResolutionError(WsquidError, ValueError):
    """Time step too coarse for the pulse or for the jump unraveling."""


class NormGrowth(WsquidError, RuntimeError):
    """Norm of the conditioned state increased during integration."""


class ZeroNorm(WsquidError, ValueError):
    """Conditioned state has (numerically) zero norm."""


class DecouplingViolation(WsquidError, ValueError):
    """Spectator qubits are not all decoupled during photon preparation."""


class DimensionGuard(WsquidError, ValueError):
    """Full tensor-product space would exceed the allowed dimension."""


class SampleMismatch(WsquidError, ValueError):
    """Two trajectory records do not share sample times or dimensions."""


class ConfigError(WsquidError, ValueError):
    """Invalid run configuration. Carries the file and line when known."""

    def __init__(self, message, path=None, line=None):
        super().__init__(message)
        self.message = message
        self.path = path
        self.line = line

    def __str__(self):
        loc = ""
        if self.path is not None:
            loc = f"{self.path}:{self.line}: " if self.line else f"{self.path}: "
        return loc + self.message
