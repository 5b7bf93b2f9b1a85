"""Exception hierarchy shared by the solver modules."""


class PdglbmError(Exception):
    """Base class for every error raised by the package."""


class ModelEvaluationError(PdglbmError):
    """A flux or wave-speed evaluation failed."""


class SingularFluxError(ModelEvaluationError):
    """The flux is singular at the requested state (zero density)."""


class InadmissibleStateError(ModelEvaluationError):
    """Non-positive density or pressure where a physical state is required."""


class SingularCollisionError(PdglbmError):
    """Crank-Nicolson denominator 2*tau + dt is (numerically) zero.

    ``stage`` is the index of the offending stage in the step plan when known.
    """

    def __init__(self, message, stage=None, dt=None):
        super().__init__(message)
        self.stage = stage
        self.dt = dt


class TransportSolverError(PdglbmError):
    """Local implicit transport block is singular or badly conditioned."""


class StageError(PdglbmError):
    """Wraps an error raised inside a plan stage, keeping the stage index."""

    def __init__(self, message, stage, kind):
        super().__init__(message)
        self.stage = stage
        self.kind = kind


class UnstableRunError(PdglbmError):
    """Discrete norm blew up or became non-finite during time stepping."""


class ConfigError(PdglbmError):
    """Invalid run configuration."""
