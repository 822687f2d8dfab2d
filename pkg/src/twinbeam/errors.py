class RankDeficientError(ValueError):
    """Raised when an unregularized zero-forcing solve has no exact inverse."""


class TrainingDivergedError(RuntimeError):
    """Raised when a generative training loss becomes NaN or infinite."""


class UntrainedModelError(RuntimeError):
    """Raised when sampling is requested from a model that was never trained."""


class ArtifactError(ValueError):
    """Raised for unreadable, mismatched or wrong-version artifacts."""


class ConfigHashMismatchError(ValueError):
    """Raised when inputs produced under different experiment configs are mixed."""


class SweepFailedError(RuntimeError):
    """Raised when one or more simulation cells of a sweep failed."""
