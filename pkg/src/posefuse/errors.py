"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration value (bad resolution, unknown strategy, ...)."""


class GenerationError(RuntimeError):
    """Synthetic scene could not be rendered (e.g. figure leaves the frame)."""


class DegeneratePartError(ValueError):
    """A body part has too few visible keypoints to estimate a transform."""


class MissingAnnotationError(KeyError):
    """A clip lacks an annotation (mask / flow) that was requested."""


class CheckpointError(RuntimeError):
    """Checkpoint file is unreadable or does not match the expected model."""


class TrainingDiverged(RuntimeError):
    """A loss became non-finite during optimization."""

    def __init__(self, message, last_checkpoint=None, iteration=None):
        super().__init__(message)
        self.last_checkpoint = last_checkpoint
        self.iteration = iteration
