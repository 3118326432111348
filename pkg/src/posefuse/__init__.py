"""Multi-frame person video motion transfer.

Synthesizes a video of a source person performing a target motion by fusing
appearance information from several source frames under a spatio-temporal
attention map, with separate foreground / background branches and spatial plus
multi-range temporal adversarial training. All data paths can be closed with a
deterministic synthetic articulated-figure dataset, so the whole pipeline runs
on a CPU in minutes.
"""

__version__ = "0.1.0"

from .errors import (
    CheckpointError,
    ConfigError,
    DegeneratePartError,
    GenerationError,
    MissingAnnotationError,
    TrainingDiverged,
)

__all__ = [
    "CheckpointError",
    "ConfigError",
    "DegeneratePartError",
    "GenerationError",
    "MissingAnnotationError",
    "TrainingDiverged",
    "__version__",
]
