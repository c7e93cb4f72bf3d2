"""Launcher that turns an exported instruction dataset into a fine-tuning run.

The package deliberately imports nothing from the dataset-construction
toolkit: it consumes the exported files (a five-field JSONL dataset and its
JSON manifest) exactly as they appear on disk, so the two codebases can
evolve independently as long as the file formats hold.
"""

from .errors import LauncherError, MissingFile, SchemaViolation, TrainerFailure
from .plan import Hyperparameters, TrainPlan, load_plan, resolve_plan, validate_dataset

__all__ = [
    "Hyperparameters",
    "LauncherError",
    "MissingFile",
    "SchemaViolation",
    "TrainPlan",
    "TrainerFailure",
    "load_plan",
    "resolve_plan",
    "validate_dataset",
]
