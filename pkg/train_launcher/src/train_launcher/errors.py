"""Errors raised while validating a plan or running a training job."""


class LauncherError(Exception):
    """Base class for everything this package raises on purpose."""


class MissingFile(LauncherError):
    """A plan, dataset, or manifest path does not exist."""


class SchemaViolation(LauncherError):
    """A plan or dataset record does not match the expected shape."""


class TrainerFailure(LauncherError):
    """The training run itself failed; the cause is preserved in the message."""
