"""Exception types shared across pipeline stages."""


class FusionKitError(Exception):
    """Base class for all toolkit errors."""


# ingest
class UnreadablePath(FusionKitError):
    pass


class UndecodableText(FusionKitError):
    pass


class EmptyText(FusionKitError):
    pass


class InvalidWindow(FusionKitError):
    pass


# qagen
class EmptyChunk(FusionKitError):
    pass


class NoPairsFound(FusionKitError):
    pass


# corpus
class InvalidSpec(FusionKitError):
    pass


class SchemaViolation(FusionKitError):
    pass


class IoError(FusionKitError):
    pass


# llm_client
class InvalidMessages(FusionKitError):
    pass


class RetriesExhausted(FusionKitError):
    pass


class NonRetryable(FusionKitError):
    pass


class ProtocolError(FusionKitError):
    pass


# cot_prompting
class WrongAspectCount(FusionKitError):
    pass


class WrongExemplarCount(FusionKitError):
    pass


class EmptyField(FusionKitError):
    pass


class EmptyQuestion(FusionKitError):
    pass


# assessment
class UnknownTopic(FusionKitError):
    pass


class DuplicateId(FusionKitError):
    pass


class UnparsableJudgment(FusionKitError):
    pass


class ScoreOutOfRange(FusionKitError):
    pass


class MixedRuns(FusionKitError):
    pass
