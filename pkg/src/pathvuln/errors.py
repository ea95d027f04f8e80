"""Exception hierarchy shared across the pipeline.

Errors that carry a source position (lexing/parsing) derive from
SourceError; the extraction stage treats any SourceError as a per-sample
skip rather than a fatal condition.
"""


class PathVulnError(Exception):
    """Base class for all errors raised by this package."""


class MalformedRecord(PathVulnError):
    """A corpus line is not valid JSON or lacks a required field."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class InvalidLabel(MalformedRecord):
    """A corpus record carries a target outside {0, 1}."""


class SourceError(PathVulnError):
    """Lex or parse failure at a known source position."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class LexError(SourceError):
    """Illegal character or unterminated literal."""


class ParseError(SourceError):
    """Malformed input that does not form a function definition."""


class ParseUnsupported(SourceError):
    """Valid-looking C that uses a construct outside the supported subset."""


class EmptyBag(PathVulnError):
    """A function produced zero path-contexts; the sample is skipped."""


class AllMasked(PathVulnError):
    """Attention was asked to normalize over a fully padded bag."""


class VocabMismatch(PathVulnError):
    """Checkpoint and supplied vocabulary disagree on the vocabulary digest."""


class EmptyEvaluationSet(PathVulnError):
    """Evaluation was requested on a file with no samples."""


class CheckpointError(PathVulnError):
    """Checkpoint file is unreadable or has an unknown format version."""


class ArtifactMismatch(PathVulnError):
    """An artifact directory is inconsistent with its manifest."""


class Unscorable(PathVulnError):
    """A function could not be scored (parse failure or empty bag)."""

    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason
