"""Exception hierarchy shared across the toolkit."""


class StoryEventsError(Exception):
    """Base class for all toolkit errors."""


class BratFormatError(StoryEventsError):
    """An .ann line does not follow the standoff trigger-record layout."""


class OffsetError(StoryEventsError):
    """A character span falls outside the story text."""


class SurfaceMismatchError(StoryEventsError):
    """The recorded surface string differs from the text at its offsets."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class UnknownClassError(StoryEventsError):
    """An event-class string is not one of the seven known classes."""


class AlignmentError(StoryEventsError):
    """A mention boundary splits a token."""


class OverlapError(StoryEventsError):
    """Two mentions occupy overlapping token ranges."""


class SplitError(StoryEventsError):
    """Train/dev/test id lists overlap or reference missing stories."""


class EmptyCorpusError(StoryEventsError):
    """An operation that needs data received an empty corpus."""


class ConfigError(StoryEventsError):
    """A run configuration is inconsistent or incomplete."""


class DataError(StoryEventsError):
    """Model inputs or predictions reference data that does not exist."""


class MergeError(StoryEventsError):
    """Reviewed annotations failed validation during a merge."""

    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])
