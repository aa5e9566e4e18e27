"""Exception types shared across the toolchain.

Every error raised on a user-facing path derives from ToolError so the CLI
can map it to exit code 1 with a machine-readable record on stderr.
"""


class ToolError(Exception):
    """Base class for all errors this package raises deliberately."""


class MalformedFile(ToolError):
    """Input file could not be parsed (syntax level)."""


class SchemaViolation(ToolError):
    """Parsed input violates the expected record schema."""

    def __init__(self, message, *, path=None):
        super().__init__(message if path is None else f"{path}: {message}")
        self.path = path


class EmptyDataset(ToolError):
    """Ingest produced zero items."""


class EmptyGolds(ToolError):
    """A metric was called with no gold answers."""


class IndexOutOfRange(ToolError):
    """An option index fell outside the item's option list."""


class WrongStyle(ToolError):
    """Operation applied to a dataset/item of an unsupported question style."""


class KindMismatch(ToolError):
    """Prediction kind (string vs option index) does not match the style."""


class UnknownItemIds(ToolError):
    """Prediction file refers to ids not present in the dataset."""

    def __init__(self, ids):
        self.ids = tuple(sorted(ids))
        shown = ", ".join(self.ids[:5])
        more = "" if len(self.ids) <= 5 else f" (+{len(self.ids) - 5} more)"
        super().__init__(f"unknown item ids: {shown}{more}")


class MissingPredictions(ToolError):
    """Strict mode: some dataset items have no prediction."""

    def __init__(self, ids):
        self.ids = tuple(sorted(ids))
        super().__init__(f"{len(self.ids)} items have no prediction")


class VariantMismatch(ToolError):
    """An artifact tagged with one dataset variant was used where another is required."""


class CoverageGap(ToolError):
    """A per-item input (scores, profiles, assignments) does not cover the dataset."""


class SubsetTooSmall(ToolError):
    """A subset has fewer items than the requested sample size."""


class EmptyRecords(ToolError):
    """No annotation records to aggregate."""


class UnknownTaskId(ToolError):
    """An annotation record refers to a task that was never issued."""


class DegenerateVector(ToolError):
    """Correlation input vector is constant."""


class LengthMismatch(ToolError):
    """Paired vectors have different lengths."""


class MissingProjection(ToolError):
    """Description/multiple-choice containment test called without a gold-span projection."""


class EmptyQuestion(ToolError):
    """Question has no tokens."""


class EmptyTarget(ToolError):
    """Span projection target is empty."""


class EmptyContext(ToolError):
    """Span projection context is empty."""


class ProvenanceMismatch(ToolError):
    """Inputs being merged carry incompatible provenance (stopword hash / overlap mode)."""


class BindFailure(ToolError):
    """Annotation server could not bind its address."""


class StoreUnwritable(ToolError):
    """Annotation record log path cannot be opened for appending."""
