"""Error types shared by the engine, the acquisition cycle, and the service.

Every exception carries a stable machine-readable ``code`` so callers (CLI
exit paths, HTTP status mapping, tests) can dispatch without matching on
message text.
"""

from __future__ import annotations


class EvidentiaError(Exception):
    """Base class for all package errors."""

    code = "ERR_INTERNAL"


class ParseError(EvidentiaError):
    code = "ERR_PARSE"


class UnknownFieldError(ParseError):
    """Strict parsing: a document carried a key the format does not define."""

    code = "ERR_UNKNOWN_FIELD"


class NotValidatedError(EvidentiaError):
    """A network failed validation (or was never validated) where a
    validated polytree is required."""

    code = "ERR_NOT_VALIDATED"


class NoSuchNodeError(EvidentiaError):
    code = "ERR_NO_SUCH_NODE"


class IndexOutOfRangeError(EvidentiaError):
    code = "ERR_INDEX_OUT_OF_RANGE"


class DuplicateEvidenceError(EvidentiaError):
    code = "ERR_DUPLICATE_EVIDENCE"


class NoSuchEvidenceError(EvidentiaError):
    code = "ERR_NO_SUCH_EVIDENCE"


class ZeroProbabilityEvidenceError(EvidentiaError):
    """The ledger assigns probability zero to every joint configuration."""

    code = "ERR_ZERO_PROBABILITY_EVIDENCE"


class ZeroNormalizerError(EvidentiaError):
    code = "ERR_ZERO_NORMALIZER"


class TooLargeError(EvidentiaError):
    code = "ERR_TOO_LARGE"


class UnknownCaseError(EvidentiaError):
    code = "ERR_UNKNOWN_CASE"


class UnobservableFindingError(EvidentiaError):
    code = "ERR_UNOBSERVABLE_FINDING"


class AlreadyObservedError(EvidentiaError):
    code = "ERR_ALREADY_OBSERVED"


class NoUsableSourceError(EvidentiaError):
    code = "ERR_NO_USABLE_SOURCE"


class NoSuchSourceError(EvidentiaError):
    code = "ERR_NO_SUCH_SOURCE"


class NotTerminatedError(EvidentiaError):
    code = "ERR_NOT_TERMINATED"


class NoSuchSessionError(EvidentiaError):
    code = "ERR_NO_SUCH_SESSION"


class RevisionConflictError(EvidentiaError):
    code = "ERR_REVISION_CONFLICT"
