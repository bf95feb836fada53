"""Exception hierarchy with stable machine-readable error codes.

Every error carries a ``code`` attribute that is used verbatim in CLI
stderr output and in HTTP error bodies, so codes must never change.
"""
from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all operational errors raised by this package."""

    code = "ToolkitError"


class ConfigError(ToolkitError):
    """A config file or config value is invalid."""

    code = "ConfigError"


class EmptyTokenError(ToolkitError):
    """The token canonicalizes to nothing encodable (no letters)."""

    code = "EmptyToken"


class LevelMismatchError(ToolkitError):
    """Requested phonetic level does not match the index or dictionary."""

    code = "LevelMismatch"


class ConfigMismatchError(ToolkitError):
    """Encoder config hash differs from what an artifact was built with."""

    code = "ConfigMismatch"


class UnsupportedVersionError(ToolkitError):
    """Persisted artifact uses an unknown format version."""

    code = "UnsupportedVersion"


class CorruptFileError(ToolkitError):
    """Persisted artifact fails its checksum or structural validation."""

    code = "CorruptFile"


class MalformedDocumentError(ToolkitError):
    """A corpus record could not be parsed."""

    code = "MalformedDocument"


class RatioOutOfRangeError(ToolkitError):
    """Manipulation ratio must lie in [0, 1]."""

    code = "RatioOutOfRange"


class EmptyWordlistError(ToolkitError):
    """Dictionary construction received no admissible words."""

    code = "EmptyWordlist"


class EmptyCorpusError(ToolkitError):
    """Model training received no usable tokens."""

    code = "EmptyCorpus"
