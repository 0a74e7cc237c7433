"""
Exception hierarchy for moirank.
Every class carries a stable ``code`` used in reports and exit-code mapping.
"""

from typing import Any, Optional


class MoirankError(Exception):
    """Base class for all moirank failures."""

    code = "MoirankError"


class DataError(MoirankError, ValueError):
    """Input data violates a domain invariant."""

    code = "DataError"


class EmptyGraphError(DataError):
    code = "EmptyGraph"


class SelfLoopError(DataError):
    code = "SelfLoop"

    def __init__(self, message: str, record: Any = None):
        super().__init__(message)
        self.record = record


class UnknownEndpointError(DataError):
    code = "UnknownEndpoint"

    def __init__(self, message: str, record: Any = None):
        super().__init__(message)
        self.record = record


class DuplicateAccountIdError(DataError):
    code = "DuplicateAccountId"


class ZeroFollowersError(DataError):
    """ROA is undefined for an account declaring no followers."""

    code = "ZeroFollowers"

    def __init__(self, account: str):
        super().__init__(f"Account '{account}' has follower_count 0; ROA is undefined")
        self.account = account


class NoPostsError(DataError):
    """MOI is undefined for an account without posts."""

    code = "NoPosts"

    def __init__(self, account: str):
        super().__init__(f"Account '{account}' has no posts; MOI is undefined")
        self.account = account


class DatasetInvalid(DataError):
    """Raised when ingest collected errors and the caller asked for an exception."""

    code = "DatasetInvalid"

    def __init__(self, report: Any, message: Optional[str] = None):
        count = len(getattr(report, "errors", []))
        super().__init__(message or f"Dataset rejected with {count} error(s)")
        self.report = report


class ConfigError(MoirankError, ValueError):
    code = "ConfigError"
