"""
Dataset Validation Report
Structured record of every problem found while ingesting the input files.
"""

import logging
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

_LOG = logging.getLogger("moirank.validator")

# Error codes
MALFORMED_RECORD = "MalformedRecord"
EMPTY_DATASET = "EmptyDataset"
DUPLICATE_ACCOUNT_ID = "DuplicateAccountId"
NEGATIVE_FOLLOWER_COUNT = "NegativeFollowerCount"
UNKNOWN_CATEGORY = "UnknownCategory"
UNKNOWN_ENDPOINT = "UnknownEndpoint"
SELF_LOOP = "SelfLoop"
UNKNOWN_AUTHOR = "UnknownAuthor"
DUPLICATE_POST_ID = "DuplicatePostId"
IO_ERROR = "IoError"

# Warning codes
DUPLICATE_EDGE = "DuplicateEdge"
DUPLICATE_ENGAGER = "DuplicateEngager"
SELF_ENGAGEMENT = "SelfEngagement"


@dataclass(frozen=True)
class ValidationIssue:
    """One error or warning, addressed by file and line (0 = whole file)."""
    file: str
    line: int
    code: str
    message: str

    def format(self) -> str:
        where = f"{self.file}:{self.line}" if self.line else self.file
        return f"{where}: {self.code}: {self.message}"


@dataclass
class ValidationReport:
    """
    Errors and warnings collected across all input files.

    A Dataset is produced iff errors is empty.
    """
    errors: List[ValidationIssue] = field(default_factory=list)
    warnings: List[ValidationIssue] = field(default_factory=list)
    record_counts: Dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def add_error(self, file: str, line: int, code: str, message: str) -> None:
        issue = ValidationIssue(file, line, code, message)
        self.errors.append(issue)
        _LOG.debug("Error %s", issue.format())

    def add_warning(self, file: str, line: int, code: str, message: str) -> None:
        issue = ValidationIssue(file, line, code, message)
        self.warnings.append(issue)
        _LOG.warning("%s", issue.format())

    def has_code(self, code: str) -> bool:
        return any(e.code == code for e in self.errors)

    def error_codes(self) -> Dict[str, int]:
        return dict(Counter(e.code for e in self.errors))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "record_counts": dict(sorted(self.record_counts.items())),
            "errors": [asdict(e) for e in self.errors],
            "warnings": [asdict(w) for w in self.warnings],
        }

    def generate_report(self, title: Optional[str] = None) -> str:
        """Human-readable validation summary."""
        lines = []
        lines.append("=" * 60)
        lines.append(title or "DATASET VALIDATION REPORT")
        lines.append("=" * 60)
        lines.append("")

        lines.append("Records:")
        for name, count in sorted(self.record_counts.items()):
            lines.append(f"  {name}: {count}")
        lines.append("")

        lines.append(f"Errors: {len(self.errors)}")
        for issue in self.errors:
            lines.append(f"  x {issue.format()}")
        lines.append(f"Warnings: {len(self.warnings)}")
        for issue in self.warnings:
            lines.append(f"  ! {issue.format()}")

        lines.append("")
        lines.append("=" * 60)
        if self.ok:
            lines.append("VALID - dataset accepted")
        else:
            lines.append("INVALID - dataset rejected")
        lines.append("=" * 60)

        return "\n".join(lines)
