from __future__ import annotations

from enum import Enum
from typing import Optional, Sequence


class TreeDecompError(ValueError):
    """Base class for every input or validation problem. The CLI maps it to exit code 2."""


class OrderRangeError(TreeDecompError):
    pass


class StructureError(TreeDecompError):
    pass


class DomainError(TreeDecompError):
    pass


class LabelingValidationError(TreeDecompError):
    pass


class CertificateFormatError(TreeDecompError):
    pass


class UsageError(TreeDecompError):
    pass


class SearchStatus(str, Enum):
    FOUND = "found"
    EXHAUSTED = "exhausted"
    BUDGET = "budget"


class SearchFailure(RuntimeError):
    status: SearchStatus = SearchStatus.EXHAUSTED

    def __init__(self, canonical_key: Sequence[int], convention: str, expansions: int = 0, message: Optional[str] = None) -> None:
        self.canonical_key = tuple(canonical_key)
        self.convention = convention
        self.expansions = expansions
        super().__init__(message or f"no {convention} labeling for tree {list(self.canonical_key)} ({self.status.value} after {expansions} expansions)")


class LabelingNotFound(SearchFailure):
    status = SearchStatus.EXHAUSTED


class SearchBudgetExhausted(SearchFailure):
    status = SearchStatus.BUDGET

