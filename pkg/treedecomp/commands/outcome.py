from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from treedecomp.errors import LabelingNotFound, SearchBudgetExhausted, TreeDecompError
from treedecomp.models.schemas import CertificateDocument

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1  # verification failed, or a tree has no labeling after exhaustive search
EXIT_USAGE = 2  # usage or validation error
EXIT_BUDGET = 3  # search budget exhausted, result indeterminate


@dataclass
class CommandOutcome:
    exit_code: int
    human_report: str
    certificate: Optional[CertificateDocument] = None
    machine_report: Optional[str] = None
    diagnostic: Optional[str] = None  # standard error only


def translate_errors(command: Callable[..., CommandOutcome]) -> Callable[..., CommandOutcome]:
    """Map the library's exceptions onto exit codes instead of letting them escape."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs) -> CommandOutcome:
        try:
            return command(*args, **kwargs)
        except SearchBudgetExhausted as exc:
            return CommandOutcome(EXIT_BUDGET, "", diagnostic=f"budget exhausted: {exc}")
        except LabelingNotFound as exc:
            return CommandOutcome(EXIT_FAILED, "", diagnostic=f"counterexample: {exc}")
        except TreeDecompError as exc:
            return CommandOutcome(EXIT_USAGE, "", diagnostic=f"error: {exc}")

    return wrapper


def format_table(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    cells = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = ["  ".join(cell.rjust(widths[i]) for i, cell in enumerate(row)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def plural(count: int, noun: str) -> str:
    return f"{count} {noun}" if count == 1 else f"{count} {noun}s"


def key_text(key: Sequence[int]) -> str:
    return "".join(str(x) if x < 10 else f"({x})" for x in key)
