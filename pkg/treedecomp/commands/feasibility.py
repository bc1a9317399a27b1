from __future__ import annotations

import json
from typing import List, Optional

from treedecomp.commands.outcome import EXIT_OK, CommandOutcome, format_table, translate_errors
from treedecomp.errors import UsageError
from treedecomp.models.schemas import FeasibilityRow
from treedecomp.services.feasibility import FeasibilityReport, gcd_table, minimal_family_multiplicity
from treedecomp.services.trees import tree_count

HEADERS = ["p", "tau", "gcd", "k_min", "m_min", "K_p^(m) edges", "family edges"]

TABLE_MAX_ORDER = 15


def _row_model(report: FeasibilityReport) -> FeasibilityRow:
    return FeasibilityRow(
        order=report.order,
        tau=report.tau,
        gcd=report.gcd_value,
        k_min=report.k_min,
        m_min=report.m_min,
        multigraph_edges=report.multigraph_edges,
        family_edges=report.family_edges,
        coprime_case=report.is_coprime_case,
    )


def _outcome(reports: List[FeasibilityReport]) -> CommandOutcome:
    human = format_table(HEADERS, [r.as_row() for r in reports])
    machine = json.dumps([_row_model(r).model_dump() for r in reports], indent=2) + "\n"
    return CommandOutcome(EXIT_OK, human, machine_report=machine)


@translate_errors
def cmd_feasibility(order: Optional[int] = None, tau: Optional[int] = None, table: bool = False) -> CommandOutcome:
    if table:
        # illustration only: gcd(p, tau(p)) is 1 for most small odd p
        return _outcome(gcd_table(TABLE_MAX_ORDER))
    if order is None:
        raise UsageError("--order is required unless --table is given")
    if tau is None:
        tau = tree_count(order)
    return _outcome([minimal_family_multiplicity(order, tau)])
