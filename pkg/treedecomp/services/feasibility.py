from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import List, Optional

from treedecomp.errors import DomainError
from treedecomp.services.trees import tree_count


@dataclass(frozen=True)
class FeasibilityReport:
    """Edge-count arithmetic for splitting K_p^(m) into k copies of the order-p tree family."""

    order: int
    tau: int
    gcd_value: int
    k_min: int
    m_min: int
    multigraph_edges: int
    family_edges: int

    @property
    def balanced(self) -> bool:
        return self.multigraph_edges == self.family_edges

    @property
    def is_coprime_case(self) -> bool:
        # gcd 1: the rotation construction's multiplicity 2*tau is already the least possible
        return self.gcd_value == 1

    def as_row(self) -> List[int]:
        return [self.order, self.tau, self.gcd_value, self.k_min, self.m_min, self.multigraph_edges, self.family_edges]


def edge_count_check(p: int, m: int, k: int, tau: int) -> bool:
    """m*p*(p-1)/2 == k*tau*(p-1), compared without division."""
    return m * p * (p - 1) == 2 * k * tau * (p - 1)


def minimal_family_multiplicity(p: int, tau: int) -> FeasibilityReport:
    if p < 3 or p % 2 == 0:
        raise DomainError(f"order must be odd and at least 3, got {p}")
    if tau < 1:
        raise DomainError(f"tau must be positive, got {tau}")
    g = gcd(p, tau)
    k_min = p // g
    # 2*k*tau must be divisible by p; with k = p/g this is 2*tau/g
    m_min = 2 * k_min * tau // p
    report = FeasibilityReport(
        order=p,
        tau=tau,
        gcd_value=g,
        k_min=k_min,
        m_min=m_min,
        multigraph_edges=m_min * p * (p - 1) // 2,
        family_edges=k_min * tau * (p - 1),
    )
    if not report.balanced:
        raise ArithmeticError(f"edge balance failed for p={p}, tau={tau}")
    return report


def gcd_table(max_order: int = 15, max_enumerated: Optional[int] = None) -> List[FeasibilityReport]:
    """Reports for every odd order 3..max_order, tau from enumeration or the fixture table."""
    return [
        minimal_family_multiplicity(p, tree_count(p, max_enumerated))
        for p in range(3, max_order + 1, 2)
    ]
