from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sqlalchemy.orm import Session

from treedecomp.errors import DomainError, LabelingValidationError
from treedecomp.services.labeling import (
    Convention,
    VertexLabeling,
    is_semigraceful_labeling,
    label_catalog,
)
from treedecomp.services.trees import Tree, TreeFamilyCatalog, enumerate_trees

logger = logging.getLogger(__name__)

# rotation r sends label x to ((x + r - 1) mod p) + 1
ROTATION_CONVENTION = "label+r"

EGGLETON_ORDERS = (5, 7)

Pair = Tuple[int, int]


@dataclass(frozen=True)
class MultigraphSpec:
    """K_p^(m): p vertices labeled 1..p, every pair joined by m parallel edges."""

    order: int
    multiplicity: int

    def __post_init__(self):
        if self.order < 2:
            raise DomainError(f"a complete multigraph needs at least 2 vertices, got {self.order}")
        if self.multiplicity < 1:
            raise DomainError(f"edge multiplicity must be positive, got {self.multiplicity}")

    @property
    def total_edges(self) -> int:
        return self.multiplicity * self.order * (self.order - 1) // 2

    def pairs(self) -> Iterator[Pair]:
        return combinations(range(1, self.order + 1), 2)


@dataclass(frozen=True)
class EmbeddedTree:
    tree_index: int
    rotation: int
    labeling: VertexLabeling


@dataclass
class PairCoverageTable:
    order: int
    counts: Dict[Pair, int] = field(default_factory=dict)

    @classmethod
    def empty(cls, order: int) -> "PairCoverageTable":
        return cls(order, {pair: 0 for pair in combinations(range(1, order + 1), 2)})

    def add_edge(self, a: int, b: int) -> None:
        pair = (a, b) if a < b else (b, a)
        if pair not in self.counts:
            raise LabelingValidationError(f"pair {pair} is not a pair of labels 1..{self.order}")
        self.counts[pair] += 1

    def total(self) -> int:
        return sum(self.counts.values())

    def deficits(self, target: int) -> List[Tuple[Pair, int]]:
        """Pairs whose count differs from target, with their counts, in pair order."""
        return [(pair, count) for pair, count in sorted(self.counts.items()) if count != target]

    def __add__(self, other: "PairCoverageTable") -> "PairCoverageTable":
        if other.order != self.order:
            raise LabelingValidationError(f"cannot add coverage tables of orders {self.order} and {other.order}")
        return PairCoverageTable(self.order, {pair: count + other.counts[pair] for pair, count in self.counts.items()})


@dataclass(frozen=True)
class CoverVerdict:
    table: PairCoverageTable
    multiplicity: int
    passed: bool

    @property
    def deficits(self) -> List[Tuple[Pair, int]]:
        return self.table.deficits(self.multiplicity)


@dataclass(frozen=True)
class RotationDecomposition:
    spec: MultigraphSpec
    tree: Tree
    base: VertexLabeling
    copies: Tuple[EmbeddedTree, ...]

    def embeddings(self) -> List[Tuple[Tree, EmbeddedTree]]:
        return [(self.tree, copy) for copy in self.copies]

    def verify(self) -> CoverVerdict:
        return verify_cover(self.embeddings(), self.spec)


@dataclass(frozen=True)
class FamilyDecompositionCertificate:
    """Group r holds the rotation-r embedding of every tree of the catalog, in catalog order."""

    spec: MultigraphSpec
    catalog_order: int
    trees: Tuple[Tree, ...]
    bases: Tuple[VertexLabeling, ...]
    family_copies: Tuple[Tuple[EmbeddedTree, ...], ...]

    def embeddings(self) -> List[Tuple[Tree, EmbeddedTree]]:
        return [(self.trees[e.tree_index], e) for group in self.family_copies for e in group]

    def verify(self) -> CoverVerdict:
        return verify_cover(self.embeddings(), self.spec)


def rotate_labeling(labeling: VertexLabeling, r: int) -> VertexLabeling:
    if labeling.convention is not Convention.SEMIGRACEFUL:
        raise LabelingValidationError("rotations act on semigraceful labels 1..p")
    p = labeling.order
    if not 0 <= r < p:
        raise DomainError(f"rotation must be in 0..{p - 1}, got {r}")
    return VertexLabeling(Convention.SEMIGRACEFUL, tuple((x + r - 1) % p + 1 for x in labeling.labels))


def build_rotation_decomposition(tree: Tree, base: VertexLabeling, tree_index: int = 0) -> RotationDecomposition:
    """All 2n+1 rotations (identity included) of a semigraceful embedding cover K_{2n+1}^(2)."""
    if not is_semigraceful_labeling(tree, base):
        raise LabelingValidationError(f"base labeling of {list(tree.canonical_key)} is not semigraceful")
    copies = tuple(EmbeddedTree(tree_index, r, rotate_labeling(base, r)) for r in range(tree.order))
    return RotationDecomposition(MultigraphSpec(tree.order, 2), tree, base, copies)


def verify_cover(embeddings: Sequence[Tuple[Tree, EmbeddedTree]], spec: MultigraphSpec) -> CoverVerdict:
    """Recount every embedded edge per label pair; pass iff each pair is used exactly m times."""
    table = PairCoverageTable.empty(spec.order)
    for tree, embedded in embeddings:
        labeling = embedded.labeling
        if tree.order != spec.order or labeling.order != spec.order:
            raise LabelingValidationError(
                f"embedding of order {labeling.order} (tree order {tree.order}) does not fit K_{spec.order}"
            )
        if labeling.convention is not Convention.SEMIGRACEFUL:
            raise LabelingValidationError("embeddings place vertices on labels 1..p")
        lab = labeling.labels
        for u, v in tree.edges:
            table.add_edge(lab[u], lab[v])
    passed = all(count == spec.multiplicity for count in table.counts.values())
    return CoverVerdict(table, spec.multiplicity, passed)


def build_family_decomposition(
    p: int,
    catalog: TreeFamilyCatalog,
    labelings: Sequence[Optional[VertexLabeling]],
) -> FamilyDecompositionCertificate:
    if p % 2 == 0:
        raise DomainError(f"family decompositions are built for odd orders, got {p}")
    if catalog.order != p:
        raise LabelingValidationError(f"catalog has order {catalog.order}, expected {p}")
    bases: List[VertexLabeling] = []
    for index, tree in enumerate(catalog.trees):
        base = labelings[index] if index < len(labelings) else None
        if base is None:
            raise LabelingValidationError(f"missing base labeling for tree {list(tree.canonical_key)}")
        try:
            valid = is_semigraceful_labeling(tree, base)
        except LabelingValidationError:
            valid = False
        if not valid:
            raise LabelingValidationError(f"base labeling for tree {list(tree.canonical_key)} is not semigraceful")
        bases.append(base)
    if len(labelings) > catalog.count:
        raise LabelingValidationError(f"{len(labelings)} labelings for a catalog of {catalog.count} trees")
    family_copies = tuple(
        tuple(EmbeddedTree(index, r, rotate_labeling(base, r)) for index, base in enumerate(bases))
        for r in range(p)
    )
    return FamilyDecompositionCertificate(
        spec=MultigraphSpec(p, 2 * catalog.count),
        catalog_order=p,
        trees=catalog.trees,
        bases=tuple(bases),
        family_copies=family_copies,
    )


def build_family_certificate(
    p: int,
    budget: Optional[int] = None,
    db: Optional[Session] = None,
    max_order: Optional[int] = None,
) -> Tuple[FamilyDecompositionCertificate, CoverVerdict]:
    """Enumerate, label, decompose and verify for one odd order."""
    if p % 2 == 0:
        raise DomainError(f"family decompositions are built for odd orders, got {p}")
    catalog = enumerate_trees(p, max_order)
    labelings = label_catalog(catalog, Convention.SEMIGRACEFUL, budget, db)
    certificate = build_family_decomposition(p, catalog, labelings)
    verdict = certificate.verify()
    logger.info(
        "K_%d^(%d): %d family copies of %d trees, cover %s",
        p, certificate.spec.multiplicity, len(certificate.family_copies), catalog.count,
        "verified" if verdict.passed else "FAILED",
    )
    return certificate, verdict


@dataclass(frozen=True)
class EggletonResult:
    order: int
    certificate: FamilyDecompositionCertificate
    verdict: CoverVerdict

    @property
    def passed(self) -> bool:
        return self.verdict.passed


def reproduce_eggleton(budget: Optional[int] = None, db: Optional[Session] = None) -> Tuple[EggletonResult, ...]:
    """Family decompositions of K_5^(6) and K_7^(22), each independently re-verified."""
    results = []
    for p in EGGLETON_ORDERS:
        certificate, verdict = build_family_certificate(p, budget, db)
        results.append(EggletonResult(p, certificate, verdict))
    return tuple(results)
