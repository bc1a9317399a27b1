from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Tuple, Union

from pydantic import BaseModel, ValidationError

from treedecomp.errors import CertificateFormatError
from treedecomp.models.schemas import (
    CatalogDocument,
    CatalogTreeModel,
    CertificateDocument,
    CertificateTreeModel,
    LabelingModel,
    MultigraphModel,
    PairDeficitModel,
    VerificationReport,
)
from treedecomp.services.decomposition import (
    ROTATION_CONVENTION,
    CoverVerdict,
    EmbeddedTree,
    FamilyDecompositionCertificate,
    MultigraphSpec,
    RotationDecomposition,
    rotate_labeling,
    verify_cover,
)
from treedecomp.services.labeling import Convention, VertexLabeling, labeling_from_pairs, labeling_to_pairs
from treedecomp.services.trees import TREE_COUNTS, Tree, TreeFamilyCatalog, tree_from_level_sequence

logger = logging.getLogger(__name__)


def labeling_to_model(labeling: VertexLabeling) -> LabelingModel:
    return LabelingModel(convention=labeling.convention.value, labels=labeling_to_pairs(labeling))


def labeling_from_model(model: LabelingModel) -> VertexLabeling:
    return labeling_from_pairs(model.convention, model.labels)


def catalog_to_document(catalog: TreeFamilyCatalog) -> CatalogDocument:
    return CatalogDocument(
        order=catalog.order,
        count=catalog.count,
        trees=[CatalogTreeModel(canonical_key=list(t.canonical_key), edges=list(t.edges)) for t in catalog.trees],
    )


def catalog_from_document(doc: CatalogDocument) -> TreeFamilyCatalog:
    trees = []
    for record in doc.trees:
        tree = Tree(doc.order, tuple(tuple(e) for e in record.edges))
        if list(tree.canonical_key) != record.canonical_key:
            raise CertificateFormatError(f"stored key {record.canonical_key} does not match the edges ({list(tree.canonical_key)})")
        trees.append(tree)
    if len(trees) != doc.count:
        raise CertificateFormatError(f"catalog declares {doc.count} trees but lists {len(trees)}")
    keys = [t.canonical_key for t in trees]
    if keys != sorted(set(keys)):
        raise CertificateFormatError("catalog trees must have distinct keys in ascending order")
    return TreeFamilyCatalog(order=doc.order, trees=tuple(trees))


def certificate_to_document(decomposition: Union[FamilyDecompositionCertificate, RotationDecomposition]) -> CertificateDocument:
    if isinstance(decomposition, RotationDecomposition):
        kind = "rotation"
        pairs = [(decomposition.tree, decomposition.base)]
    else:
        kind = "family"
        pairs = list(zip(decomposition.trees, decomposition.bases))
    spec = decomposition.spec
    return CertificateDocument(
        kind=kind,
        multigraph=MultigraphModel(order=spec.order, multiplicity=spec.multiplicity),
        catalog_order=spec.order,
        rotation_convention=ROTATION_CONVENTION,
        trees=[
            CertificateTreeModel(canonical_key=list(tree.canonical_key), base_labeling=labeling_to_model(base))
            for tree, base in pairs
        ],
    )


def dump_document(doc: BaseModel) -> str:
    return doc.model_dump_json(indent=2) + "\n"


def write_document(doc: BaseModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_document(doc), encoding="utf-8")
    logger.info("wrote %s", path)
    return path


def parse_certificate(text: str) -> CertificateDocument:
    try:
        return CertificateDocument.model_validate_json(text)
    except ValidationError as exc:
        raise CertificateFormatError(f"malformed certificate: {exc.error_count()} problem(s): {exc.errors()[0]['msg']}")


def load_certificate(path: Union[str, Path]) -> CertificateDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CertificateFormatError(f"cannot read certificate {path}: {exc}")
    return parse_certificate(text)


@dataclass
class CertificateCheck:
    order: int
    multiplicity: int
    embeddings: int
    verdict: CoverVerdict
    problems: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict.passed and not self.problems

    def to_report(self) -> VerificationReport:
        return VerificationReport(
            passed=self.passed,
            order=self.order,
            multiplicity=self.multiplicity,
            embeddings=self.embeddings,
            problems=list(self.problems),
            deficits=[
                PairDeficitModel(pair=pair, count=count, expected=self.multiplicity)
                for pair, count in self.verdict.deficits
            ],
        )


def _rebuild_tree(record: CertificateTreeModel, order: int) -> Tuple[Tree, VertexLabeling]:
    tree = tree_from_level_sequence(record.canonical_key)
    if list(tree.canonical_key) != record.canonical_key:
        raise CertificateFormatError(f"{record.canonical_key} is not a canonical level sequence")
    if tree.order != order:
        raise CertificateFormatError(f"tree {record.canonical_key} has order {tree.order}, certificate order is {order}")
    base = labeling_from_model(record.base_labeling)
    if base.convention is not Convention.SEMIGRACEFUL:
        raise CertificateFormatError(f"base labeling of {record.canonical_key} must use labels 1..{order}")
    if base.order != order:
        raise CertificateFormatError(f"base labeling of {record.canonical_key} has {base.order} labels")
    return tree, base


def verify_certificate(doc: CertificateDocument) -> CertificateCheck:
    """Rebuild every embedding from the bases and the rotation rule, then recount the cover."""
    p = doc.multigraph.order
    if doc.catalog_order != p:
        raise CertificateFormatError(f"catalog order {doc.catalog_order} differs from multigraph order {p}")
    if not doc.trees:
        raise CertificateFormatError("certificate lists no trees")
    problems: List[str] = []
    rebuilt = [_rebuild_tree(record, p) for record in doc.trees]
    keys = [tree.canonical_key for tree, _ in rebuilt]
    if doc.kind == "rotation" and len(rebuilt) != 1:
        problems.append(f"a rotation certificate holds one tree, found {len(rebuilt)}")
    if doc.kind == "family":
        if len(set(keys)) != len(keys):
            problems.append("family lists an isomorphism class more than once")
        if p in TREE_COUNTS and len(set(keys)) != TREE_COUNTS[p]:
            problems.append(f"family has {len(set(keys))} distinct trees, the order-{p} family has {TREE_COUNTS[p]}")
    embeddings = [
        (tree, EmbeddedTree(index, r, rotate_labeling(base, r)))
        for r in range(p)
        for index, (tree, base) in enumerate(rebuilt)
    ]
    verdict = verify_cover(embeddings, MultigraphSpec(p, doc.multigraph.multiplicity))
    return CertificateCheck(
        order=p,
        multiplicity=doc.multigraph.multiplicity,
        embeddings=len(embeddings),
        verdict=verdict,
        problems=problems,
    )
