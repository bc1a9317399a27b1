from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Union

from sqlalchemy.orm import Session

from treedecomp.commands.outcome import (
    EXIT_FAILED,
    EXIT_OK,
    CommandOutcome,
    format_table,
    translate_errors,
)
from treedecomp.config import settings
from treedecomp.errors import DomainError, UsageError
from treedecomp.models.schemas import CertificateDocument
from treedecomp.services.certificates import (
    CertificateCheck,
    certificate_to_document,
    dump_document,
    load_certificate,
    verify_certificate,
    write_document,
)
from treedecomp.services.decomposition import (
    build_family_certificate,
    build_rotation_decomposition,
    reproduce_eggleton,
)
from treedecomp.services.labeling import Convention, label_tree
from treedecomp.services.trees import enumerate_trees

logger = logging.getLogger(__name__)


def certificate_filename(doc: CertificateDocument) -> str:
    return f"k{doc.multigraph.order}-m{doc.multigraph.multiplicity}-{doc.kind}.json"


def _check_summary(check: CertificateCheck) -> str:
    if check.passed:
        pairs = len(check.verdict.table.counts)
        return f"verified: all {pairs} pairs covered exactly {check.multiplicity} times by {check.embeddings} embeddings"
    lines = ["verification FAILED"]
    lines.extend(f"  {problem}" for problem in check.problems)
    if check.verdict.deficits:
        rows = [
            (f"{a}-{b}", count, check.multiplicity, count - check.multiplicity)
            for (a, b), count in check.verdict.deficits
        ]
        lines.append(format_table(["pair", "count", "expected", "difference"], rows))
    return "\n".join(lines)


@translate_errors
def cmd_decompose(
    order: int,
    family: bool = False,
    tree_index: Optional[int] = None,
    output_path: Optional[Union[str, Path]] = None,
    budget: Optional[int] = None,
    db: Optional[Session] = None,
) -> CommandOutcome:
    if family == (tree_index is not None):
        raise UsageError("choose exactly one of --family or --tree-index")
    if order % 2 == 0:
        raise DomainError(f"cyclic decompositions are built for odd orders, got {order}")

    if family:
        certificate, verdict = build_family_certificate(order, budget, db)
        copies, per_copy = len(certificate.family_copies), len(certificate.trees)
    else:
        catalog = enumerate_trees(order)
        if not 0 <= tree_index < catalog.count:
            raise UsageError(f"tree index must be in 0..{catalog.count - 1}, got {tree_index}")
        tree = catalog.trees[tree_index]
        base = label_tree(tree, Convention.SEMIGRACEFUL, budget, db)
        certificate = build_rotation_decomposition(tree, base, tree_index)
        verdict = certificate.verify()
        copies, per_copy = len(certificate.copies), 1

    document = certificate_to_document(certificate)
    path = Path(output_path) if output_path else Path(settings.output_dir) / certificate_filename(document)
    write_document(document, path)

    spec = certificate.spec
    rows = [(f"K_{spec.order}^({spec.multiplicity})", copies, per_copy, len(verdict.table.counts), verdict.table.total(), "yes" if verdict.passed else "NO")]
    report = [
        format_table(["multigraph", "copies", "trees/copy", "pairs", "edges covered", "exact cover"], rows),
        f"certificate: {path}",
    ]
    return CommandOutcome(
        EXIT_OK if verdict.passed else EXIT_FAILED,
        "\n".join(report),
        certificate=document,
        machine_report=dump_document(document),
    )


@translate_errors
def cmd_verify(certificate_path: Union[str, Path]) -> CommandOutcome:
    document = load_certificate(certificate_path)
    check = verify_certificate(document)
    return CommandOutcome(
        EXIT_OK if check.passed else EXIT_FAILED,
        _check_summary(check),
        certificate=document,
        machine_report=dump_document(check.to_report()),
    )


@translate_errors
def cmd_eggleton(
    output_dir: Optional[Union[str, Path]] = None,
    budget: Optional[int] = None,
    db: Optional[Session] = None,
) -> CommandOutcome:
    directory = Path(output_dir or settings.output_dir)
    rows = []
    all_verified = True
    for result in reproduce_eggleton(budget, db):
        document = certificate_to_document(result.certificate)
        path = write_document(document, directory / certificate_filename(document))
        # re-read the file so the check sees only what was written
        check = verify_certificate(load_certificate(path))
        verified = result.passed and check.passed
        all_verified = all_verified and verified
        spec = result.certificate.spec
        rows.append((
            f"K_{spec.order}^({spec.multiplicity})",
            len(result.certificate.trees),
            len(result.certificate.family_copies),
            check.embeddings,
            check.multiplicity,
            "yes" if verified else "NO",
            str(path),
        ))
    report = format_table(["multigraph", "tau", "family copies", "embeddings", "coverage", "verified", "certificate"], rows)
    return CommandOutcome(EXIT_OK if all_verified else EXIT_FAILED, report)
