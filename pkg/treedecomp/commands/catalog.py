from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Optional, Union

from sqlalchemy.orm import Session

from treedecomp.commands.outcome import (
    EXIT_BUDGET,
    EXIT_FAILED,
    EXIT_OK,
    CommandOutcome,
    format_table,
    key_text,
    plural,
    translate_errors,
)
from treedecomp.errors import DomainError, LabelingNotFound, SearchBudgetExhausted, UsageError
from treedecomp.models.schemas import LabelingEvent
from treedecomp.services.certificates import catalog_to_document, dump_document, labeling_to_model, write_document
from treedecomp.services.labeling import PREDICATES, Convention, label_tree
from treedecomp.services.trees import TREE_COUNTS, TreeFamilyCatalog, enumerate_trees, format_edge_list, load_edge_list

logger = logging.getLogger(__name__)

LISTING_LIMIT = 60


def edge_list_filename(order: int, index: int) -> str:
    return f"tree-{order}-{index:03d}.edges"


def write_edge_lists(catalog: TreeFamilyCatalog, directory: Union[str, Path]) -> List[Path]:
    """One edge-list file per catalog tree, named by order and catalog index."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for index, tree in enumerate(catalog.trees):
        path = directory / edge_list_filename(catalog.order, index)
        path.write_text(format_edge_list(tree), encoding="utf-8")
        paths.append(path)
    logger.info("wrote %d edge lists to %s", len(paths), directory)
    return paths


@translate_errors
def cmd_trees(
    order: int,
    output_path: Optional[Union[str, Path]] = None,
    max_order: Optional[int] = None,
    edge_list_dir: Optional[Union[str, Path]] = None,
) -> CommandOutcome:
    catalog = enumerate_trees(order, max_order)
    document = catalog_to_document(catalog)
    if output_path:
        write_document(document, output_path)
    if edge_list_dir:
        write_edge_lists(catalog, edge_list_dir)

    lines = [plural(catalog.count, "tree")]
    exit_code = EXIT_OK
    expected = TREE_COUNTS.get(order)
    if expected is not None:
        if expected == catalog.count:
            lines.append(f"matches A000055({order}) = {expected}")
        else:
            lines.append(f"MISMATCH: A000055({order}) = {expected}")
            exit_code = EXIT_FAILED
    if catalog.count <= LISTING_LIMIT:
        rows = [
            (i, key_text(t.canonical_key), "".join(str(d) for d in t.degree_sequence))
            for i, t in enumerate(catalog.trees)
        ]
        lines.append(format_table(["#", "canonical key", "degrees"], rows))
    return CommandOutcome(exit_code, "\n".join(lines), machine_report=dump_document(document))


@translate_errors
def cmd_label(order: int, mode: str, budget: Optional[int] = None, db: Optional[Session] = None) -> CommandOutcome:
    convention = _convention(mode)
    if convention is Convention.SEMIGRACEFUL and order % 2 == 0:
        raise DomainError(f"semigraceful labelings need an odd order, got {order}")
    catalog = enumerate_trees(order)
    predicate = PREDICATES[convention]

    events: List[LabelingEvent] = [LabelingEvent(event="start", order=order, mode=convention.value, count=catalog.count)]
    rows = []
    not_found = budget_hits = 0
    for index, tree in enumerate(catalog.trees):
        key = list(tree.canonical_key)
        try:
            labeling = label_tree(tree, convention, budget, db)
        except SearchBudgetExhausted as exc:
            budget_hits += 1
            events.append(LabelingEvent(event="error", index=index, canonical_key=key, message=str(exc)))
            rows.append((index, key_text(key), "budget exhausted"))
            continue
        except LabelingNotFound as exc:
            not_found += 1
            events.append(LabelingEvent(event="error", index=index, canonical_key=key, message=str(exc)))
            rows.append((index, key_text(key), "NO LABELING"))
            continue
        verified = predicate(tree, labeling)
        if not verified:
            not_found += 1
        events.append(
            LabelingEvent(event="labeling", index=index, canonical_key=key, labeling=labeling_to_model(labeling), verified=verified)
        )
        rows.append((index, key_text(key), " ".join(str(x) for x in labeling.labels)))
    found = catalog.count - not_found - budget_hits
    events.append(LabelingEvent(event="end", count=found))

    if not_found:
        exit_code, summary = EXIT_FAILED, f"{plural(not_found, 'tree')} without a {convention.value} labeling"
    elif budget_hits:
        exit_code, summary = EXIT_BUDGET, f"{plural(budget_hits, 'tree')} stopped by the search budget"
    else:
        exit_code, summary = EXIT_OK, f"{plural(found, 'labeling')}, all verified"
    lines = [summary]
    if catalog.count <= LISTING_LIMIT:
        lines.append(format_table(["#", "canonical key", "labels by vertex"], rows))
    machine = "".join(e.model_dump_json(exclude_none=True) + "\n" for e in events)
    return CommandOutcome(exit_code, "\n".join(lines), machine_report=machine)


def _convention(mode: str) -> Convention:
    try:
        return Convention(mode)
    except ValueError:
        raise UsageError(f"mode must be graceful or semigraceful, got {mode!r}")


@translate_errors
def cmd_label_file(tree_path: Union[str, Path], mode: str, budget: Optional[int] = None, db: Optional[Session] = None) -> CommandOutcome:
    """Label the single tree read from an edge-list file; labels follow the file's vertex ids."""
    convention = _convention(mode)
    tree = load_edge_list(tree_path)
    if convention is Convention.SEMIGRACEFUL and tree.order % 2 == 0:
        raise DomainError(f"semigraceful labelings need an odd order, got {tree.order}")
    labeling = label_tree(tree, convention, budget, db)
    verified = PREDICATES[convention](tree, labeling)
    event = LabelingEvent(
        event="labeling", index=0, canonical_key=list(tree.canonical_key), labeling=labeling_to_model(labeling), verified=verified
    )
    lines = [
        f"{convention.value} labeling of a tree of order {tree.order}, canonical key {key_text(tree.canonical_key)}",
        format_table(["vertex", "label"], list(enumerate(labeling.labels))),
    ]
    return CommandOutcome(
        EXIT_OK if verified else EXIT_FAILED,
        "\n".join(lines),
        machine_report=event.model_dump_json(exclude_none=True) + "\n",
    )
