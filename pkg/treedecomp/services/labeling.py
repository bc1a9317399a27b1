from __future__ import annotations

import heapq
import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sqlalchemy.orm import Session

from treedecomp.config import settings
from treedecomp.errors import (
    DomainError,
    LabelingNotFound,
    LabelingValidationError,
    SearchBudgetExhausted,
    SearchStatus,
)
from treedecomp.services.cache import discard_labeling, find_cached_labeling, increment_cache_hit, store_labeling
from treedecomp.services.trees import Tree, TreeFamilyCatalog, canonical_layout

logger = logging.getLogger(__name__)


class Convention(str, Enum):
    GRACEFUL = "graceful"
    SEMIGRACEFUL = "semigraceful"


@dataclass(frozen=True)
class VertexLabeling:
    """labels[v] is the label of vertex v; graceful labels are 0..p-1, semigraceful 1..p."""

    convention: Convention
    labels: Tuple[int, ...]

    def __post_init__(self):
        try:
            convention = Convention(self.convention)
        except ValueError:
            raise LabelingValidationError(f"unknown labeling convention {self.convention!r}")
        labels = tuple(int(x) for x in self.labels)
        low = 0 if convention is Convention.GRACEFUL else 1
        if sorted(labels) != list(range(low, low + len(labels))):
            raise LabelingValidationError(
                f"{convention.value} labels must be a bijection onto {low}..{low + len(labels) - 1}, got {list(labels)}"
            )
        object.__setattr__(self, "convention", convention)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_mapping(cls, convention: Union[Convention, str], mapping: Mapping[int, int]) -> "VertexLabeling":
        if sorted(mapping) != list(range(len(mapping))):
            raise LabelingValidationError(f"labeling must name every vertex 0..{len(mapping) - 1} once")
        return cls(Convention(convention), tuple(mapping[v] for v in range(len(mapping))))

    @property
    def order(self) -> int:
        return len(self.labels)

    def as_dict(self) -> dict:
        return dict(enumerate(self.labels))


@dataclass(frozen=True)
class EdgeLabelMultiset:
    # one value per tree edge, in the tree's edge order
    values: Tuple[int, ...]

    def counts(self) -> Counter:
        return Counter(self.values)

    def sorted_values(self) -> Tuple[int, ...]:
        return tuple(sorted(self.values))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SearchOutcome:
    status: SearchStatus
    labeling: Optional[VertexLabeling]
    expansions: int

    @property
    def found(self) -> bool:
        return self.status is SearchStatus.FOUND


def cyclic_distance(n: int, s: int, t: int) -> int:
    if n < 1:
        raise DomainError(f"cycle length must be positive, got {n}")
    if not (1 <= s <= n and 1 <= t <= n):
        raise DomainError(f"dc_{n} is defined on labels 1..{n}, got ({s}, {t})")
    d = abs(s - t)
    return d if 2 * d <= n else n - d


def _check_orders(tree: Tree, labeling: VertexLabeling) -> None:
    if labeling.order != tree.order:
        raise LabelingValidationError(f"labeling has {labeling.order} labels but the tree has order {tree.order}")


def _require(labeling: VertexLabeling, convention: Convention) -> None:
    if labeling.convention is not convention:
        raise LabelingValidationError(f"expected a {convention.value} labeling, got {labeling.convention.value}")


def induced_edge_labels(tree: Tree, labeling: VertexLabeling) -> EdgeLabelMultiset:
    """Absolute differences under the graceful convention, dc_p under the semigraceful one."""
    _check_orders(tree, labeling)
    lab = labeling.labels
    if labeling.convention is Convention.GRACEFUL:
        return EdgeLabelMultiset(tuple(abs(lab[u] - lab[v]) for u, v in tree.edges))
    p = tree.order
    return EdgeLabelMultiset(tuple(cyclic_distance(p, lab[u], lab[v]) for u, v in tree.edges))


def semigraceful_target(p: int) -> Counter:
    return Counter({d: 2 for d in range(1, p // 2 + 1)})


def is_graceful_labeling(tree: Tree, labeling: VertexLabeling) -> bool:
    _require(labeling, Convention.GRACEFUL)
    values = induced_edge_labels(tree, labeling).values
    return len(set(values)) == len(values)


def _require_odd(tree: Tree) -> None:
    if tree.order % 2 == 0:
        raise DomainError(f"semigraceful labelings are defined for odd orders 2n+1, got {tree.order}")


def is_semigraceful_labeling(tree: Tree, labeling: VertexLabeling) -> bool:
    _require_odd(tree)
    _require(labeling, Convention.SEMIGRACEFUL)
    return induced_edge_labels(tree, labeling).counts() == semigraceful_target(tree.order)


def graceful_to_semigraceful(tree: Tree, labeling: VertexLabeling) -> VertexLabeling:
    """Shift a graceful labeling of an odd tree up by one.

    The distinct differences 1..2n fold under dc_{2n+1} onto 1,1,2,2,...,n,n.
    """
    _require_odd(tree)
    if not is_graceful_labeling(tree, labeling):
        raise LabelingValidationError("input labeling is not graceful")
    return VertexLabeling(Convention.SEMIGRACEFUL, tuple(x + 1 for x in labeling.labels))


class _BudgetHit(Exception):
    pass


def search_order(tree: Tree) -> Tuple[List[int], List[int]]:
    """Vertex assignment order and, per position, the already-placed neighbour (-1 for the first).

    Starts at a vertex of maximum degree and keeps taking the highest-degree vertex adjacent to
    the placed set, smallest id first on ties.
    """
    degrees = tree.degrees
    adjacency = tree.adjacency
    start = min(range(tree.order), key=lambda v: (-degrees[v], v))
    order = [start]
    anchors = [-1]
    placed = {start}
    frontier = [(-degrees[w], w, start) for w in adjacency[start]]
    heapq.heapify(frontier)
    while frontier:
        _, v, anchor = heapq.heappop(frontier)
        order.append(v)
        anchors.append(anchor)
        placed.add(v)
        for w in adjacency[v]:
            if w not in placed:
                heapq.heappush(frontier, (-degrees[w], w, v))
    return order, anchors


def twin_leaf_positions(tree: Tree, order: Sequence[int], anchors: Sequence[int]) -> List[int]:
    """For each search position, the previous position holding a leaf on the same anchor, else -1.

    Leaves hanging off one vertex are interchangeable, so the search only tries their labels in
    increasing candidate rank.
    """
    previous = [-1] * len(order)
    last_leaf_on: Dict[int, int] = {}
    for i in range(1, len(order)):
        if tree.degrees[order[i]] != 1:
            continue
        previous[i] = last_leaf_on.get(anchors[i], -1)
        last_leaf_on[anchors[i]] = i
    return previous


class _LabelSearch:
    """Depth-first label assignment with per-value multiplicity pruning.

    Each placed vertex after the first closes exactly one edge to its anchor, so a partial
    assignment is dropped as soon as that edge's induced value is already at its limit. Labels are
    tried largest induced value first, and a branch is also dropped once some value still short of
    its limit has no pair of labels left that an unclosed edge could take.
    """

    def __init__(
        self,
        tree: Tree,
        low: int,
        distance: Callable[[int, int], int],
        max_value: int,
        limit: int,
        budget: int,
        first_labels: Optional[Sequence[int]] = None,
    ) -> None:
        self.p = tree.order
        self.distance = distance
        self.limit = limit
        self.budget = budget
        self.order, self.anchors = search_order(tree)
        self.twin_before = twin_leaf_positions(tree, self.order, self.anchors)
        labels = range(low, low + self.p)
        self.first_labels = list(first_labels) if first_labels is not None else list(labels)
        self.candidates = {a: sorted(labels, key=lambda b, a=a: (-distance(a, b), b)) for a in labels}
        self.pairs: List[List[Tuple[int, int]]] = [[] for _ in range(max_value + 1)]
        for a in labels:
            for b in labels:
                if a < b:
                    self.pairs[distance(a, b)].append((a, b))
        self.label_of = [-1] * self.p
        self.rank = [-1] * self.p
        self.vertex_at = [-1] * (low + self.p)
        # unplaced neighbours left on each placed vertex
        self.pending = list(tree.degrees)
        self.count = [0] * (max_value + 1)
        self.expansions = 0

    def _expand(self) -> None:
        if self.expansions >= self.budget:
            raise _BudgetHit()
        self.expansions += 1

    def _open(self, label: int) -> bool:
        vertex = self.vertex_at[label]
        return vertex < 0 or self.pending[vertex] > 0

    def _values_reachable(self) -> bool:
        for value in range(len(self.count) - 1, 0, -1):
            if self.count[value] >= self.limit:
                continue
            if not any(
                (self.vertex_at[a] < 0 or self.vertex_at[b] < 0) and self._open(a) and self._open(b)
                for a, b in self.pairs[value]
            ):
                return False
        return True

    def _place(self, i: int) -> bool:
        if i == self.p:
            return True
        v = self.order[i]
        anchor = self.anchors[i]
        anchor_label = self.label_of[anchor]
        candidates = self.candidates[anchor_label]
        twin = self.twin_before[i]
        start = self.rank[self.order[twin]] + 1 if twin >= 0 else 0
        for r in range(start, self.p):
            label = candidates[r]
            if self.vertex_at[label] >= 0:
                continue
            d = self.distance(anchor_label, label)
            if self.count[d] >= self.limit:
                continue
            self._expand()
            self.vertex_at[label] = v
            self.label_of[v] = label
            self.rank[v] = r
            self.count[d] += 1
            self.pending[v] -= 1
            self.pending[anchor] -= 1
            if self._values_reachable() and self._place(i + 1):
                return True
            self.pending[anchor] += 1
            self.pending[v] += 1
            self.count[d] -= 1
            self.label_of[v] = -1
            self.vertex_at[label] = -1
        return False

    def run(self) -> SearchStatus:
        try:
            first = self.order[0]
            for label in self.first_labels:
                self._expand()
                self.vertex_at[label] = first
                self.label_of[first] = label
                if self._values_reachable() and self._place(1):
                    return SearchStatus.FOUND
                self.label_of[first] = -1
                self.vertex_at[label] = -1
        except _BudgetHit:
            return SearchStatus.BUDGET
        return SearchStatus.EXHAUSTED


def _budget(budget: Optional[int]) -> int:
    value = settings.search_budget if budget is None else budget
    if value < 1:
        raise LabelingValidationError(f"search budget must be positive, got {value}")
    return value


def find_graceful_labeling(tree: Tree, budget: Optional[int] = None) -> SearchOutcome:
    search = _LabelSearch(
        tree,
        low=0,
        distance=lambda a, b: abs(a - b),
        max_value=tree.order - 1,
        limit=1,
        budget=_budget(budget),
        # x -> p-1-x keeps a labeling graceful, so the first vertex stays in the lower half
        first_labels=range((tree.order - 1) // 2 + 1),
    )
    status = search.run()
    labeling = VertexLabeling(Convention.GRACEFUL, tuple(search.label_of)) if status is SearchStatus.FOUND else None
    return SearchOutcome(status, labeling, search.expansions)


def _direct_semigraceful(tree: Tree, budget: int) -> SearchOutcome:
    p = tree.order
    search = _LabelSearch(
        tree,
        low=1,
        distance=lambda a, b: cyclic_distance(p, a, b),
        max_value=p // 2,
        limit=2,
        budget=budget,
        # rotating any semigraceful labeling keeps it semigraceful, so the first vertex can take 1
        first_labels=[1],
    )
    status = search.run()
    labeling = VertexLabeling(Convention.SEMIGRACEFUL, tuple(search.label_of)) if status is SearchStatus.FOUND else None
    return SearchOutcome(status, labeling, search.expansions)


def find_semigraceful_labeling(tree: Tree, budget: Optional[int] = None) -> SearchOutcome:
    """Graceful search plus the shift-by-one conversion, then direct semigraceful backtracking.

    Both phases draw on one budget; the direct phase only gets what the graceful phase left.
    """
    _require_odd(tree)
    limit = _budget(budget)
    graceful = find_graceful_labeling(tree, limit)
    if graceful.found:
        return SearchOutcome(SearchStatus.FOUND, graceful_to_semigraceful(tree, graceful.labeling), graceful.expansions)
    remaining = limit - graceful.expansions
    if remaining < 1:
        return SearchOutcome(SearchStatus.BUDGET, None, graceful.expansions)
    logger.debug("graceful search %s for %s, falling back to direct search", graceful.status.value, list(tree.canonical_key))
    direct = _direct_semigraceful(tree, remaining)
    return SearchOutcome(direct.status, direct.labeling, graceful.expansions + direct.expansions)


FINDERS = {
    Convention.GRACEFUL: find_graceful_labeling,
    Convention.SEMIGRACEFUL: find_semigraceful_labeling,
}

PREDICATES = {
    Convention.GRACEFUL: is_graceful_labeling,
    Convention.SEMIGRACEFUL: is_semigraceful_labeling,
}


def labeling_to_pairs(labeling: VertexLabeling) -> List[str]:
    return [f"{v}:{label}" for v, label in enumerate(labeling.labels)]


def labeling_from_pairs(convention: Union[Convention, str], pairs: Iterable[str]) -> VertexLabeling:
    mapping = {}
    for item in pairs:
        try:
            vertex, label = (int(x) for x in str(item).split(":"))
        except ValueError:
            raise LabelingValidationError(f"labeling entry {item!r} is not 'vertex_id:label'")
        if vertex in mapping:
            raise LabelingValidationError(f"vertex {vertex} is labeled twice")
        mapping[vertex] = label
    return VertexLabeling.from_mapping(convention, mapping)


def to_canonical_layout(tree: Tree, labeling: VertexLabeling) -> VertexLabeling:
    """Re-index `labeling` of `tree` onto the vertices of tree_from_level_sequence(tree.canonical_key)."""
    _check_orders(tree, labeling)
    return VertexLabeling(labeling.convention, tuple(labeling.labels[v] for v in canonical_layout(tree)))


def from_canonical_layout(tree: Tree, labeling: VertexLabeling) -> VertexLabeling:
    _check_orders(tree, labeling)
    labels = [0] * tree.order
    for position, v in enumerate(canonical_layout(tree)):
        labels[v] = labeling.labels[position]
    return VertexLabeling(labeling.convention, tuple(labels))


def label_tree(tree: Tree, convention: Union[Convention, str], budget: Optional[int] = None, db: Optional[Session] = None) -> VertexLabeling:
    """One verified labeling for `tree`, or LabelingNotFound / SearchBudgetExhausted.

    Cached labelings are stored against the canonical layout, so every tree with the same
    canonical key shares one entry whatever its own vertex numbering.
    """
    convention = Convention(convention)
    predicate = PREDICATES[convention]
    key_text = ",".join(str(x) for x in tree.canonical_key)
    if db is not None:
        entry = find_cached_labeling(db, key_text, convention.value)
        if entry is not None:
            try:
                cached = labeling_from_pairs(convention, entry.labels.split())
                if cached.order == tree.order:
                    cached = from_canonical_layout(tree, cached)
                    if predicate(tree, cached):
                        increment_cache_hit(db, entry)
                        return cached
            except LabelingValidationError:
                pass
            logger.warning("discarding cached %s labeling for %s", convention.value, key_text)
            discard_labeling(db, entry)
    outcome = FINDERS[convention](tree, budget)
    if outcome.status is SearchStatus.BUDGET:
        raise SearchBudgetExhausted(tree.canonical_key, convention.value, outcome.expansions)
    if not outcome.found:
        raise LabelingNotFound(tree.canonical_key, convention.value, outcome.expansions)
    if not predicate(tree, outcome.labeling):
        # a search result must always satisfy its own predicate
        raise RuntimeError(f"search produced an invalid {convention.value} labeling for {key_text}")
    logger.debug("%s labeling for %s after %d expansions", convention.value, key_text, outcome.expansions)
    if db is not None:
        stored = to_canonical_layout(tree, outcome.labeling)
        store_labeling(db, key_text, convention.value, " ".join(labeling_to_pairs(stored)))
    return outcome.labeling


def label_catalog(
    catalog: TreeFamilyCatalog,
    convention: Union[Convention, str],
    budget: Optional[int] = None,
    db: Optional[Session] = None,
) -> Tuple[VertexLabeling, ...]:
    labelings = tuple(label_tree(tree, convention, budget, db) for tree in catalog.trees)
    logger.info("labeled all %d trees of order %d (%s)", catalog.count, catalog.order, Convention(convention).value)
    return labelings
