from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import product
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from treedecomp.config import settings
from treedecomp.errors import OrderRangeError, StructureError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
LevelSequence = Tuple[int, ...]

# OEIS A000055 (number of free trees), indexed by order
TREE_COUNTS: Dict[int, int] = {
    1: 1, 2: 1, 3: 1, 4: 2, 5: 3, 6: 6, 7: 11, 8: 23, 9: 47, 10: 106,
    11: 235, 12: 551, 13: 1301, 14: 3159, 15: 7741, 16: 19320, 17: 48629,
    18: 123867, 19: 317955, 20: 823065, 21: 2144505, 22: 5623756,
    23: 14828074, 24: 39299897, 25: 104636890,
}

PRUFER_ORACLE_MAX_ORDER = 9


def _adjacency(order: int, edges: Iterable[Edge]) -> List[List[int]]:
    adj: List[List[int]] = [[] for _ in range(order)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def _dfs_order(adj: Sequence[Sequence[int]], root: int) -> Tuple[List[int], List[int]]:
    parent = [-1] * len(adj)
    visit = []
    stack = [root]
    while stack:
        v = stack.pop()
        visit.append(v)
        for w in adj[v]:
            if w != parent[v]:
                parent[w] = v
                stack.append(w)
    return visit, parent


def _centroids(adj: Sequence[Sequence[int]]) -> List[int]:
    order = len(adj)
    visit, parent = _dfs_order(adj, 0)
    size = [1] * order
    for v in reversed(visit):
        if parent[v] >= 0:
            size[parent[v]] += size[v]
    heaviest = []
    for v in range(order):
        worst = order - size[v]
        for w in adj[v]:
            if w != parent[v] and size[w] > worst:
                worst = size[w]
        heaviest.append(worst)
    best = min(heaviest)
    return [v for v in range(order) if heaviest[v] == best]


def _subtree_sequences(adj: Sequence[Sequence[int]], root: int) -> Tuple[Dict[int, LevelSequence], List[int]]:
    visit, parent = _dfs_order(adj, root)
    seqs: Dict[int, LevelSequence] = {}
    for v in reversed(visit):
        children = sorted((seqs[w] for w in adj[v] if w != parent[v]), reverse=True)
        seqs[v] = (0,) + tuple(x + 1 for s in children for x in s)
    return seqs, parent


def _rooted_sequence(adj: Sequence[Sequence[int]], root: int) -> LevelSequence:
    """Lexicographically largest level sequence of the tree rooted at `root`."""
    return _subtree_sequences(adj, root)[0][root]


def compute_canonical_key(order: int, edges: Iterable[Edge]) -> LevelSequence:
    adj = _adjacency(order, edges)
    return min(_rooted_sequence(adj, c) for c in _centroids(adj))


@dataclass(frozen=True)
class Tree:
    """A free tree on vertex ids 0..order-1.

    Construction validates the edge list (p-1 distinct non-loop pairs, connected) and computes the
    centroid-rooted canonical level sequence once.
    """

    order: int
    edges: Tuple[Edge, ...]
    canonical_key: LevelSequence = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        order = self.order
        if not isinstance(order, int) or order < 1:
            raise StructureError(f"tree order must be a positive integer, got {order!r}")
        normalized: List[Edge] = []
        seen: Set[Edge] = set()
        for raw in self.edges:
            try:
                u, v = (int(x) for x in raw)
            except (TypeError, ValueError):
                raise StructureError(f"edge {raw!r} is not a vertex pair")
            if not (0 <= u < order and 0 <= v < order):
                raise StructureError(f"edge {raw!r} uses a vertex outside 0..{order - 1}")
            if u == v:
                raise StructureError(f"self-loop at vertex {u}")
            pair = (u, v) if u < v else (v, u)
            if pair in seen:
                raise StructureError(f"edge {pair} appears more than once")
            seen.add(pair)
            normalized.append(pair)
        if len(normalized) != order - 1:
            raise StructureError(f"a tree of order {order} has {order - 1} edges, got {len(normalized)}")
        adj = _adjacency(order, normalized)
        reached = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in reached:
                    reached.add(w)
                    queue.append(w)
        if len(reached) != order:
            # p-1 edges and disconnected means a cycle somewhere
            raise StructureError(f"edge list is disconnected (reaches {len(reached)} of {order} vertices)")
        object.__setattr__(self, "edges", tuple(normalized))
        object.__setattr__(self, "canonical_key", min(_rooted_sequence(adj, c) for c in _centroids(adj)))

    @cached_property
    def adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(sorted(n)) for n in _adjacency(self.order, self.edges))

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(len(n) for n in self.adjacency)

    @property
    def degree_sequence(self) -> Tuple[int, ...]:
        return tuple(sorted(self.degrees, reverse=True))

    def relabeled(self, permutation: Sequence[int]) -> "Tree":
        """Same tree with vertex v renamed to permutation[v]."""
        if sorted(permutation) != list(range(self.order)):
            raise StructureError("relabeling must be a permutation of the vertex ids")
        return Tree(self.order, tuple((permutation[u], permutation[v]) for u, v in self.edges))


@dataclass(frozen=True)
class TreeFamilyCatalog:
    order: int
    trees: Tuple[Tree, ...]

    @property
    def count(self) -> int:
        return len(self.trees)

    @cached_property
    def keys(self) -> Tuple[LevelSequence, ...]:
        return tuple(t.canonical_key for t in self.trees)

    def index_of(self, key: Sequence[int]) -> int:
        try:
            return self.keys.index(tuple(key))
        except ValueError:
            raise StructureError(f"no tree with canonical key {list(key)} in the order-{self.order} catalog")


def canonical_key(tree: Tree) -> LevelSequence:
    return tree.canonical_key


def trees_isomorphic(a: Tree, b: Tree) -> bool:
    return a.canonical_key == b.canonical_key


def canonical_layout(tree: Tree) -> Tuple[int, ...]:
    """layout[i] is the vertex of `tree` that sits at position i of its canonical key.

    Mapping vertex layout[i] to i turns `tree` into tree_from_level_sequence(tree.canonical_key).
    """
    adj = tree.adjacency
    for root in _centroids(adj):
        seqs, parent = _subtree_sequences(adj, root)
        if seqs[root] != tree.canonical_key:
            continue
        layout: List[int] = []
        stack = [root]
        while stack:
            v = stack.pop()
            layout.append(v)
            children = sorted((w for w in adj[v] if w != parent[v]), key=lambda w: seqs[w], reverse=True)
            stack.extend(reversed(children))
        return tuple(layout)
    raise StructureError(f"no centroid of the tree roots its canonical key {list(tree.canonical_key)}")


def tree_from_level_sequence(seq: Sequence[int]) -> Tree:
    """Rooted level sequence to a Tree; vertex i is position i of the sequence."""
    seq = tuple(int(x) for x in seq)
    if not seq or seq[0] != 0:
        raise StructureError("a level sequence starts with the root at level 0")
    last_at_level = [0]
    edges: List[Edge] = []
    for i in range(1, len(seq)):
        level = seq[i]
        if level < 1 or level > seq[i - 1] + 1:
            raise StructureError(f"level {level} at position {i} does not follow {seq[i - 1]}")
        edges.append((last_at_level[level - 1], i))
        del last_at_level[level:]
        last_at_level.append(i)
    return Tree(len(seq), tuple(edges))


def _check_order(p: int, max_order: Optional[int] = None) -> int:
    limit = settings.max_order if max_order is None else max_order
    if not isinstance(p, int) or p < 1 or p > limit:
        raise OrderRangeError(f"order must be in 1..{limit}, got {p!r}")
    return limit


def _join(children: Iterable[LevelSequence]) -> LevelSequence:
    ordered = sorted(children, reverse=True)
    return (0,) + tuple(x + 1 for s in ordered for x in s)


def _children_of(seq: LevelSequence) -> Tuple[LevelSequence, ...]:
    children: List[LevelSequence] = []
    start = None
    for i in range(1, len(seq)):
        if seq[i] == 1:
            if start is not None:
                children.append(tuple(x - 1 for x in seq[start:i]))
            start = i
    if start is not None:
        children.append(tuple(x - 1 for x in seq[start:]))
    return tuple(children)


@lru_cache(maxsize=None)
def _pool(max_size: int) -> Tuple[Tuple[LevelSequence, ...], Tuple[int, ...]]:
    # every rooted tree of order <= max_size, ordered by (order, sequence);
    # bound[s] counts the entries of order <= s
    pool: List[LevelSequence] = []
    bound = [0]
    for k in range(1, max_size + 1):
        pool.extend(rooted_trees(k))
        bound.append(len(pool))
    return tuple(pool), tuple(bound)


def _forests(pool: Sequence[LevelSequence], bound: Sequence[int], remaining: int, hi: int) -> Iterator[Tuple[LevelSequence, ...]]:
    # multisets of pool entries with total order `remaining`, indices non-increasing from hi
    if remaining == 0:
        yield ()
        return
    top = min(hi, bound[min(remaining, len(bound) - 1)] - 1)
    for i in range(top, -1, -1):
        head = pool[i]
        for rest in _forests(pool, bound, remaining - len(head), i):
            yield (head,) + rest


@lru_cache(maxsize=None)
def rooted_trees(k: int) -> Tuple[LevelSequence, ...]:
    """All rooted trees of order k as canonical level sequences, ascending."""
    if k < 1:
        raise OrderRangeError(f"rooted tree order must be positive, got {k}")
    if k == 1:
        return ((0,),)
    pool, bound = _pool(k - 1)
    return tuple(sorted(_join(children) for children in _forests(pool, bound, k - 1, len(pool) - 1)))


def iter_free_trees(p: int, max_order: Optional[int] = None) -> Iterator[LevelSequence]:
    """Stream one centroid-rooted level sequence per free tree of order p.

    Unicentroidal trees are a root with a multiset of rooted subtrees each of order < p/2.
    Bicentroidal trees (even p) are an unordered pair of rooted trees of order p/2 joined at their
    roots; the yielded sequence is rooted at the first of the pair and may not be the canonical key.
    """
    _check_order(p, max_order)
    half = (p - 1) // 2
    if half >= 1:
        pool, bound = _pool(half)
        for children in _forests(pool, bound, p - 1, len(pool) - 1):
            yield _join(children)
    elif p == 1:
        yield (0,)
    if p % 2 == 0:
        halves = rooted_trees(p // 2)
        for i, a in enumerate(halves):
            for b in halves[i:]:
                yield _join(_children_of(a) + (b,))


@lru_cache(maxsize=32)
def _catalog(p: int) -> TreeFamilyCatalog:
    trees = []
    for seq in iter_free_trees(p, max_order=p):
        tree = tree_from_level_sequence(seq)
        if tree.canonical_key != seq:
            tree = tree_from_level_sequence(tree.canonical_key)
        trees.append(tree)
    trees.sort(key=lambda t: t.canonical_key)
    logger.debug("enumerated %d free trees of order %d", len(trees), p)
    return TreeFamilyCatalog(order=p, trees=tuple(trees))


def enumerate_trees(p: int, max_order: Optional[int] = None) -> TreeFamilyCatalog:
    _check_order(p, max_order)
    return _catalog(p)


def tree_count(p: int, max_order: Optional[int] = None) -> int:
    limit = settings.max_order if max_order is None else max_order
    if isinstance(p, int) and 1 <= p <= limit:
        return sum(1 for _ in iter_free_trees(p, max_order=limit))
    if isinstance(p, int) and p in TREE_COUNTS:
        return TREE_COUNTS[p]
    raise OrderRangeError(f"order must be in 1..{limit} (or a fixture order up to {max(TREE_COUNTS)}), got {p!r}")


def prufer_oracle_keys(p: int) -> Set[LevelSequence]:
    """Canonical keys of all labeled trees of order p, decoded from every Prüfer sequence."""
    if p < 1 or p > PRUFER_ORACLE_MAX_ORDER:
        raise OrderRangeError(f"the Prüfer oracle covers orders 1..{PRUFER_ORACLE_MAX_ORDER}, got {p}")
    if p == 1:
        return {(0,)}
    if p == 2:
        return {(0, 1)}
    keys: Set[LevelSequence] = set()
    for code in product(range(p), repeat=p - 2):
        graph = nx.from_prufer_sequence(list(code))
        keys.add(compute_canonical_key(p, graph.edges()))
    return keys


def parse_edge_list(text: str) -> Tree:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise StructureError("empty edge list")
    try:
        order = int(lines[0])
        edges = [tuple(int(x) for x in ln.split()) for ln in lines[1:]]
    except ValueError as exc:
        raise StructureError(f"malformed edge list: {exc}")
    return Tree(order, tuple(edges))


def format_edge_list(tree: Tree) -> str:
    return "\n".join([str(tree.order)] + [f"{u} {v}" for u, v in tree.edges]) + "\n"


def load_edge_list(path: Union[str, Path]) -> Tree:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise StructureError(f"cannot read edge list {path}: {exc}")
    return parse_edge_list(text)
