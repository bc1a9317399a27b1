from __future__ import annotations

import random
from itertools import permutations

import pytest

from treedecomp.errors import DomainError, LabelingValidationError, SearchStatus
from treedecomp.services.labeling import (
    Convention,
    VertexLabeling,
    cyclic_distance,
    find_graceful_labeling,
    find_semigraceful_labeling,
    graceful_to_semigraceful,
    induced_edge_labels,
    is_graceful_labeling,
    is_semigraceful_labeling,
    labeling_from_pairs,
    labeling_to_pairs,
    search_order,
    twin_leaf_positions,
)
from treedecomp.services.trees import Tree, enumerate_trees, tree_from_level_sequence

G = Convention.GRACEFUL
S = Convention.SEMIGRACEFUL


def _rotate(n: int, r: int, x: int) -> int:
    return (x + r - 1) % n + 1


@pytest.mark.parametrize("n,s,t,expected", [(5, 2, 3, 1), (5, 1, 5, 1), (7, 2, 6, 3), (5, 4, 4, 0)])
def test_cyclic_distance_examples(n, s, t, expected):
    assert cyclic_distance(n, s, t) == expected


@pytest.mark.parametrize("n,s,t", [(5, 0, 3), (5, 6, 1), (5, 2, -1), (0, 1, 1)])
def test_cyclic_distance_rejects_out_of_range(n, s, t):
    with pytest.raises(DomainError):
        cyclic_distance(n, s, t)


def test_cyclic_distance_min_formula_and_symmetry():
    for n in range(1, 51):
        for s in range(1, n + 1):
            for t in range(1, n + 1):
                d = cyclic_distance(n, s, t)
                assert d == min(abs(s - t), n - abs(s - t))
                assert d == cyclic_distance(n, t, s)
                assert 0 <= d <= n // 2


def test_cyclic_distance_even_n_half_way():
    # both branches of the definition agree at |s-t| = n/2
    assert cyclic_distance(6, 1, 4) == 3


def test_cyclic_distance_rotation_invariance():
    rng = random.Random(1)
    for _ in range(2000):
        n = rng.randint(1, 50)
        s, t, r = rng.randint(1, n), rng.randint(1, n), rng.randint(0, n - 1)
        assert cyclic_distance(n, _rotate(n, r, s), _rotate(n, r, t)) == cyclic_distance(n, s, t)


def test_labeling_must_be_a_bijection():
    with pytest.raises(LabelingValidationError):
        VertexLabeling(S, (1, 1, 3))
    with pytest.raises(LabelingValidationError):
        VertexLabeling(G, (1, 2, 3))
    with pytest.raises(LabelingValidationError):
        VertexLabeling("harmonious", (0, 1))


def test_p5_witness_induced_labels(path5, p5_witness):
    assert sorted(induced_edge_labels(path5, p5_witness).values) == [1, 1, 2, 2]
    assert induced_edge_labels(path5, p5_witness).values == (1, 2, 2, 1)


def test_star_induced_labels(star5):
    labeling = VertexLabeling(S, (1, 2, 3, 4, 5))
    assert induced_edge_labels(star5, labeling).sorted_values() == (1, 1, 2, 2)


def test_p5_witness_is_semigraceful_but_not_graceful(path5, p5_witness):
    assert is_semigraceful_labeling(path5, p5_witness)
    shifted = VertexLabeling(G, tuple(x - 1 for x in p5_witness.labels))
    assert induced_edge_labels(path5, shifted).values == (1, 2, 3, 1)
    assert not is_graceful_labeling(path5, shifted)


def test_induced_labels_validate_order(path5):
    with pytest.raises(LabelingValidationError):
        induced_edge_labels(path5, VertexLabeling(S, (1, 2, 3)))


def test_graceful_predicate_examples(star5, path5):
    assert is_graceful_labeling(star5, VertexLabeling(G, (0, 1, 2, 3, 4)))
    assert not is_graceful_labeling(path5, VertexLabeling(G, (1, 2, 0, 3, 4)))
    assert is_graceful_labeling(Tree(2, ((0, 1),)), VertexLabeling(G, (0, 1)))


def test_graceful_predicate_rejects_convention_mismatch(star5):
    with pytest.raises(LabelingValidationError):
        is_graceful_labeling(star5, VertexLabeling(S, (1, 2, 3, 4, 5)))


def test_semigraceful_predicate_examples(path5, path3, star5):
    assert is_semigraceful_labeling(path3, VertexLabeling(S, (1, 2, 3)))
    assert not is_semigraceful_labeling(path5, VertexLabeling(S, (1, 2, 3, 4, 5)))
    assert is_semigraceful_labeling(star5, VertexLabeling(S, (3, 1, 2, 4, 5)))


def test_semigraceful_predicate_rejects_even_order_and_mismatch(path5):
    with pytest.raises(DomainError):
        is_semigraceful_labeling(Tree(4, ((0, 1), (1, 2), (2, 3))), VertexLabeling(S, (1, 2, 3, 4)))
    with pytest.raises(LabelingValidationError):
        is_semigraceful_labeling(path5, VertexLabeling(G, (0, 1, 2, 3, 4)))


def test_star_gets_centre_zero(star5):
    outcome = find_graceful_labeling(star5)
    assert outcome.status is SearchStatus.FOUND
    assert outcome.labeling.labels[0] == 0
    assert is_graceful_labeling(star5, outcome.labeling)


def test_chair_is_graceful():
    chair = Tree(5, ((0, 1), (0, 2), (0, 3), (3, 4)))
    assert chair.degree_sequence == (3, 2, 1, 1, 1)
    outcome = find_graceful_labeling(chair)
    assert outcome.found and is_graceful_labeling(chair, outcome.labeling)


@pytest.mark.parametrize("p", range(1, 11))
def test_every_small_tree_is_graceful(p):
    for tree in enumerate_trees(p).trees:
        outcome = find_graceful_labeling(tree)
        assert outcome.found, tree.canonical_key
        assert is_graceful_labeling(tree, outcome.labeling)


@pytest.mark.slow
@pytest.mark.parametrize("p", [11, 12, 13])
def test_every_tree_to_order_thirteen_is_graceful(p):
    for tree in enumerate_trees(p).trees:
        outcome = find_graceful_labeling(tree)
        assert outcome.found, tree.canonical_key
        assert is_graceful_labeling(tree, outcome.labeling)


def test_search_is_deterministic():
    for tree in enumerate_trees(8).trees:
        assert find_graceful_labeling(tree) == find_graceful_labeling(tree)


def test_budget_stop_is_distinct(path5):
    outcome = find_graceful_labeling(path5, budget=2)
    assert outcome.status is SearchStatus.BUDGET
    assert outcome.labeling is None
    outcome = find_semigraceful_labeling(path5, budget=2)
    assert outcome.status is SearchStatus.BUDGET


@pytest.mark.parametrize("budget", [1, 2, 5, 13, 40, 98])
def test_budget_is_never_overrun(budget):
    for p in (5, 7, 9):
        for tree in enumerate_trees(p).trees:
            for finder in (find_graceful_labeling, find_semigraceful_labeling):
                outcome = finder(tree, budget=budget)
                assert outcome.expansions <= budget, (finder.__name__, tree.canonical_key)
                if outcome.status is SearchStatus.BUDGET:
                    assert outcome.expansions == budget


def test_fallback_phase_only_gets_the_leftover_budget(monkeypatch):
    from treedecomp.services import labeling as labeling_module

    def spent_graceful(tree, budget=None):
        return labeling_module.SearchOutcome(SearchStatus.EXHAUSTED, None, budget - 3)

    monkeypatch.setattr(labeling_module, "find_graceful_labeling", spent_graceful)
    tree = enumerate_trees(9).trees[0]
    outcome = labeling_module.find_semigraceful_labeling(tree, budget=100)
    assert outcome.status is SearchStatus.BUDGET
    assert outcome.expansions == 100

    def all_spent(tree, budget=None):
        return labeling_module.SearchOutcome(SearchStatus.BUDGET, None, budget)

    monkeypatch.setattr(labeling_module, "find_graceful_labeling", all_spent)
    outcome = labeling_module.find_semigraceful_labeling(tree, budget=100)
    assert outcome.status is SearchStatus.BUDGET
    assert outcome.expansions == 100


def test_twin_leaves_are_chained(star5, path5):
    order, anchors = search_order(star5)
    assert twin_leaf_positions(star5, order, anchors) == [-1, -1, 1, 2, 3]
    order, anchors = search_order(path5)
    assert twin_leaf_positions(path5, order, anchors) == [-1] * 5


def test_graceful_first_label_stays_in_the_lower_half():
    for p in range(2, 10):
        for tree in enumerate_trees(p).trees:
            outcome = find_graceful_labeling(tree)
            first = search_order(tree)[0][0]
            assert outcome.labeling.labels[first] <= (p - 1) // 2


@pytest.mark.parametrize("p", [9, 11, 13])
def test_broom_is_labeled_quickly(p):
    # a path of two hanging off a star: many interchangeable leaves
    broom = tree_from_level_sequence((0, 1, 2) + (1,) * (p - 3))
    outcome = find_graceful_labeling(broom, budget=50_000)
    assert outcome.found
    assert is_graceful_labeling(broom, outcome.labeling)


def test_search_order_places_each_vertex_next_to_a_placed_one():
    for tree in enumerate_trees(9).trees:
        order, anchors = search_order(tree)
        assert sorted(order) == list(range(9))
        assert anchors[0] == -1
        assert order[0] == max(range(9), key=lambda v: (tree.degrees[v], -v))
        for i in range(1, 9):
            assert anchors[i] in order[:i]
            assert anchors[i] in tree.adjacency[order[i]]


def test_semigraceful_search_examples(path5, path3):
    for tree in (path5, path3):
        outcome = find_semigraceful_labeling(tree)
        assert outcome.found and is_semigraceful_labeling(tree, outcome.labeling)
    for tree in enumerate_trees(5).trees:
        outcome = find_semigraceful_labeling(tree)
        assert outcome.found and is_semigraceful_labeling(tree, outcome.labeling)


def test_semigraceful_search_rejects_even_order():
    with pytest.raises(DomainError):
        find_semigraceful_labeling(Tree(4, ((0, 1), (1, 2), (2, 3))))


def test_direct_semigraceful_search_finds_labelings(monkeypatch):
    # force the fallback path by making the graceful phase give up immediately
    from treedecomp.services import labeling as labeling_module

    def no_graceful(tree, budget=None):
        return labeling_module.SearchOutcome(SearchStatus.EXHAUSTED, None, 0)

    monkeypatch.setattr(labeling_module, "find_graceful_labeling", no_graceful)
    for p in (3, 5, 7, 9):
        for tree in enumerate_trees(p).trees:
            outcome = labeling_module.find_semigraceful_labeling(tree)
            assert outcome.found, tree.canonical_key
            assert outcome.labeling.labels[search_order(tree)[0][0]] == 1
            assert is_semigraceful_labeling(tree, outcome.labeling)


def test_shift_conversion_examples(star5, path3):
    converted = graceful_to_semigraceful(star5, VertexLabeling(G, (0, 1, 2, 3, 4)))
    assert converted.labels == (1, 2, 3, 4, 5)
    assert induced_edge_labels(star5, converted).sorted_values() == (1, 1, 2, 2)

    converted = graceful_to_semigraceful(path3, VertexLabeling(G, (1, 0, 2)))
    assert converted.labels == (2, 1, 3)
    assert induced_edge_labels(path3, converted).sorted_values() == (1, 1)

    with pytest.raises(LabelingValidationError):
        graceful_to_semigraceful(path3, VertexLabeling(G, (0, 1, 2)))
    with pytest.raises(DomainError):
        graceful_to_semigraceful(Tree(2, ((0, 1),)), VertexLabeling(G, (0, 1)))


@pytest.mark.parametrize("p", [1, 3, 5, 7, 9, pytest.param(11, marks=pytest.mark.slow)])
def test_shift_conversion_on_every_found_labeling(p):
    for tree in enumerate_trees(p).trees:
        outcome = find_graceful_labeling(tree)
        assert outcome.found
        assert is_semigraceful_labeling(tree, graceful_to_semigraceful(tree, outcome.labeling))


def test_order_five_search_agrees_with_brute_force():
    for tree in enumerate_trees(5).trees:
        graceful_exists = any(is_graceful_labeling(tree, VertexLabeling(G, perm)) for perm in permutations(range(5)))
        semigraceful_exists = any(
            is_semigraceful_labeling(tree, VertexLabeling(S, perm)) for perm in permutations(range(1, 6))
        )
        assert find_graceful_labeling(tree).found == graceful_exists
        assert find_semigraceful_labeling(tree).found == semigraceful_exists


def test_pair_codec(p5_witness):
    pairs = labeling_to_pairs(p5_witness)
    assert pairs == ["0:2", "1:3", "2:1", "3:4", "4:5"]
    assert labeling_from_pairs("semigraceful", reversed(pairs)) == p5_witness
    with pytest.raises(LabelingValidationError):
        labeling_from_pairs("semigraceful", ["0:1", "0:2"])
    with pytest.raises(LabelingValidationError):
        labeling_from_pairs("semigraceful", ["0-1"])
