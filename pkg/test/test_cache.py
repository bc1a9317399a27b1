from __future__ import annotations

import pytest

from treedecomp.config import settings
from treedecomp.models.db_models import CachedLabeling
from treedecomp.services import labeling as labeling_module
from treedecomp.services.cache import find_cached_labeling, open_cache, store_labeling
from treedecomp.services.labeling import (
    Convention,
    is_graceful_labeling,
    is_semigraceful_labeling,
    label_tree,
    labeling_from_pairs,
)
from treedecomp.services.trees import enumerate_trees, tree_from_level_sequence

PATH5_KEY = "0,1,2,1,2"


@pytest.fixture
def cache(tmp_path):
    with open_cache(True, str(tmp_path / "labelings.sqlite")) as db:
        yield db


def _no_search(tree, budget=None):
    raise AssertionError("search ran despite a cached labeling")


def test_disabled_cache_yields_nothing():
    with open_cache(False) as db:
        assert db is None


def test_second_lookup_is_served_from_the_cache(cache, path5, monkeypatch):
    first = label_tree(path5, Convention.SEMIGRACEFUL, db=cache)
    entry = find_cached_labeling(cache, PATH5_KEY, "semigraceful")
    assert entry is not None
    assert entry.hit_count == 0

    monkeypatch.setitem(labeling_module.FINDERS, Convention.SEMIGRACEFUL, _no_search)
    assert label_tree(path5, Convention.SEMIGRACEFUL, db=cache) == first
    assert find_cached_labeling(cache, PATH5_KEY, "semigraceful").hit_count == 1


def test_conventions_are_cached_separately(cache, path5):
    label_tree(path5, Convention.GRACEFUL, db=cache)
    assert find_cached_labeling(cache, PATH5_KEY, "graceful") is not None
    assert find_cached_labeling(cache, PATH5_KEY, "semigraceful") is None


@pytest.mark.parametrize("stored", ["0:0 1:0", "0:0 1:1 2:2 3:3 4:4", "garbage"])
def test_invalid_entries_are_discarded(cache, path5, stored):
    store_labeling(cache, PATH5_KEY, "graceful", stored)
    labeling = label_tree(path5, Convention.GRACEFUL, db=cache)
    assert is_graceful_labeling(path5, labeling)
    entries = cache.query(CachedLabeling).filter(CachedLabeling.canonical_key == PATH5_KEY).all()
    assert [e.labels for e in entries] != [stored]
    assert len(entries) == 1


def test_cli_cache_flag_uses_the_configured_path(invoke, tmp_path, monkeypatch):
    path = tmp_path / "cli.sqlite"
    monkeypatch.setattr(settings, "sqlite_path", str(path))
    assert invoke("label", "--order", "5", "--mode", "graceful", "--cache").exit_code == 0
    assert path.exists()
    assert invoke("label", "--order", "5", "--mode", "graceful", "--cache").exit_code == 0


def test_isomorphic_layouts_share_one_entry(cache, path5, monkeypatch):
    catalog_p5 = enumerate_trees(5).trees[enumerate_trees(5).index_of((0, 1, 2, 1, 2))]
    assert catalog_p5.edges != path5.edges
    label_tree(path5, Convention.GRACEFUL, db=cache)

    monkeypatch.setitem(labeling_module.FINDERS, Convention.GRACEFUL, _no_search)
    discarded = []
    monkeypatch.setattr(labeling_module, "discard_labeling", lambda db, entry: discarded.append(entry))
    for tree in (catalog_p5, path5, catalog_p5):
        assert is_graceful_labeling(tree, label_tree(tree, Convention.GRACEFUL, db=cache))

    assert discarded == []
    entries = cache.query(CachedLabeling).filter(CachedLabeling.canonical_key == PATH5_KEY).all()
    assert len(entries) == 1
    assert entries[0].hit_count == 3


def test_entries_are_stored_in_the_canonical_layout(cache, path5):
    label_tree(path5, Convention.SEMIGRACEFUL, db=cache)
    entry = find_cached_labeling(cache, PATH5_KEY, "semigraceful")
    stored = labeling_from_pairs("semigraceful", entry.labels.split())
    assert is_semigraceful_labeling(tree_from_level_sequence((0, 1, 2, 1, 2)), stored)
