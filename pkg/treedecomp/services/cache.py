from __future__ import annotations

from contextlib import contextmanager
from typing import Iterator, Optional

from sqlalchemy.orm import Session

from treedecomp.models.db_models import CachedLabeling, get_db_session


def find_cached_labeling(db: Session, canonical_key: str, convention: str) -> Optional[CachedLabeling]:
    return (
        db.query(CachedLabeling)
        .filter(CachedLabeling.canonical_key == canonical_key, CachedLabeling.convention == convention)
        .order_by(CachedLabeling.created_at.asc())
        .first()
    )


def store_labeling(db: Session, canonical_key: str, convention: str, labels: str) -> CachedLabeling:
    entry = CachedLabeling(
        canonical_key=canonical_key,
        convention=convention,
        labels=labels,
        hit_count=0,
    )
    db.add(entry)
    db.commit()
    db.refresh(entry)
    return entry


def increment_cache_hit(db: Session, entry: CachedLabeling) -> None:
    entry.hit_count = (entry.hit_count or 0) + 1
    db.add(entry)
    db.commit()


def discard_labeling(db: Session, entry: CachedLabeling) -> None:
    db.delete(entry)
    db.commit()


@contextmanager
def open_cache(enabled: bool, sqlite_path: Optional[str] = None) -> Iterator[Optional[Session]]:
    """A cache session when enabled, otherwise None so callers search every tree afresh."""
    if not enabled:
        yield None
        return
    sessions = get_db_session(sqlite_path)
    db = next(sessions)
    try:
        yield db
    finally:
        sessions.close()
