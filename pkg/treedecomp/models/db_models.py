from __future__ import annotations

import os
import uuid
from datetime import datetime
from functools import lru_cache
from typing import Iterator, Optional

from sqlalchemy import Column, DateTime, Integer, String, Text, create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import Session, declarative_base, sessionmaker

from treedecomp.config import settings

Base = declarative_base()


class CachedLabeling(Base):
    __tablename__ = "cached_labelings"

    id = Column(String(36), primary_key=True, default=lambda: str(uuid.uuid4()))
    canonical_key = Column(Text, index=True)
    convention = Column(String(16), index=True)  # graceful | semigraceful
    labels = Column(Text)  # "vertex_id:label" pairs separated by spaces
    created_at = Column(DateTime, default=datetime.utcnow)
    hit_count = Column(Integer, default=0)


@lru_cache(maxsize=None)
def _engine(path: str) -> Engine:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    return create_engine(f"sqlite:///{path}", connect_args={"check_same_thread": False})


def get_engine(sqlite_path: Optional[str] = None) -> Engine:
    return _engine(os.path.abspath(sqlite_path or settings.sqlite_path))


def init_local_db(sqlite_path: Optional[str] = None) -> sessionmaker:
    engine = get_engine(sqlite_path)
    Base.metadata.create_all(bind=engine)
    return sessionmaker(bind=engine, autocommit=False, autoflush=False)


def get_db_session(sqlite_path: Optional[str] = None) -> Iterator[Session]:
    SessionLocal = init_local_db(sqlite_path)
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()
