from __future__ import annotations

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field


# Labelings
class LabelingModel(BaseModel):
    convention: Literal["graceful", "semigraceful"]
    labels: List[str]  # "vertex_id:label", sorted by vertex id


# Catalogs
class CatalogTreeModel(BaseModel):
    canonical_key: List[int]
    edges: List[Tuple[int, int]]


class CatalogDocument(BaseModel):
    format_version: Literal[1] = 1
    order: int = Field(ge=1)
    count: int = Field(ge=1)
    trees: List[CatalogTreeModel]


# Certificates
class MultigraphModel(BaseModel):
    order: int = Field(ge=2)
    multiplicity: int = Field(ge=1)


class CertificateTreeModel(BaseModel):
    canonical_key: List[int]
    base_labeling: LabelingModel


class CertificateDocument(BaseModel):
    format_version: Literal[1] = 1
    kind: Literal["rotation", "family"]
    multigraph: MultigraphModel
    catalog_order: int
    rotation_convention: Literal["label+r"] = "label+r"
    trees: List[CertificateTreeModel]


class PairDeficitModel(BaseModel):
    pair: Tuple[int, int]
    count: int
    expected: int


class VerificationReport(BaseModel):
    passed: bool
    order: int
    multiplicity: int
    embeddings: int
    problems: List[str] = Field(default_factory=list)
    deficits: List[PairDeficitModel] = Field(default_factory=list)


# Labeling stream events (newline-delimited JSON)
class LabelingEvent(BaseModel):
    event: Literal["start", "labeling", "end", "error"]
    order: Optional[int] = None
    mode: Optional[str] = None
    index: Optional[int] = None
    canonical_key: Optional[List[int]] = None
    labeling: Optional[LabelingModel] = None
    verified: Optional[bool] = None
    count: Optional[int] = None
    message: Optional[str] = None


# Feasibility
class FeasibilityRow(BaseModel):
    order: int
    tau: int
    gcd: int
    k_min: int
    m_min: int
    multigraph_edges: int
    family_edges: int
    coprime_case: bool
