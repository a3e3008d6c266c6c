"""Course document ingestion: extract draft specifications, confirm them."""

from provost.ingest.extractor import GrammarExtractor, extract_specification
from provost.ingest.model import (
    CLO,
    BloomLevel,
    CourseSpecification,
    DraftSpecification,
    Finding,
    SpecStatus,
)
from provost.ingest.review import confirm_draft, validate_draft

__all__ = [
    "CLO",
    "BloomLevel",
    "CourseSpecification",
    "DraftSpecification",
    "Finding",
    "GrammarExtractor",
    "SpecStatus",
    "confirm_draft",
    "extract_specification",
    "validate_draft",
]
