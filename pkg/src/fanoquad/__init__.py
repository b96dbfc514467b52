"""Exact classification engine for canonical Fano intrinsic quadrics of
dimension three and Picard number one."""
from __future__ import annotations

__version__ = "0.1.0"

from .classification import ClassRecord, ClassificationResult, admissible_normal_form, classify_all, graded_iso_test
from .quadric_rings import Format, GradedRing, PMatrix, grading, parse_pmatrix, validate_p
from .variety_model import anticanonical_degree, compute_invariants, hilbert_oracle

__all__ = [
    "ClassRecord",
    "ClassificationResult",
    "Format",
    "GradedRing",
    "PMatrix",
    "admissible_normal_form",
    "anticanonical_degree",
    "classify_all",
    "compute_invariants",
    "graded_iso_test",
    "grading",
    "hilbert_oracle",
    "parse_pmatrix",
    "validate_p",
]
