"""Convex programs, surrogate bounds and the per-case SCA subproblems."""

from .cases import (
    CNOMA_SHAPE,
    CRS_SHAPE,
    MULP_SHAPE,
    NRS_SHAPE,
    CaseId,
    ScaIterate,
    SchemeShape,
    assemble,
    classify_case,
)
from .program import ConvexProgram, VariableLayout

__all__ = [
    "CNOMA_SHAPE",
    "CRS_SHAPE",
    "MULP_SHAPE",
    "NRS_SHAPE",
    "CaseId",
    "ConvexProgram",
    "ScaIterate",
    "SchemeShape",
    "VariableLayout",
    "assemble",
    "classify_case",
]
