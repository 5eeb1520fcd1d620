"""Baseline schemes as restrictions of the rate-splitting program.

NRS fixes theta to 1, MULP also drops the common stream, and CNOMA drops private
stream 2 so that the common stream carries all of U2's message. Each runs through
the same SCA machinery with a different :class:`SchemeShape`.
"""

from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from ..channel.model import ChannelSet, PowerBudget
from ..optimize.cases import (
    CNOMA_SHAPE,
    CRS_SHAPE,
    MULP_SHAPE,
    NRS_SHAPE,
    CaseId,
    ScaIterate,
    SchemeShape,
    classify_case,
)
from ..utils.exceptions import CaseInfeasibleError, ValidationError
from ..utils.logging import get_logger
from .driver import ScaConfig, Solution, solve_ssr, warm_start_iterate

logger = get_logger(__name__)


class SchemeId(str, Enum):
    CRS = "CRS"
    NRS = "NRS"
    MULP = "MULP"
    CNOMA = "CNOMA"

    @property
    def shape(self) -> SchemeShape:
        return {
            SchemeId.CRS: CRS_SHAPE,
            SchemeId.NRS: NRS_SHAPE,
            SchemeId.MULP: MULP_SHAPE,
            SchemeId.CNOMA: CNOMA_SHAPE,
        }[self]

    @classmethod
    def parse(cls, text: str) -> "SchemeId":
        key = text.strip().upper().replace("-", "").replace("_", "")
        try:
            return cls(key)
        except ValueError as e:
            choices = ", ".join(s.value for s in cls)
            raise ValidationError(f"Unknown scheme {text!r} (expected one of {choices})") from e


SCHEME_ORDER = (SchemeId.CRS, SchemeId.NRS, SchemeId.MULP, SchemeId.CNOMA)


def solve_scheme(
    scheme: SchemeId,
    cs: ChannelSet,
    pb: PowerBudget,
    cfg: Optional[ScaConfig] = None,
    warm: Optional[Sequence[Solution]] = None,
) -> Solution:
    """Solve one scheme; only CRS accepts baseline warm starts."""
    if warm and scheme is not SchemeId.CRS:
        logger.debug(f"{scheme.value}: ignoring {len(warm)} warm start(s)")
        warm = None
    starts = crs_warm_starts(warm, cfg) if warm else None
    return solve_ssr(cs, pb, cfg, starts, shape=scheme.shape)


def map_to_crs_iterate(
    scheme: SchemeId,
    sol: Solution,
    cfg: Optional[ScaConfig] = None,
    case: Optional[CaseId] = None,
) -> ScaIterate:
    """Embed a baseline solution in the full CRS variable space.

    ``case`` defaults to the one the design's own rates fall in. Streams the
    baseline left empty get a faint power floor outside the eavesdropper's view and
    theta is pulled below 1, so every auxiliary is positive and the iterate can
    start a CRS subproblem. Raises CaseInfeasibleError when the floored design
    misses the case signs.
    """
    if sol.scheme != scheme.value:
        raise ValidationError(f"solution belongs to {sol.scheme}, not {scheme.value}")
    if case is None:
        case = classify_case(sol.design, sol.channel, sol.budget)
    it = warm_start_iterate(case, sol.design, sol.channel, sol.budget, cfg, shape=CRS_SHAPE)
    if it is None:
        raise CaseInfeasibleError(f"{scheme.value} solution cannot start CRS {case.label}")
    return it


def crs_warm_starts(
    warm: Sequence[Solution], cfg: Optional[ScaConfig] = None
) -> Dict[CaseId, List[Tuple[str, ScaIterate]]]:
    """CRS starts per case from every baseline solution that maps into it."""
    starts: Dict[CaseId, List[Tuple[str, ScaIterate]]] = {case: [] for case in CaseId}
    for sol in warm:
        scheme = SchemeId.parse(sol.scheme)
        for case in CaseId:
            try:
                starts[case].append((scheme.value, map_to_crs_iterate(scheme, sol, cfg, case)))
            except CaseInfeasibleError as e:
                logger.debug(str(e))
    return starts
