"""
Stats API Endpoints
Outcome posteriors and combined-prior candidate counts
"""
import asyncio
from typing import List, Optional

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from app.api.errors import http_error
from app.config import settings
from app.core.exceptions import LabError
from app.core.logging import get_logger
from app.stats.candidates import candidate_counts, combined_prior
from app.stats.outcomes import (
    OutcomeCounts,
    draw_rate_comparison,
    empirical_expected_score,
    expected_score_comparison,
)

logger = get_logger(__name__)

router = APIRouter()


class OutcomeTriple(BaseModel):
    """Game results from White's point of view"""
    n_win: int = Field(..., ge=0)
    n_draw: int = Field(..., ge=0)
    n_lose: int = Field(..., ge=0)

    def counts(self) -> OutcomeCounts:
        return OutcomeCounts(self.n_win, self.n_draw, self.n_lose)


class OutcomesRequest(BaseModel):
    a: OutcomeTriple = Field(..., description="Results of game set A")
    b: OutcomeTriple = Field(..., description="Results of game set B")
    samples: int = Field(
        default_factory=lambda: settings.posterior_samples,
        description="Posterior draws",
        ge=1,
        le=10_000_000,
    )
    seed: int = Field(0, ge=0)

    model_config = {
        "json_schema_extra": {
            "example": {
                "a": {"n_win": 5, "n_draw": 90, "n_lose": 5},
                "b": {"n_win": 10, "n_draw": 80, "n_lose": 10},
                "samples": 100000,
                "seed": 0,
            }
        }
    }


class OutcomesResponse(BaseModel):
    lower_draw_rate: float = Field(..., description="P(draw rate of A < draw rate of B)")
    higher_expected_score: float = Field(
        ..., description="P(White's expected score under A > under B)"
    )
    empirical_score_a: Optional[float] = None
    empirical_score_b: Optional[float] = None


class CombinedPriorRequest(BaseModel):
    p: List[float] = Field(..., min_length=1, description="Distribution of player P")
    q: List[float] = Field(..., min_length=1, description="Distribution of player Q")


class CombinedPriorResponse(BaseModel):
    r: List[float]
    m_p: float
    m_q: float
    m_r: float
    additional: float = Field(..., description="m_r - m_q")


def _empirical(counts: OutcomeCounts) -> Optional[float]:
    return empirical_expected_score(counts) if counts.n else None


@router.post("/outcomes", response_model=OutcomesResponse)
async def compare_outcomes(request: OutcomesRequest):
    """Compare two game sets through their Dirichlet posteriors."""
    a, b = request.a.counts(), request.b.counts()
    try:
        lower_draw = await asyncio.to_thread(
            draw_rate_comparison, a, b, request.samples, request.seed
        )
        higher_score = await asyncio.to_thread(
            expected_score_comparison, a, b, request.samples, request.seed
        )
    except LabError as exc:
        raise http_error(exc)
    return OutcomesResponse(
        lower_draw_rate=lower_draw,
        higher_expected_score=higher_score,
        empirical_score_a=_empirical(a),
        empirical_score_b=_empirical(b),
    )


@router.post("/combined-prior", response_model=CombinedPriorResponse)
async def combine_priors(request: CombinedPriorRequest):
    """Normalised elementwise maximum of p and q with its candidate counts."""
    try:
        r = combined_prior(request.p, request.q)
        counts = candidate_counts(request.p, request.q)
    except LabError as exc:
        raise http_error(exc)
    except ValueError as e:
        raise HTTPException(status_code=422, detail=str(e))
    return CombinedPriorResponse(
        r=[float(x) for x in r],
        m_p=counts.m_p,
        m_q=counts.m_q,
        m_r=counts.m_r,
        additional=counts.additional,
    )
