"""
Rules API Endpoints
Move generation, perft and game status for any supported variant
"""
import asyncio
from typing import List

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from app.api.errors import http_error
from app.core.exceptions import LabError
from app.core.logging import get_logger
from app.notation.fen import STANDARD_START, parse_fen
from app.rules.movegen import legal_moves
from app.rules.perft import perft
from app.rules.position import repetition_key
from app.rules.status import GameState, TerminationReason, in_check, status
from app.rules.types import VariantId

logger = get_logger(__name__)

router = APIRouter()

MAX_PERFT_DEPTH = 4


# Request/Response Models
class PositionRequest(BaseModel):
    """A position in extended FEN under one variant"""
    fen: str = Field(STANDARD_START, description="Extended FEN", min_length=1)
    variant: VariantId = Field(VariantId.CLASSICAL, description="Rule set")


class PerftRequest(PositionRequest):
    depth: int = Field(..., description="Search depth in plies", ge=0, le=MAX_PERFT_DEPTH)


class PerftResponse(BaseModel):
    variant: VariantId
    depth: int
    nodes: int = Field(..., description="Leaf nodes at the given depth")


class MoveResponse(BaseModel):
    lan: str = Field(..., description="Long algebraic notation, e.g. e2e4 or b7b8q")
    flags: List[str] = Field(default_factory=list, description="Move flags")


class MovesResponse(BaseModel):
    variant: VariantId
    moves: List[MoveResponse]
    count: int


class StatusRequest(PositionRequest):
    history: List[str] = Field(
        default_factory=list,
        description="FENs of the earlier positions of the game, oldest first",
    )


class StatusResponse(BaseModel):
    state: GameState
    reason: TerminationReason
    in_check: bool


@router.post("/perft", response_model=PerftResponse)
async def count_nodes(request: PerftRequest):
    """
    Count the leaf nodes of the legal move tree.

    Example:
        POST /api/v1/rules/perft
        {"fen": "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1", "depth": 2}
    """
    try:
        position = parse_fen(request.fen, request.variant)
        nodes = await asyncio.to_thread(perft, position, request.depth)
    except LabError as exc:
        raise http_error(exc)
    logger.info("perft(%d) = %d for %s", request.depth, nodes, request.variant.value)
    return PerftResponse(variant=request.variant, depth=request.depth, nodes=nodes)


@router.post("/moves", response_model=MovesResponse)
async def list_moves(request: PositionRequest):
    """Legal moves of a position, sorted by LAN."""
    try:
        position = parse_fen(request.fen, request.variant)
    except LabError as exc:
        raise http_error(exc)
    moves = [MoveResponse(lan=m.lan, flags=m.flags.names) for m in legal_moves(position)]
    return MovesResponse(variant=request.variant, moves=moves, count=len(moves))


@router.post("/status", response_model=StatusResponse)
async def game_status(request: StatusRequest):
    """Game status of a position given the earlier positions of its game."""
    try:
        position = parse_fen(request.fen, request.variant)
        history = [repetition_key(parse_fen(fen, request.variant)) for fen in request.history]
        result = status(position, history)
    except LabError as exc:
        raise http_error(exc)
    except Exception as e:
        logger.exception("Unexpected error computing status")
        raise HTTPException(status_code=500, detail=f"Status error: {str(e)}")
    return StatusResponse(
        state=result.state, reason=result.reason, in_check=in_check(position)
    )
