"""
Game record schema: one self-play (or transcribed) game, the unit every
statistic consumes. Stored one record per line in ``games.jsonl``.
"""
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.rules.status import GameState, TerminationReason
from app.rules.types import VariantId

RECORD_VERSION = 1


class MoveEntry(BaseModel):
    """A played move in LAN with the flags it carried."""

    model_config = ConfigDict(frozen=True)

    lan: str = Field(..., description="Long algebraic notation", examples=["e2e4"])
    flags: list[str] = Field(default_factory=list, description="Move flags, e.g. ['capture']")


class GameResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    state: GameState
    reason: TerminationReason = TerminationReason.NONE


class PlyInfo(BaseModel):
    """Search statistics of one ply."""

    model_config = ConfigDict(frozen=True)

    visits: dict[str, int] = Field(..., description="Root visit count per LAN move")
    chosen_by: Literal["softmax", "argmax"]


class GameRecord(BaseModel):
    """One finished (or capped) game."""

    version: int = RECORD_VERSION
    variant: VariantId
    start_fen: str
    moves: list[MoveEntry] = Field(default_factory=list)
    result: GameResult
    capped: bool = Field(False, description="Stopped at the ply cap and scored as a draw")
    per_ply: Optional[list[PlyInfo]] = None
    seed: int = 0
    opening: Optional[str] = Field(None, description="Name of the fixed opening, if any")

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "version": 1,
                "variant": "torpedo",
                "start_fen": "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1 variant=torpedo",
                "moves": [{"lan": "e2e4", "flags": ["double_push"]}],
                "result": {"state": "draw", "reason": "none"},
                "capped": True,
                "per_ply": None,
                "seed": 7,
            }
        }
    )

    @model_validator(mode="after")
    def _per_ply_matches_moves(self) -> "GameRecord":
        if self.per_ply is not None and len(self.per_ply) != len(self.moves):
            raise ValueError(
                f"per_ply has {len(self.per_ply)} entries for {len(self.moves)} moves"
            )
        return self

    @property
    def plies(self) -> int:
        return len(self.moves)

    @property
    def finished(self) -> bool:
        return self.result.state is not GameState.ONGOING

    @property
    def decisive(self) -> bool:
        return self.result.state in (GameState.WHITE_WINS, GameState.BLACK_WINS)
