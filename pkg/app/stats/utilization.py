"""
How often games use the special moves of their variant.
"""
from collections.abc import Iterable
from dataclasses import dataclass, field

from tqdm import tqdm

from app.core.logging import get_logger
from app.notation.records import replay_game
from app.rules.position import Position
from app.rules.status import TerminationReason
from app.rules.types import Move, MoveFlag, PieceKind
from app.schemas.game import GameRecord

logger = get_logger(__name__)

_CAPTURED_KINDS = (
    PieceKind.PAWN,
    PieceKind.KNIGHT,
    PieceKind.BISHOP,
    PieceKind.ROOK,
    PieceKind.QUEEN,
)

FEATURES = (
    "torpedo",
    "torpedo_promotion",
    "backward",
    "lateral",
    "self_capture",
    *(f"self_capture_{kind.name.lower()}" for kind in _CAPTURED_KINDS),
    "en_passant",
    "castling",
)


def move_features(position: Position, move: Move) -> list[str]:
    """Special-move features of ``move`` played in ``position``."""
    flags = move.flags
    found = []
    if MoveFlag.DOUBLE_PUSH in flags:
        if position.side.relative_rank(move.from_sq >> 3) != 1:
            found.append("torpedo")
        if move.promotion is not None:
            found.append("torpedo_promotion")
    if MoveFlag.BACKWARD in flags:
        found.append("backward")
    if MoveFlag.LATERAL in flags:
        found.append("lateral")
    if MoveFlag.SELF_CAPTURE in flags:
        found.append("self_capture")
        captured = position.board[move.to_sq]
        if captured is not None:
            found.append(f"self_capture_{captured.kind.name.lower()}")
    if MoveFlag.EN_PASSANT in flags:
        found.append("en_passant")
    if flags & (MoveFlag.CASTLE_SHORT | MoveFlag.CASTLE_LONG):
        found.append("castling")
    return found


@dataclass
class FeatureUsage:
    feature: str
    games_with: int = 0
    moves: int = 0


@dataclass
class UtilizationReport:
    n_games: int = 0
    n_moves: int = 0
    decisive_games: int = 0
    decisive_by_stalemate: int = 0
    features: dict[str, FeatureUsage] = field(
        default_factory=lambda: {name: FeatureUsage(name) for name in FEATURES}
    )

    @property
    def empty(self) -> bool:
        return self.n_games == 0

    def game_fraction(self, feature: str) -> float:
        return self.features[feature].games_with / self.n_games if self.n_games else 0.0

    def move_fraction(self, feature: str) -> float:
        return self.features[feature].moves / self.n_moves if self.n_moves else 0.0

    @property
    def stalemate_fraction(self) -> float:
        """Share of decisive games that ended in stalemate."""
        return self.decisive_by_stalemate / self.decisive_games if self.decisive_games else 0.0


def special_move_utilization(
    games: Iterable[GameRecord], progress: bool = False
) -> UtilizationReport:
    """Count special moves per game and per ply over a game set."""
    report = UtilizationReport()
    for game in tqdm(games, desc="utilization", unit="game", disable=not progress):
        replay = replay_game(game)
        report.n_games += 1
        report.n_moves += len(replay.moves)
        if game.decisive:
            report.decisive_games += 1
            if game.result.reason is TerminationReason.STALEMATE:
                report.decisive_by_stalemate += 1

        seen: set[str] = set()
        for position, move in zip(replay.positions, replay.moves):
            for feature in move_features(position, move):
                report.features[feature].moves += 1
                seen.add(feature)
        for feature in seen:
            report.features[feature].games_with += 1
    logger.debug("Utilization over %d game(s), %d move(s)", report.n_games, report.n_moves)
    return report
