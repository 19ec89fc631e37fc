from app.schemas.game import GameRecord, GameResult, MoveEntry, PlyInfo

__all__ = ["GameRecord", "GameResult", "MoveEntry", "PlyInfo"]
