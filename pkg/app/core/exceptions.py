"""
Error hierarchy for the laboratory.

Every error raised on bad input data derives from LabError. The CLI turns these
into exit code 2 and the HTTP layer into 4xx responses.
"""


class LabError(Exception):
    """Base class for data errors."""

    exit_code = 2


# ----- rules -----


class IllegalMoveError(LabError):
    def __init__(self, move: str, fen: str, ply: int | None = None) -> None:
        message = f"Illegal move '{move}' in position '{fen}'"
        if ply is not None:
            message = f"Ply {ply}: {message}"
        super().__init__(message)
        self.move = move
        self.fen = fen
        self.ply = ply


# ----- engine -----


class NoLegalMovesError(LabError):
    def __init__(self, fen: str) -> None:
        super().__init__(f"Position '{fen}' is terminal; nothing to search")
        self.fen = fen


class BadStartError(LabError):
    pass


# ----- stats -----


class UnfinishedGameError(LabError):
    pass


class SupportViolationError(LabError):
    """q gives zero probability (or no legal support) to a move sampled from p."""

    def __init__(self, fen: str, move: str, detail: str = "") -> None:
        message = f"Support violation at '{fen}' for move '{move}'"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
        self.fen = fen
        self.move = move


class SupportMismatchError(LabError):
    pass


class DegenerateDataError(LabError):
    pass


class NonPositivePawnError(LabError):
    def __init__(self, weights: list[float]) -> None:
        super().__init__(
            f"Fitted pawn weight {weights[1]:.6g} is not positive; "
            f"raw weights {[round(w, 6) for w in weights]}"
        )
        self.weights = weights


# ----- notation -----


class FenSyntaxError(LabError):
    pass


class IllegalPositionError(LabError):
    pass


class VariantMismatchError(LabError):
    pass


class RecordIOError(LabError):
    pass
