"""
Game length histograms (plies), for all games and for decisive games only.
"""
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from app.schemas.game import GameRecord


@dataclass
class LengthView:
    buckets: dict[int, int] = field(default_factory=dict)
    count: int = 0
    mean: float = float("nan")
    median: float = float("nan")


@dataclass
class LengthHistogram:
    bucket_width: int
    all_games: LengthView
    decisive: LengthView


def _view(lengths: list[int], width: int) -> LengthView:
    if not lengths:
        return LengthView()
    counts = Counter((n // width) * width for n in lengths)
    return LengthView(
        buckets=dict(sorted(counts.items())),
        count=len(lengths),
        mean=float(np.mean(lengths)),
        median=float(np.median(lengths)),
    )


def game_length_histogram(games: Iterable[GameRecord], bucket_width: int) -> LengthHistogram:
    """Counts per ``[lo, lo + bucket_width)`` bucket of the number of plies."""
    if bucket_width < 1:
        raise ValueError("bucket_width must be >= 1")
    all_lengths: list[int] = []
    decisive_lengths: list[int] = []
    for game in games:
        all_lengths.append(game.plies)
        if game.decisive:
            decisive_lengths.append(game.plies)
    return LengthHistogram(
        bucket_width=bucket_width,
        all_games=_view(all_lengths, bucket_width),
        decisive=_view(decisive_lengths, bucket_width),
    )
