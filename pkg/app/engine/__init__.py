from app.engine.priors import (
    Evaluation,
    MaterialPrior,
    PriorProvider,
    UniformPrior,
    material_prior,
    prior_from_name,
    uniform_prior,
)
from app.engine.search import SearchConfig, SearchResult, search
from app.engine.selfplay import game_seed, generate_set, play_game

__all__ = [
    "Evaluation",
    "MaterialPrior",
    "PriorProvider",
    "SearchConfig",
    "SearchResult",
    "UniformPrior",
    "game_seed",
    "generate_set",
    "material_prior",
    "play_game",
    "prior_from_name",
    "search",
    "uniform_prior",
]
