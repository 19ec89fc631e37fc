from app.stats.candidates import (
    AdditionalCandidatesCurve,
    additional_candidates,
    candidate_counts,
    combined_prior,
)
from app.stats.divergence import KlEstimate, exact_kl_divergence, kl_divergence
from app.stats.diversity import (
    DiversityCurve,
    diversity_curve,
    entropy,
    exact_diversity,
    position_entropy,
)
from app.stats.lengths import LengthHistogram, game_length_histogram
from app.stats.material import PieceValueModel, fit_piece_values
from app.stats.outcomes import (
    OutcomeCounts,
    count_outcomes,
    draw_rate_comparison,
    empirical_expected_score,
    expected_score_comparison,
    posterior_summary,
)
from app.stats.trees import BranchingTree, ChessTree, MoveTree
from app.stats.utilization import UtilizationReport, special_move_utilization

__all__ = [
    "AdditionalCandidatesCurve",
    "BranchingTree",
    "ChessTree",
    "DiversityCurve",
    "KlEstimate",
    "LengthHistogram",
    "MoveTree",
    "OutcomeCounts",
    "PieceValueModel",
    "UtilizationReport",
    "additional_candidates",
    "candidate_counts",
    "combined_prior",
    "count_outcomes",
    "diversity_curve",
    "draw_rate_comparison",
    "empirical_expected_score",
    "entropy",
    "exact_diversity",
    "exact_kl_divergence",
    "expected_score_comparison",
    "fit_piece_values",
    "game_length_histogram",
    "kl_divergence",
    "position_entropy",
    "posterior_summary",
    "special_move_utilization",
]
