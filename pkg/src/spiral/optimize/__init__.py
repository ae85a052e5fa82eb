"""Solvers and sequence search: constrained NLP, bi-objective evolution, Pareto tools."""

from .moea import MoeaOptions, MoeaResult, evolve
from .nlp import NlpOptions, NlpProblem, NlpResult, minimize_constrained
from .pareto import ParetoArchive, ParetoFront, Ranking, conv_rank, hypervolume_2d, non_dominated_mask

__all__ = [
    "MoeaOptions", "MoeaResult", "evolve",
    "NlpOptions", "NlpProblem", "NlpResult", "minimize_constrained",
    "ParetoArchive", "ParetoFront", "Ranking", "conv_rank", "hypervolume_2d", "non_dominated_mask",
]
