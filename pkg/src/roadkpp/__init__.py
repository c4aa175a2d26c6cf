"""Spreading speeds for a Fisher-KPP strip coupled to a fast-diffusion road."""

from .model import (
    LOGISTIC,
    REMARK33,
    InvalidParameterError,
    NumericalError,
    Params,
    Reaction,
    RegimeError,
    c_kpp,
    get_reaction,
    persistence_margin,
)
from .speed import SpeedResult, compute_c_star, regions_intersect
from .steady import solve_steady_states, time_map

__all__ = [
    "LOGISTIC", "REMARK33", "InvalidParameterError", "NumericalError", "Params", "Reaction", "RegimeError",
    "SpeedResult", "c_kpp", "compute_c_star", "get_reaction", "persistence_margin", "regions_intersect",
    "solve_steady_states", "time_map",
]
