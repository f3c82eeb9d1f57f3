"""Stable and popular matchings for hospitals/residents with laminar class quotas."""

from .errors import LCSMError
from .generator import GeneratorConfig, generate
from .model import (
    Instance,
    Matching,
    blocking_pairs,
    is_feasible_matching,
    is_stable,
    make_instance,
)
from .popularity import check_characterization, decompose, delta, find_correspondence
from .solvers import max_cardinality_popular, popular_among_max_cardinality
from .stable import solve_stable

__all__ = [
    "GeneratorConfig",
    "Instance",
    "LCSMError",
    "Matching",
    "blocking_pairs",
    "check_characterization",
    "decompose",
    "delta",
    "find_correspondence",
    "generate",
    "is_feasible_matching",
    "is_stable",
    "make_instance",
    "max_cardinality_popular",
    "popular_among_max_cardinality",
    "solve_stable",
]
