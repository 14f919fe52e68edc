"""Clustering colored points under diversity constraints.

Every cluster must hold at least ``l`` points of pairwise distinct colors; the
objective is the largest cluster radius.  The package provides a
2-approximation for the general problem, an exact solver for two colors, an
approximation that discards the minimum number of outliers, exponential-time
oracles for small instances, instance generators and an l-diverse microdata
anonymizer.
"""
from ._accel import backend
from .diversity import check_feasible, solve
from .errors import (
    DivClustError,
    InfeasibleInstance,
    InstanceError,
    InvariantViolation,
    MoreThanTwoColors,
    TooLarge,
    UnequalClassSizes,
)
from .generators import gadget_from_3dm, random_3dm, random_euclidean
from .instance import (
    Cluster,
    Clustering,
    Evaluation,
    Instance,
    evaluate,
    load_instance,
    read_instance,
    threshold_graph,
)
from .oracle import exact_solve, exact_solve_outliers
from .outliers import outlier_plan, solve_with_outliers
from .twocolor import solve_two_color

__all__ = [
    "Cluster",
    "Clustering",
    "DivClustError",
    "Evaluation",
    "InfeasibleInstance",
    "Instance",
    "InstanceError",
    "InvariantViolation",
    "MoreThanTwoColors",
    "TooLarge",
    "UnequalClassSizes",
    "backend",
    "check_feasible",
    "evaluate",
    "exact_solve",
    "exact_solve_outliers",
    "gadget_from_3dm",
    "load_instance",
    "outlier_plan",
    "random_3dm",
    "random_euclidean",
    "read_instance",
    "solve",
    "solve_two_color",
    "solve_with_outliers",
    "threshold_graph",
]
__version__ = "0.1.0"
