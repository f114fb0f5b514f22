"""Exact permutation-group and finite-field tools for checking orbit-size
bounds of nilpotent subgroups of solvable primitive and linear groups."""

from nilorbit.perm import CycleStats, Permutation, cycle_stats
from nilorbit.group import (
    GroupFlags,
    PermutationGroup,
    build_group,
    classify,
    order_profile,
    orbit_partition,
)

__all__ = [
    "CycleStats",
    "GroupFlags",
    "Permutation",
    "PermutationGroup",
    "build_group",
    "classify",
    "cycle_stats",
    "order_profile",
    "orbit_partition",
]

__version__ = "0.1.0"
