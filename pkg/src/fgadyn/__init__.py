"""Dynamics of free group automorphisms at desk scale.

Words, automorphisms and inverses live in :mod:`fgadyn.freegroup`; subgroup
graphs in :mod:`fgadyn.stallings`; growth, sinks, train-track data and
extension-group probes in the remaining modules.
"""
from .freegroup import (
    Automorphism, CyclicWord, EmptyImage, NotInvertible, RankMismatch, Word, apply, canonical,
    compose, cyclic_reduce, identity, invert, power, reduce,
)
from .stallings import (
    CoreGraph, SubgroupSystem, contains, fiber_subgroup, fold, is_malnormal, meet, pullback,
)
from .growth import GrowthConfig, atoroidal_probe, classify_growth, growth_partition
from .graphmap import bcc_upper_bound, critical_constant, filtration, rose_map
from .whitehead import is_primitive, minimize
from .sink import sink_approx, sinks_equal
from .extension import LiftAssignment, cayley_ball, hyperbolicity_stats, zz_search
from .session import SessionConfig, dumps_session, loads_session, parse_session
from ._kernel import CapExceeded

__version__ = "0.1.0"

__all__ = [
    "Automorphism", "CyclicWord", "EmptyImage", "NotInvertible", "RankMismatch", "Word", "apply",
    "canonical", "compose", "cyclic_reduce", "identity", "invert", "power", "reduce",
    "CoreGraph", "SubgroupSystem", "contains", "fiber_subgroup", "fold", "is_malnormal", "meet",
    "pullback", "GrowthConfig", "atoroidal_probe", "classify_growth", "growth_partition",
    "bcc_upper_bound", "critical_constant", "filtration", "rose_map", "is_primitive", "minimize",
    "sink_approx", "sinks_equal", "LiftAssignment", "cayley_ball", "hyperbolicity_stats",
    "zz_search", "SessionConfig", "dumps_session", "loads_session", "parse_session",
    "CapExceeded",
]
