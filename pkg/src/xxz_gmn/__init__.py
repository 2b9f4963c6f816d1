"""Genuine multipartite nonlocality and entanglement in ferromagnetic XXZ rings."""

from .bell_violation import (
    AnalyticTarget,
    MeasurementAngles,
    OptimizerConfig,
    ViolationResult,
    analytic_w,
    expectation,
    maximize,
)
from .concurrence import Bipartition, enumerate_bipartitions, gme_concurrence, reduced_purity
from .eigensolver import GroundState, PureState, dicke_state, global_ground, locate_boundary, sector_boundaries
from .hamiltonian import ChainParams, build_full, build_sector
from .sector_basis import DomainError, SectorBasis, enumerate_sector, neighbor_pairs, rank

__all__ = [
    "AnalyticTarget",
    "Bipartition",
    "ChainParams",
    "DomainError",
    "GroundState",
    "MeasurementAngles",
    "OptimizerConfig",
    "PureState",
    "SectorBasis",
    "ViolationResult",
    "analytic_w",
    "build_full",
    "build_sector",
    "dicke_state",
    "enumerate_bipartitions",
    "enumerate_sector",
    "expectation",
    "global_ground",
    "gme_concurrence",
    "locate_boundary",
    "maximize",
    "neighbor_pairs",
    "rank",
    "reduced_purity",
    "sector_boundaries",
]
