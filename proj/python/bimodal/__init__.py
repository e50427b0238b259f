"""Bimodal map x -> b + x - k / (1 + e^x): regions, attractors and the chemostat ODE."""

from ._core import (
    Attractor,
    AttractorSet,
    CriticalPointError,
    DomainError,
    Error,
    MapParams,
    NoFixedPoint,
    NotInRegion,
    OdeParams,
    OdeState,
    Period2Orbit,
    SectionEvent,
    SolverError,
    absorbing_interval,
    attractor_set,
    classify,
    collect_events,
    critical_abscissae,
    derivative,
    eval_map,
    eval_n,
    find_period2,
    fixed_point,
    flip_curve_k,
    gamma_boundaries,
    gamma_intersection_k,
    k_of_u,
    return_map_cloud,
    schwarzian,
    symmetry_conjugate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
