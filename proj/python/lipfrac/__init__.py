"""Explicit dynamic fracture with Lipschitz-constrained damage."""

from ._lipfrac import (
    ArgumentError,
    ConfigError,
    DamageSolverOptions,
    DivergenceError,
    Error,
    LipMesh,
    Material,
    Mesh,
    ParseError,
    Simulation,
    SimulationConfig,
    SolverError,
    ValidationError,
    WaveSpeeds,
    build_lipmesh,
    compute_bounds,
    damage_objective,
    damage_update,
    degradation,
    kalthoff_half_mesh,
    load_config,
    load_mesh,
    local_damage_solve,
    max_lipschitz_ratio,
    min_element_size,
    notched_tension_half_mesh,
    parse_config,
    rectangle_mesh,
    softening,
    solve_damage_whole_domain,
    wave_speeds,
    yc_from_gc,
)

__all__ = [name for name in dir() if not name.startswith("_")]
