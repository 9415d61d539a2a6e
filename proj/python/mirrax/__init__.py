"""Reconfigurable mecanum robot analysis.

Angles are radians except in JSON scenario and profile files, which use degrees.
"""

from ._mirrax import (
    InvalidArgument,
    IoError,
    KinematicMaps,
    RobotParams,
    Trajectory,
    cli,
    counterbalance,
    determinant,
    footprint_width,
    forward_dynamics,
    forward_map,
    generate_trajectory,
    gsi,
    inverse_map,
    kcm_rank,
    kinetic_energy,
    mass_matrix,
    stack_maps,
    sweep,
    time_scale,
    track,
    velocity_clamp,
    worst_ratio,
)

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
