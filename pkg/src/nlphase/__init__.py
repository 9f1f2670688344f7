"""Numerical laboratory for a nonlocal phase-transition energy with an
``H^(1/2)``-type kernel and its sharp-interface limit.

Modules
-------
geometry      axis-aligned regions, grids, grid sets, cube census
kernel_exact  closed forms and bound evaluators for the pair energy G
kernel_quad   midpoint and Monte Carlo estimators of G
functional    the discrete energy, its gradient and descent
profiles      recovery fields and their closed-form energy estimates
bounds_lab    discrete reflection-chain and special-cylinder checks
experiments   scan, sweep and census drivers with CSV/JSON output
cli           ``python3 -m nlphase`` entry point
"""
from .errors import DomainError, ParameterError, PreconditionError, SamplingError
from .geometry import Ball, Box, BoxUnion, Cylinder, Grid, GridSet, HalfSpace, LatticeFamily, Slab, measure
from .kernel_exact import SlabPairConfig, cylinder_slab_energy, slab_energy_per_area, unit_ball_area
from .kernel_quad import EnergyEstimate, QuadSpec, mc_pair_energy, midpoint_pair_energy
from .functional import DoubleWell, EnergyBreakdown, PhaseField, ScalingSchedule, eval_F, gamma_limit_F, grad_F

__all__ = [
    "Ball", "Box", "BoxUnion", "Cylinder", "DomainError", "DoubleWell", "EnergyBreakdown", "EnergyEstimate",
    "Grid", "GridSet", "HalfSpace", "LatticeFamily", "ParameterError", "PhaseField", "PreconditionError",
    "QuadSpec", "SamplingError", "ScalingSchedule", "Slab", "SlabPairConfig", "cylinder_slab_energy",
    "eval_F", "gamma_limit_F", "grad_F", "mc_pair_energy", "measure", "midpoint_pair_energy",
    "slab_energy_per_area", "unit_ball_area",
]
