"""Recovery fields: a linear ramp of width ``d = eps/lambda_eps`` between the
wells across a flat interface, their sharp limits, and closed-form energy
estimates valid at any ``eps`` (the ramp is far below grid scale for small
``eps``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError
from .functional import DoubleWell, EnergyBreakdown, PhaseField, ScalingSchedule, gamma_limit_F
from .geometry import Box, Grid
from .kernel_exact import SlabPairConfig, cylinder_slab_energy


@dataclass(frozen=True)
class RecoveryConfig:
    """Ramp profile on ``Q'_R x (-l/2, l/2)`` with ``beta`` below and ``alpha`` above."""

    R: float = 1.0
    l: float = 1.0
    eps: float = 0.1
    schedule: ScalingSchedule = field(default_factory=ScalingSchedule)
    well: DoubleWell = field(default_factory=DoubleWell)
    n: int = 2

    def __post_init__(self):
        if not (self.R > 0 and self.l > 0):
            raise ParameterError("R and l must be positive")
        if self.n < 1:
            raise ParameterError("dimension must be >= 1")
        if not self.log_width < math.log(self.l):
            raise ParameterError("interface width eps/lambda_eps must be below l")

    @property
    def log_width(self) -> float:
        """``ln(eps / lambda_eps)``."""
        return self.schedule.interface_log_width(self.eps)

    @property
    def width(self) -> float:
        return math.exp(self.log_width)

    @property
    def base_measure(self) -> float:
        return self.R ** (self.n - 1)


def recovery_profile_value(cfg: RecoveryConfig, y):
    """``beta`` below ``-d/2``, ``alpha`` above ``d/2``, affine in between."""
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y) >= cfg.l / 2):
        raise DomainError("y_N must lie in (-l/2, l/2)")
    a, b = cfg.well.alpha, cfg.well.beta
    w = cfg.width
    if w > 0:
        s = np.clip((y + w / 2) / w, 0.0, 1.0)
    else:
        s = np.where(y > 0, 1.0, np.where(y < 0, 0.0, 0.5))
    out = b + (a - b) * s
    return float(out) if out.ndim == 0 else out


def _ramp_integral(y: np.ndarray, w: float) -> np.ndarray:
    """Antiderivative of ``clip((y + w/2)/w, 0, 1)`` vanishing below the ramp."""
    if w <= 0:
        return np.maximum(y, 0.0)
    return np.where(y <= -w / 2, 0.0, np.where(y >= w / 2, y, (y + w / 2) ** 2 / (2 * w)))


def recovery_grid(cfg: RecoveryConfig, resolution: int) -> Grid:
    """Grid on ``Q'_R x (-l/2, l/2)``; the vertical count is even so a cell face sits on the interface."""
    if resolution < 1:
        raise ParameterError("resolution must be >= 1")
    lateral = max(1, math.ceil(cfg.R * resolution - 1e-9))
    vertical = max(2, math.ceil(cfg.l * resolution - 1e-9))
    vertical += vertical % 2
    box = Box((-cfg.R / 2,) * (cfg.n - 1) + (-cfg.l / 2,), (cfg.R / 2,) * (cfg.n - 1) + (cfg.l / 2,))
    return Grid(box, (lateral,) * (cfg.n - 1) + (vertical,))


def recovery_field(cfg: RecoveryConfig, resolution: int = 32) -> PhaseField:
    """Cell averages of the recovery profile (exact, not point samples)."""
    grid = recovery_grid(cfg, resolution)
    edges = grid.axis_edges(grid.dim - 1)
    w = cfg.width
    s = np.diff(_ramp_integral(edges, w)) / np.diff(edges)
    a, b = cfg.well.alpha, cfg.well.beta
    column = b + (a - b) * s
    values = np.broadcast_to(column, grid.counts)
    return PhaseField(grid, values)


def sharp_interface_field(height: float, grid: Grid, well: DoubleWell = DoubleWell()) -> PhaseField:
    """``beta`` in cells centred below ``height`` (last axis), ``alpha`` above."""
    lo, hi = grid.box.lower[-1], grid.box.upper[-1]
    if not lo <= height <= hi:
        raise DomainError("interface height must lie inside the box")
    zc = grid.axis_centers(grid.dim - 1)
    column = np.where(zc < height, well.beta, well.alpha)
    return PhaseField(grid, np.broadcast_to(column, grid.counts))


def interface_area(grid: Grid, height: float) -> float:
    """Area of the flat cut at ``height`` that the sharp field resolves."""
    zc = grid.axis_centers(grid.dim - 1)
    below = int(np.sum(zc < height))
    if below in (0, len(zc)):
        return 0.0
    return float(np.prod(grid.box.sides[:-1]))


def l1_distance(u: PhaseField, v: PhaseField) -> float:
    if u.grid != v.grid:
        raise ParameterError("fields live on different grids")
    return float(np.sum(np.abs(u.values - v.values))) * u.grid.cell_volume


def recovery_l1_exact(cfg: RecoveryConfig) -> float:
    """Continuum L1 distance between the ramp and the sharp step: ``(beta-alpha) R^(N-1) d / 4``."""
    return (cfg.well.beta - cfg.well.alpha) * cfg.base_measure * cfg.width / 4


@dataclass(frozen=True)
class RecoveryEstimate:
    """Upper estimate of ``F_eps`` for the recovery field, term by term."""

    eps: float
    log_lambda: float
    main: float
    potential_bound: float
    correction_area2: float
    correction_area: float
    limit: float
    C: float

    @property
    def total(self) -> float:
        return self.main + self.potential_bound + self.correction_area2 + self.correction_area

    @property
    def deviation(self) -> float:
        return abs(self.total - self.limit) / self.limit if self.limit > 0 else math.nan

    def breakdown(self) -> EnergyBreakdown:
        return EnergyBreakdown(self.potential_bound, self.main + self.correction_area2 + self.correction_area, "recovery cylinder")


def recovery_energy_semianalytic(cfg: RecoveryConfig, C: float = 10.0, base_measure: float | None = None) -> RecoveryEstimate:
    """Closed-form upper estimate of the recovery energy.

    The nonlocal main term is ``2 eps (beta-alpha)^2`` times the cylinder-slab
    energy at gap ``d``; the potential term is at most
    ``lambda_eps max W R^(N-1) d = eps max W R^(N-1)``; the ramp cross terms are
    bounded by ``eps C (beta-alpha)^2`` times ``R^(2(N-1))`` and ``R^(N-1)``.
    """
    if C < 0:
        raise ParameterError("ramp constant C must be nonnegative")
    area = cfg.base_measure if base_measure is None else float(base_measure)
    jump2 = (cfg.well.beta - cfg.well.alpha) ** 2
    slab = SlabPairConfig.from_log_gap(cfg.log_width, cfg.l, cfg.n)
    main = 2 * cfg.eps * jump2 * cylinder_slab_energy(cfg.R, slab, base_measure=area)
    potential = cfg.eps * cfg.well.max_between * area
    return RecoveryEstimate(
        eps=cfg.eps,
        log_lambda=cfg.schedule.log_lambda(cfg.eps),
        main=main,
        potential_bound=potential,
        correction_area2=cfg.eps * C * jump2 * area**2,
        correction_area=cfg.eps * C * jump2 * area,
        limit=gamma_limit_F(area, cfg.well.alpha, cfg.well.beta, cfg.schedule.k, cfg.n),
        C=C,
    )


@dataclass(frozen=True)
class PolyhedralRecovery:
    pieces: tuple[RecoveryEstimate, ...]
    interpolation_volume: float
    interpolation_energy: float

    @property
    def total(self) -> float:
        return sum(p.total for p in self.pieces) + self.interpolation_energy

    @property
    def limit(self) -> float:
        return sum(p.limit for p in self.pieces)


def polyhedral_recovery(bases: list[Box], cfg: RecoveryConfig, C: float = 10.0, C_edge: float = 10.0) -> PolyhedralRecovery:
    """Recovery estimate for a flat interface split into axis-aligned cylinder bases.

    Each base contributes its own cylinder estimate.  The interpolation layer
    near shared cylinder edges is not built pointwise; its volume is bounded by
    ``C_edge (eps/lambda_eps)^2`` per base and its potential energy by
    ``lambda_eps max W`` times that volume.
    """
    if not bases:
        raise ParameterError("need at least one cylinder base")
    for p in range(len(bases)):
        for q in range(p + 1, len(bases)):
            if bases[p].overlap_measure(bases[q]) > 0:
                raise ParameterError("cylinder bases must have disjoint interiors")
    pieces = tuple(recovery_energy_semianalytic(cfg, C, base_measure=b.measure) for b in bases)
    volume = C_edge * len(bases) * math.exp(2 * cfg.log_width)
    energy = cfg.well.max_between * C_edge * len(bases) * math.exp(cfg.log_width + math.log(cfg.eps))
    return PolyhedralRecovery(pieces, volume, energy)
