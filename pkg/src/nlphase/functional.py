"""The discrete energy

    F_eps(u, A) = lambda_eps * int_{A} W(u) + eps * int_{A x A} (u(y) - u(x))^2 / |y - x|^(N+1)

for piecewise-constant fields on a uniform grid, its gradient, a descent
driver and the sharp-interface limit functional.

The double integral runs over ordered pairs, so it equals twice the sum over
unordered pairs.  ``lambda_eps`` is handled through its logarithm because
``exp(k/eps)`` overflows long before ``eps`` gets small.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ParameterError, PreconditionError
from .geometry import Box, Grid, GridSet
from .kernel_exact import unit_ball_area
from .kernel_quad import pair_sum
from .serialize import from_dict, to_dict


@dataclass(frozen=True)
class DoubleWell:
    """``W(t) = (t - alpha)^2 (t - beta)^2``."""

    alpha: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        if not self.alpha < self.beta:
            raise ParameterError("wells must satisfy alpha < beta")

    def W(self, t):
        t = np.asarray(t, dtype=float)
        return (t - self.alpha) ** 2 * (t - self.beta) ** 2

    def dW(self, t):
        t = np.asarray(t, dtype=float)
        a, b = self.alpha, self.beta
        return 2 * (t - a) * (t - b) * (2 * t - a - b)

    @property
    def max_between(self) -> float:
        """``max W`` on ``[alpha, beta]``, attained at the midpoint."""
        return ((self.beta - self.alpha) / 2) ** 4


@dataclass(frozen=True)
class ScalingSchedule:
    """``eps -> lambda_eps``; by default ``exp(k/eps)``.

    ``log_rule`` overrides the default with any map ``eps -> ln(lambda_eps)``.
    """

    k: float = 1.0
    log_rule: Callable[[float], float] | None = None

    def __post_init__(self):
        if not self.k > 0:
            raise ParameterError("k must be positive")

    def log_lambda(self, eps: float) -> float:
        if not eps > 0:
            raise ParameterError("eps must be positive")
        return float(self.log_rule(eps)) if self.log_rule is not None else self.k / eps

    def interface_log_width(self, eps: float) -> float:
        """``ln(eps / lambda_eps)``."""
        return math.log(eps) - self.log_lambda(eps)


def lambda_of_eps(schedule: ScalingSchedule, eps: float) -> float:
    """``lambda_eps``; ``inf`` once it leaves the double range."""
    try:
        return math.exp(schedule.log_lambda(eps))
    except OverflowError:
        return math.inf


@dataclass(frozen=True, eq=False)
class PhaseField:
    """Cell values of ``u`` on a grid over the domain box."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(self.grid.counts)
        if not np.all(np.isfinite(v)):
            raise ParameterError("field values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "PhaseField":
        return cls(grid, np.full(grid.counts, float(value)))

    @property
    def domain(self) -> Box:
        return self.grid.box

    def with_values(self, values) -> "PhaseField":
        return PhaseField(self.grid, values)

    def to_dict(self) -> dict:
        return {"grid": to_dict(self.grid), "values": self.values.reshape(-1).tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "PhaseField":
        return cls(from_dict(data["grid"]), np.asarray(data["values"], dtype=float))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PhaseField":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        """Header ``N,counts...,lower...,upper...`` then one value per line in C order."""
        g = self.grid
        head = [g.dim, *g.counts, *g.box.lower, *g.box.upper]
        lines = [",".join(repr(x) for x in head)]
        lines += [repr(float(v)) for v in self.values.reshape(-1)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "PhaseField":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        head = lines[0].split(",")
        n = int(head[0])
        if len(head) != 1 + 3 * n:
            raise ParameterError("malformed phase-field header")
        counts = tuple(int(x) for x in head[1 : 1 + n])
        lower = [float(x) for x in head[1 + n : 1 + 2 * n]]
        upper = [float(x) for x in head[1 + 2 * n :]]
        values = np.array([float(x) for x in lines[1:]])
        if values.size != int(np.prod(counts)):
            raise ParameterError("value count does not match the grid")
        return cls(Grid(Box(lower, upper), counts), values)


@dataclass(frozen=True)
class EnergyBreakdown:
    potential: float
    nonlocal_: float
    region: str = "domain"
    reliable: bool = True

    @property
    def total(self) -> float:
        return self.potential + self.nonlocal_

    def to_dict(self) -> dict:
        return {
            "potential": self.potential,
            "nonlocal": self.nonlocal_,
            "total": self.total,
            "region": self.region,
            "reliable": self.reliable,
        }


def _region_mask(u: PhaseField, region) -> np.ndarray:
    if region is None:
        return np.ones(u.grid.counts, dtype=bool)
    if isinstance(region, GridSet):
        if region.grid != u.grid:
            raise ParameterError("region grid differs from the field grid")
        return region.mask.copy()
    return region.contains(u.grid.centers()).reshape(u.grid.counts)


def _scaled(log_lam: float, w: np.ndarray) -> np.ndarray:
    """``lambda * w`` for ``w >= 0`` without overflowing when ``w`` vanishes."""
    out = np.zeros_like(w)
    pos = w > 0
    with np.errstate(over="ignore"):
        out[pos] = np.exp(log_lam + np.log(w[pos]))
    return out


def eval_potential_term(u: PhaseField, eps: float, region=None,
                        schedule: ScalingSchedule = ScalingSchedule(), well: DoubleWell = DoubleWell()) -> float:
    """``lambda_eps * sum W(u_cell) * cell volume`` over cells centred in ``region``."""
    mask = _region_mask(u, region)
    w = well.W(u.values[mask])
    return float(np.sum(_scaled(schedule.log_lambda(eps), w))) * u.grid.cell_volume


def _half_offsets(counts: tuple[int, ...]):
    """Lattice offsets with first nonzero component positive."""
    ranges = [range(-(c - 1), c) for c in counts]
    for o in itertools.product(*ranges):
        nz = next((v for v in o if v != 0), 0)
        if nz > 0:
            yield o


def _shift_slices(o, counts):
    src = tuple(slice(max(0, -v), c - max(0, v)) for v, c in zip(o, counts))
    dst = tuple(slice(max(0, v), c - max(0, -v)) for v, c in zip(o, counts))
    return src, dst


def offset_weights(grid: Grid, depth: int = 0, kappa: float = 3.0) -> tuple[list, np.ndarray, bool]:
    """Cell-pair kernel integrals ``K_o`` for every half-offset ``o``.

    At ``depth = 0`` this is ``|o h|^-(N+1) h^(2N)``; positive depth refines
    near pairs exactly like the pair-energy quadrature.  Face- or
    corner-adjacent cells have a divergent integral, so refinement there is
    flagged unreliable.
    """
    h = grid.h
    offs = list(_half_offsets(grid.counts))
    if not offs:
        return offs, np.zeros(0), True
    o = np.asarray(offs, dtype=float)
    if depth == 0:
        r2 = np.sum((o * h) ** 2, axis=1)
        return offs, grid.cell_volume**2 * r2 ** (-(grid.dim + 1) / 2), True
    weights = np.empty(len(offs))
    reliable = True
    zero = np.zeros((1, grid.dim))
    hh = h[None, :]
    for i, v in enumerate(o):
        acc = pair_sum(zero, hh, (v * h)[None, :], hh, depth, kappa)
        weights[i] = acc.total
        reliable &= not acc.unreliable
    return offs, weights, reliable


def eval_nonlocal_term(u: PhaseField, eps: float, region=None, depth: int = 0, kappa: float = 3.0) -> float:
    """``eps`` times the ordered-pair double sum of ``(u_j - u_i)^2 K_ij`` over cells centred in ``region``."""
    return _nonlocal(u, eps, region, depth, kappa)[0]


def _nonlocal(u, eps, region, depth, kappa):
    mask = _region_mask(u, region)
    vals = u.values
    counts = u.grid.counts
    offs, weights, reliable = offset_weights(u.grid, depth, kappa)
    parts = []
    for o, w in zip(offs, weights):
        src, dst = _shift_slices(o, counts)
        m = mask[src] & mask[dst]
        diff = vals[dst] - vals[src]
        parts.append(w * float(np.sum(np.where(m, diff * diff, 0.0))))
    return 2.0 * eps * math.fsum(parts), reliable


def eval_F(u: PhaseField, eps: float, region=None, schedule: ScalingSchedule = ScalingSchedule(),
           well: DoubleWell = DoubleWell(), depth: int = 0, kappa: float = 3.0) -> EnergyBreakdown:
    pot = eval_potential_term(u, eps, region, schedule, well)
    nl, reliable = _nonlocal(u, eps, region, depth, kappa)
    tag = "domain" if region is None else type(region).__name__
    return EnergyBreakdown(pot, nl, tag, reliable)


def grad_F(u: PhaseField, eps: float, schedule: ScalingSchedule = ScalingSchedule(),
           well: DoubleWell = DoubleWell(), depth: int = 0, kappa: float = 3.0) -> np.ndarray:
    """``dF/du_i = lambda W'(u_i) h^N + 4 eps sum_j (u_i - u_j) K_ij``."""
    vals = u.values
    counts = u.grid.counts
    dw = well.dW(vals)
    with np.errstate(over="ignore", invalid="ignore"):
        pot = np.where(dw != 0, np.sign(dw) * np.exp(schedule.log_lambda(eps) + np.log(np.abs(dw) + (dw == 0))), 0.0)
    g = pot * u.grid.cell_volume
    offs, weights, _ = offset_weights(u.grid, depth, kappa)
    acc = np.zeros(counts)
    for o, w in zip(offs, weights):
        src, dst = _shift_slices(o, counts)
        diff = vals[src] - vals[dst]
        acc[src] += w * diff
        acc[dst] -= w * diff
    return g + 4.0 * eps * acc



def grad_check(eps: float, cells: int = 8, n: int = 2, trials: int = 20, seed: int = 0,
               schedule: ScalingSchedule = ScalingSchedule(), well: DoubleWell = DoubleWell(),
               step: float = 1e-6) -> float:
    """Largest ``max|fd - g| / max|g|`` over ``trials`` random fields, ``fd`` from central differences.

    Field values are drawn uniformly from ``[alpha - 0.2 (beta - alpha), beta + 0.2 (beta - alpha)]``
    with the counter-based stream ``(seed, trial)``.
    """
    grid = Grid.uniform(Box((0.0,) * n, (1.0,) * n), cells)
    worst = 0.0
    for t in range(trials):
        rng = np.random.Generator(np.random.Philox(key=int(seed)).jumped(t))
        vals = well.alpha + (well.beta - well.alpha) * (1.4 * rng.random(grid.counts) - 0.2)
        u = PhaseField(grid, vals)
        g = grad_F(u, eps, schedule, well).reshape(-1)
        flat = vals.reshape(-1)
        fd = np.empty_like(g)
        for i in range(flat.size):
            e = np.zeros_like(flat)
            e[i] = step
            fp = eval_F(u.with_values((flat + e).reshape(grid.counts)), eps, None, schedule, well).total
            fm = eval_F(u.with_values((flat - e).reshape(grid.counts)), eps, None, schedule, well).total
            fd[i] = (fp - fm) / (2 * step)
        worst = max(worst, float(np.max(np.abs(fd - g)) / max(np.max(np.abs(g)), 1e-300)))
    return worst

@dataclass
class DescentResult:
    field: PhaseField
    energies: list[float]
    accepted: int
    converged: bool


def minimize_F(u0: PhaseField, eps: float, schedule: ScalingSchedule = ScalingSchedule(),
               well: DoubleWell = DoubleWell(), step: float = 1.0, max_iter: int = 500,
               tol: float = 1e-10, armijo: float = 1e-4, shrink: float = 0.5) -> DescentResult:
    """Gradient descent with backtracking (Armijo) line search.

    Refuses to run when the interface width ``eps/lambda_eps`` spans fewer
    than two cells: such a field cannot represent the transition layer.
    """
    h = float(np.max(u0.grid.h))
    if schedule.interface_log_width(eps) < math.log(2 * h):
        width = math.exp(schedule.interface_log_width(eps))
        raise PreconditionError(
            f"interface width eps/lambda_eps = {width:.3e} is below two cells (2h = {2 * h:.3e}); "
            "refine the grid or increase eps"
        )
    u = u0
    energy = eval_F(u, eps, None, schedule, well).total
    log = [energy]
    accepted = 0
    t = step
    converged = False
    for _ in range(max_iter):
        g = grad_F(u, eps, schedule, well)
        g2 = float(np.sum(g * g))
        if g2 <= tol * tol:
            converged = True
            break
        while True:
            trial = u.with_values(u.values - t * g)
            e_trial = eval_F(trial, eps, None, schedule, well).total
            if e_trial <= energy - armijo * t * g2:
                break
            t *= shrink
            if t < 1e-16:
                break
        if not e_trial <= energy:
            converged = True
            break
        if energy - e_trial <= tol * max(1.0, abs(energy)):
            u, energy = trial, e_trial
            log.append(energy)
            accepted += 1
            converged = True
            break
        u, energy = trial, e_trial
        log.append(energy)
        accepted += 1
        t /= shrink
    return DescentResult(u, log, accepted, converged)


def gamma_limit_F(area: float, alpha: float = 0.0, beta: float = 1.0, k: float = 1.0, n: int = 2) -> float:
    """``2 (beta - alpha)^2 omega_{N-1} k area``."""
    if area < 0:
        raise ParameterError("interface area must be nonnegative")
    return 2 * (beta - alpha) ** 2 * unit_ball_area(n - 1) * k * area


def sharp_sets(u: PhaseField, well: DoubleWell = DoubleWell(), delta: float | None = None) -> tuple[GridSet, GridSet]:
    """``A = {u < alpha + delta}`` and ``B = {u > beta - delta}``; ``delta`` defaults to ``0.1 (beta - alpha)``."""
    if delta is None:
        delta = 0.1 * (well.beta - well.alpha)
    if not 0 < delta < (well.beta - well.alpha) / 2:
        raise ParameterError("delta must lie in (0, (beta - alpha)/2)")
    return (GridSet(u.grid, u.values < well.alpha + delta), GridSet(u.grid, u.values > well.beta - delta))
