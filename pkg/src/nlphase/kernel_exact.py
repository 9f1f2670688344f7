"""Closed forms and bound evaluators for the pair energy

    G(A, B) = integral over A x B of |y - x|^-(N+1)

on slabs, cylinders and the special cylinders of the lower-bound argument.

Gaps between the two layers can be astronomically small (``eps / lambda_eps``
with ``lambda_eps = exp(k/eps)``), so every routine that depends on the gap
works with its logarithm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ParameterError, PreconditionError
from .geometry import unit_ball_volume

ADJUDICATED = "adjudicated"
PRINTED = "printed"


def unit_ball_area(m: int) -> float:
    """``omega_m``: the ``m``-dimensional measure of the unit ball of ``R^m``."""
    if m < 0 or int(m) != m:
        raise ParameterError("dimension must be a nonnegative integer")
    return unit_ball_volume(int(m))


@dataclass(frozen=True)
class SlabPairConfig:
    """Two layers ``(d/2, l/2)`` and ``(-l/2, -d/2)`` in the last coordinate.

    ``log_d`` carries the gap when ``d`` itself underflows; use
    :meth:`from_log_gap` in that case.
    """

    d: float
    l: float
    n: int = 2
    log_d: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("dimension must be >= 1")
        if not self.l > 0:
            raise ParameterError("outer extent l must be positive")
        log_d = self.log_d if self.log_d is not None else (math.log(self.d) if self.d > 0 else None)
        if log_d is None:
            raise ParameterError("gap d must be positive")
        if not log_d < math.log(self.l):
            raise ParameterError(f"need 0 < d < l, got d={self.d}, l={self.l}")
        object.__setattr__(self, "log_d", float(log_d))

    @classmethod
    def from_log_gap(cls, log_d: float, l: float, n: int = 2) -> "SlabPairConfig":
        return cls(d=math.exp(log_d), l=l, n=n, log_d=log_d)

    @property
    def omega(self) -> float:
        return unit_ball_area(self.n - 1)

    @property
    def fold(self) -> float:
        """Support half-width ``(l - d)/4`` of the antipodal profile."""
        return (self.l - self.d) / 4


def slab_H_profile(cfg: SlabPairConfig, a_n):
    """Antipodal-slice density of the slab pair at midpoint height ``a_n``.

    Even in ``a_n`` and zero from ``|a_n| >= (l-d)/4`` on.
    """
    a = np.abs(np.asarray(a_n, dtype=float))
    inside = a < cfg.fold
    lo = cfg.d / 2 + np.where(inside, a, 0.0)
    hi = cfg.l / 2 - np.where(inside, a, 0.0)
    val = np.where(inside, 0.5 * cfg.omega * (1.0 / lo - 1.0 / hi), 0.0)
    return float(val) if val.ndim == 0 else val


def slab_log_factor(cfg: SlabPairConfig, variant: str = ADJUDICATED) -> float:
    """The logarithmic factor multiplying ``omega_{N-1}`` in the per-area energy.

    ``adjudicated`` is ``2 ln((l+d)/4) - ln(d/2) - ln(l/2)``, which integrates
    the antipodal profile exactly.  ``printed`` is the variant with
    ``2 ln((l+d)/2)``; it differs by the constant ``2 ln 2`` and does not vanish
    as ``d -> l``.
    """
    l = cfg.l
    log_half_d = cfg.log_d - math.log(2.0)
    lp = math.log1p(cfg.d / l) + math.log(l)  # ln(l + d), safe for tiny d
    if variant == ADJUDICATED:
        return 2 * (lp - math.log(4.0)) - log_half_d - math.log(l / 2)
    if variant == PRINTED:
        return 2 * (lp - math.log(2.0)) - math.log(l / 2) - log_half_d
    raise ParameterError(f"unknown closed-form variant {variant!r}")


def slab_energy_per_area(cfg: SlabPairConfig, variant: str = ADJUDICATED) -> float:
    """Pair energy of the two layers per unit of lateral ``(N-1)``-area."""
    return cfg.omega * slab_log_factor(cfg, variant)


def cylinder_slab_energy(R: float, cfg: SlabPairConfig, variant: str = ADJUDICATED, base_measure: float | None = None) -> float:
    """``G(Q'_R x (d/2, l/2), R^(N-1) x (-l/2, -d/2))``.

    The slab is infinite laterally, so the energy is exactly the base measure
    times the per-area value; ``base_measure`` overrides ``R**(N-1)`` for
    non-square bases.
    """
    if not R > 0:
        raise ParameterError("cylinder side R must be positive")
    area = R ** (cfg.n - 1) if base_measure is None else float(base_measure)
    return area * slab_energy_per_area(cfg, variant)


@dataclass(frozen=True)
class ComplementBound:
    bound: float
    estimate: float | None
    holds: bool | None


def cylinder_complement_bound(R: float, d: float, l: float, c_n: float, n: int = 2, estimate: float | None = None) -> ComplementBound:
    """``C_N R^(N-1) (1 - ln(l/2))`` and, given an estimate of the left side, whether it holds.

    ``C_N`` has no default: the constant is not quantified.
    """
    if not 0 <= d <= l:
        raise ParameterError("need 0 <= d <= l")
    if l > 4 / 3:
        raise ParameterError(f"l = {l} exceeds 4/3")
    if not (R > 0 and c_n > 0 and l > 0):
        raise ParameterError("R, l and C_N must be positive")
    bound = c_n * R ** (n - 1) * (1 - math.log(l / 2))
    holds = None if estimate is None else bool(estimate <= bound)
    return ComplementBound(bound, estimate, holds)


def _strip_terms(R: float, l: float, H: int, n: int, variant: str) -> np.ndarray:
    h = np.arange(1, H + 1, dtype=float)
    d = h * l / (2 * H)
    omega = unit_ball_area(n - 1)
    lp = np.log(l + d)
    if variant == ADJUDICATED:
        phi = 2 * (lp - math.log(4.0)) - np.log(d / 2) - math.log(l / 2)
    elif variant == PRINTED:
        phi = 2 * (lp - math.log(2.0)) - np.log(d / 2) - math.log(l / 2)
    else:
        raise ParameterError(f"unknown closed-form variant {variant!r}")
    return 2 * omega * (R / H) * phi


def triangle_strip_sum(R: float, l: float, H: int, n: int = 2, variant: str = ADJUDICATED) -> float:
    """Energy of ``H`` paired strips filling the triangle from inside.

    Strip ``h`` has width ``R/H`` (both mirror halves together), sits above
    ``h l/(4H)`` and faces the layer below ``-h l/(4H)``; each term is the
    cylinder-slab closed form for that gap.
    """
    if H < 1:
        raise ParameterError("strip count H must be >= 1")
    if l > 4 / 3 or not l > 0:
        raise ParameterError("need 0 < l <= 4/3")
    return float(np.sum(_strip_terms(R, l, int(H), n, variant)))


def triangle_strip_limit(R: float, l: float, n: int = 2, variant: str = ADJUDICATED) -> float:
    """The ``H -> infinity`` value of :func:`triangle_strip_sum` (a Riemann integral)."""
    omega = unit_ball_area(n - 1)
    c = math.log(4.0) if variant == ADJUDICATED else math.log(2.0)

    def f(rho):
        d = rho * l / 2
        return 2 * (math.log(l + d) - c) - math.log(d / 2) - math.log(l / 2)

    val, _ = integrate.quad(f, 0.0, 1.0, limit=200)
    return 2 * omega * R * val


def triangle_strip_bound(R: float, l: float, n: int = 2) -> float:
    """``2 omega_{N-1} (R - 2R ln(l/2))``."""
    return 2 * unit_ball_area(n - 1) * (R - 2 * R * math.log(l / 2))


@dataclass(frozen=True)
class BoundParams:
    """Parameters of the special-cylinder lower bound.

    ``density`` is the level ``Lambda``, ``defect`` the level ``lambda``;
    ``xi`` and ``c_n`` are dimensional constants the caller must supply.
    ``log_lambda_eps`` is ``ln(lambda_eps)``.
    """

    defect: float
    eps: float
    c: float
    r: float
    R: float
    xi: float
    c_n: float
    log_lambda_eps: float
    n: int = 2
    density: float = 1.0
    L: float = 1.0


def special_cylinder_lower_bound(p: BoundParams) -> dict[str, float]:
    """Right-hand side of the lower bound for ``G`` on a special cylinder.

    Returns the value, its main (logarithmic) part, the ``C(N)`` correction
    and the same three quantities multiplied by ``eps``.
    """
    if not p.eps < 1 / 3:
        raise PreconditionError(f"eps = {p.eps} must be < 1/3")
    for name in ("eps", "r", "R", "xi", "c_n"):
        if not getattr(p, name) > 0:
            raise ParameterError(f"{name} must be positive")
    if p.defect < 0 or p.c < 0:
        raise ParameterError("defect level and c must be nonnegative")
    omega = unit_ball_area(p.n - 1)
    area = p.R ** (p.n - 1)
    log_er2 = math.log(p.eps * p.r / 2)
    # -ln(1/(2 eps lambda_eps)) = ln 2 + ln eps + ln lambda_eps
    spread = log_er2 + math.log(2 * p.eps) + p.log_lambda_eps
    main = area * omega * (1 - 3 * p.defect - 6 * p.eps) * (1 - 2 * p.xi * (2 * p.defect + p.c * p.eps) - 2 * p.eps) * spread
    correction = area * p.c_n * (1 - log_er2)
    value = main - correction
    return {
        "value": value,
        "main": main,
        "correction": correction,
        "eps_value": p.eps * value,
        "eps_main": p.eps * main,
        "eps_correction": p.eps * correction,
    }


def special_cylinder_limit(R: float, k: float, defect: float, xi: float, n: int = 2) -> float:
    """``R^(N-1) omega k (1 - 3 lambda)(1 - 4 xi lambda)``: the ``eps -> 0`` limit of ``eps * main``."""
    return R ** (n - 1) * unit_ball_area(n - 1) * k * (1 - 3 * defect) * (1 - 4 * xi * defect)
