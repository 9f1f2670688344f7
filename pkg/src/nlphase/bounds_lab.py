"""Discrete checkers for the lower-bound machinery.

Sections are label arrays on ``m`` equal cells of ``(-l/2, l/2)``: 0 for
neither set, 1 for ``A``, 2 for ``B``.  Block shifts are whole numbers of
cells, so the reflection-chain inequality becomes an integer count compared
exactly (rational arithmetic, no tolerance).
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, ParameterError, PreconditionError
from .geometry import Box, GridSet
from .kernel_exact import SlabPairConfig, slab_energy_per_area
from .kernel_quad import QuadSpec, midpoint_pair_energy, stream

NEITHER, IN_A, IN_B = 0, 1, 2


@dataclass(frozen=True, eq=False)
class SectionPair:
    """Labels on the sections at ``a' + w`` (``plus``) and ``a' - w`` (``minus``)."""

    plus: np.ndarray
    minus: np.ndarray
    l: float = 1.0

    def __post_init__(self):
        p = np.asarray(self.plus, dtype=np.int8)
        q = np.asarray(self.minus, dtype=np.int8)
        if p.shape != q.shape or p.ndim != 1:
            raise ParameterError("sections must be 1-d arrays of equal length")
        if len(p) < 4 or len(p) % 2:
            raise ParameterError("section resolution m must be even and >= 4")
        if not (np.isin(p, (0, 1, 2)).all() and np.isin(q, (0, 1, 2)).all()):
            raise ParameterError("labels must be 0 (neither), 1 (A) or 2 (B)")
        if not self.l > 0:
            raise ParameterError("l must be positive")
        object.__setattr__(self, "plus", p)
        object.__setattr__(self, "minus", q)

    @property
    def m(self) -> int:
        return len(self.plus)

    @property
    def delta(self) -> Fraction:
        return Fraction(self.l) / self.m

    def defect(self) -> tuple[float, float]:
        """Measure of the ``neither`` part of each section."""
        d = float(self.delta)
        return (int(np.sum(self.plus == NEITHER)) * d, int(np.sum(self.minus == NEITHER)) * d)


@dataclass(frozen=True)
class ChainResult:
    lhs: float
    rhs: float
    holds: bool
    lhs_cells: int
    overlap_cells: tuple[int, int]


def _pairs(upper: np.ndarray, lower: np.ndarray, p: int) -> int:
    """Cells ``k`` with ``upper[k + p] in A`` and ``lower[k - p] in B``."""
    m = len(upper)
    return int(np.sum((upper[2 * p :] == IN_A) & (lower[: m - 2 * p] == IN_B)))


def _overlap(b_section: np.ndarray, a_section: np.ndarray, start_b: int, start_a: int, p: int) -> int:
    """Recentred overlap of the ``B``-block at ``start_b`` and the ``A``-block at ``start_a``."""
    m = len(b_section)
    t = np.arange(2 * p)
    ib, ia = start_b + t, start_a + t
    ok = (ib >= 0) & (ib < m) & (ia >= 0) & (ia < m)
    return int(np.sum((b_section[ib[ok]] == IN_B) & (a_section[ia[ok]] == IN_A)))


def admissible(i: int, p: int, m: int) -> bool:
    """``i`` in ``(1/2 - l/(4v), l/(4v) - 1/2)`` with ``v = p l/m``, in integers."""
    return 2 * p - m < 4 * p * i < m - 2 * p


def reflection_chain_check(pair: SectionPair, v: float, i: int, j: int, d: float, swap: bool = False) -> ChainResult:
    """Compare both sides of the reflection-chain inequality on one pair of sections.

    ``lhs`` sums, over the two orientations ``w' = +-w``, the measure of heights
    ``a`` with ``A`` at ``(a' + w', a + v)`` and ``B`` at ``(a' - w', a - v)``.
    ``rhs`` sums the recentred overlap of ``R_i n B`` (on ``a' - w'``) with
    ``L_{i+2j} n A`` (on ``a' + w'``) minus ``2d``.  ``swap=True`` checks the
    companion inequality with the roles of ``A`` and ``B`` exchanged.
    """
    m = pair.m
    ratio = v * m / pair.l
    p = int(round(ratio))
    if p <= 0 or abs(ratio - p) > 1e-9 * max(1.0, ratio):
        raise ParameterError("v must be a positive whole number of cells")
    if not 0 < 2 * p < m:
        raise ParameterError("need 0 < 2v < l")
    if j < 0:
        raise ParameterError("j must be >= 0")
    if not (admissible(i, p, m) and admissible(i + 2 * j, p, m)):
        raise ParameterError(f"indices i={i}, i+2j={i + 2 * j} are outside the admissible range for v={v}")
    if not d > 0:
        raise ParameterError("defect bound d must be positive")
    dp, dm = pair.defect()
    if not (dp < d and dm < d):
        raise PreconditionError(f"defect measures ({dp:.6g}, {dm:.6g}) must both be below d = {d}")
    plus, minus = pair.plus, pair.minus
    if swap:
        swap_map = np.array([NEITHER, IN_B, IN_A], dtype=np.int8)
        plus, minus = swap_map[plus], swap_map[minus]
    lhs_cells = _pairs(plus, minus, p) + _pairs(minus, plus, p)
    start_r = m // 2 + (2 * i - 2) * p
    start_l = m // 2 + 2 * (i + 2 * j) * p
    over = (_overlap(minus, plus, start_r, start_l, p), _overlap(plus, minus, start_r, start_l, p))
    delta = pair.delta
    dd = Fraction(d)
    lhs = lhs_cells * delta
    rhs = sum(c * delta - 2 * dd for c in over)
    return ChainResult(float(lhs), float(rhs), bool(lhs >= rhs), lhs_cells, over)


def _random_section(rng: np.random.Generator, m: int, neither: int) -> np.ndarray:
    kind = rng.integers(3)
    if kind == 0:
        # B below a random interface, A above, with a few flipped cells
        cut = rng.integers(0, m + 1)
        lab = np.where(np.arange(m) < cut, IN_B, IN_A).astype(np.int8)
        flips = rng.random(m) < rng.uniform(0, 0.3)
        lab[flips] = 3 - lab[flips]
    elif kind == 1:
        lab = rng.integers(1, 3, size=m).astype(np.int8)
    else:
        # random runs
        cuts = np.sort(rng.integers(0, m, size=rng.integers(1, 8)))
        lab = np.empty(m, dtype=np.int8)
        start, cur = 0, rng.integers(1, 3)
        for c in list(cuts) + [m]:
            lab[start:c] = cur
            start, cur = c, 3 - cur
    if neither:
        lab[rng.choice(m, size=neither, replace=False)] = NEITHER
    return lab


@dataclass(frozen=True)
class ChainTrial:
    trial: int
    seed: int
    v: float
    i: int
    j: int
    d: float
    lhs: float
    rhs: float
    holds: bool


def random_chain_instance(seed: int, trial: int, m: int = 256, l: float = 1.0, swap: bool = False) -> ChainTrial:
    """One randomized instance satisfying the preconditions, drawn from stream ``(seed, trial)``."""
    rng = stream(seed, trial)
    delta = l / m
    p = int(rng.integers(1, m // 4 + 1))
    lo = -((m - 2 * p) // (4 * p))
    hi = (m - 2 * p) // (4 * p)
    valid = [k for k in range(lo - 1, hi + 2) if admissible(k, p, m)]
    i = int(rng.choice(valid))
    js = [jj for jj in range(0, len(valid) + 1) if admissible(i + 2 * jj, p, m)]
    j = int(rng.choice(js))
    max_cells = int(rng.integers(0, max(1, m // 10)))
    d = (max_cells + 0.5) * delta
    pair = SectionPair(
        _random_section(rng, m, int(rng.integers(0, max_cells + 1))),
        _random_section(rng, m, int(rng.integers(0, max_cells + 1))),
        l,
    )
    res = reflection_chain_check(pair, p * delta, i, j, d, swap)
    return ChainTrial(trial, seed, p * delta, i, j, d, res.lhs, res.rhs, res.holds)


@dataclass
class ChainSuiteReport:
    trials: list[ChainTrial] = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(not t.holds for t in self.trials)

    def to_json(self) -> str:
        return json.dumps({"trials": [asdict(t) for t in self.trials], "failures": self.failures})


def reflection_chain_suite(trials: int = 1000, seed: int = 0, m: int = 256, l: float = 1.0) -> ChainSuiteReport:
    """Randomized instances; even trials check the first inequality, odd ones its companion."""
    report = ChainSuiteReport()
    for t in range(trials):
        report.trials.append(random_chain_instance(seed, t, m, l, swap=bool(t % 2)))
    return report


@dataclass(frozen=True)
class CylinderCheck:
    bound: float
    assumptions_hold: bool
    failures: tuple[str, ...]


def special_cylinder_check_I(sections, Lambda: float, d: float, l: float, L: float, r: float,
                             base_measure: float = 1.0, n: int = 2) -> CylinderCheck:
    """``(3 Lambda - 2) G(A_inf, B_inf, S' x R)`` and whether the hypotheses hold.

    ``sections`` has one row of labels per sampled ``x'`` in ``S'``, on equal
    cells of ``(-L/2, L/2)``.  The hypotheses are: ``A`` fills more than
    ``Lambda + 2l/r`` of the top ``r``-band, ``B`` the same of the bottom
    band, and the ``neither`` part stays below ``(3 Lambda - 2) d / 2``.
    """
    sec = np.atleast_2d(np.asarray(sections, dtype=np.int8))
    if not (0 < d < l):
        raise ParameterError("need 0 < d < l")
    if not (L > 0 and r > 0 and base_measure >= 0):
        raise ParameterError("L, r must be positive and |S'| nonnegative")
    m = sec.shape[1]
    cell = L / m
    edges = np.linspace(-L / 2, L / 2, m + 1)
    top = np.clip(edges[1:], L / 2 - r, L / 2) - np.clip(edges[:-1], L / 2 - r, L / 2)
    bottom = np.clip(edges[1:], -L / 2, -L / 2 + r) - np.clip(edges[:-1], -L / 2, -L / 2 + r)
    failures = []
    if not l < 3 * r:
        failures.append("l < 3r")
    need = Lambda + 2 * l / r
    a_density = ((sec == IN_A) * top).sum(axis=1) / r
    b_density = ((sec == IN_B) * bottom).sum(axis=1) / r
    defect = (sec == NEITHER).sum(axis=1) * cell
    if not np.all(a_density > need):
        failures.append(f"A density in the top band > Lambda + 2l/r = {need:.6g}")
    if not np.all(b_density > need):
        failures.append(f"B density in the bottom band > Lambda + 2l/r = {need:.6g}")
    if not np.all(defect < (3 * Lambda - 2) * d / 2):
        failures.append(f"defect < (3 Lambda - 2) d / 2 = {(3 * Lambda - 2) * d / 2:.6g}")
    per_area = slab_energy_per_area(SlabPairConfig(d, l, n))
    return CylinderCheck((3 * Lambda - 2) * per_area * base_measure, not failures, tuple(failures))


def _check_cube(a: GridSet, b: GridSet, cube: Box):
    if a.grid != b.grid:
        raise ParameterError("A and B must share one grid")
    if not a.grid.box.contains_box(cube):
        raise DomainError("the cube must lie inside the grid domain")


def special_cube_predicate(a: GridSet, b: GridSet, cube: Box, frac: float) -> bool:
    """``|A n Q| > frac |Q|`` and ``|B n Q| > frac |Q|``."""
    if not 0 < frac <= 0.5:
        raise ParameterError("mass fraction must lie in (0, 1/2]")
    _check_cube(a, b, cube)
    q = cube.measure
    return bool(a.box_mass(cube) > frac * q and b.box_mass(cube) > frac * q)


@dataclass(frozen=True)
class FloorEstimate:
    energy: float
    error: float
    ratio: float
    side: float
    reliable: bool


def cube_energy_floor(a: GridSet, b: GridSet, cube: Box, eps: float, spec: QuadSpec = QuadSpec(),
                      frac: float = 0.25) -> FloorEstimate:
    """``eps G(A, B, Q)`` and its ratio to ``R^(N-1)``, ``R`` the side of ``Q``."""
    if not special_cube_predicate(a, b, cube, frac):
        raise PreconditionError(f"both A and B must fill more than {frac} of the cube")
    if not eps > 0:
        raise ParameterError("eps must be positive")
    est = midpoint_pair_energy(a, b, cube, spec)
    side = cube.measure ** (1 / cube.dim)
    scale = side ** (cube.dim - 1)
    return FloorEstimate(eps * est.value, eps * est.error, eps * est.value / scale, side, est.reliable)
