"""Axis-aligned geometry, uniform grids and the lattice cube census.

Every region knows its dimension, its Lebesgue measure and how to answer
membership queries for an ``(k, N)`` array of points.  Bounded regions also
expose a bounding box so that quadrature and sampling code can mesh them.

The cube census counts lattice cubes on which a set has an intermediate
volume fraction; a set whose census grows no faster than ``r**(1-N)`` has
finite perimeter, and :func:`census_approximation` builds the cube-union
approximation used to see this.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DomainError, ParameterError, PreconditionError

_TOL = 1e-12


def _as_tuple(values) -> tuple[float, ...]:
    return tuple(float(v) for v in np.atleast_1d(np.asarray(values, dtype=float)))


def _points(points, dim: int) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1) if dim > 1 or pts.size == 1 else pts.reshape(-1, 1)
    if pts.shape[-1] != dim:
        raise DomainError(f"points have dimension {pts.shape[-1]}, expected {dim}")
    return pts


def unit_ball_volume(m: int) -> float:
    """Lebesgue measure of the unit ball in ``R^m`` (``m = 0`` gives 1).

    Uses ``omega_m = omega_{m-2} 2 pi / m`` so that ``omega_1 = 2`` and
    ``omega_2 = pi`` come out exact.
    """
    w = 1.0 if m % 2 == 0 else 2.0
    for j in range(2 + m % 2, m + 1, 2):
        w *= 2 * math.pi / j
    return w


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Closed axis-parallel box ``[lower, upper]`` in ``R^N``."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo, hi = _as_tuple(self.lower), _as_tuple(self.upper)
        if len(lo) != len(hi) or len(lo) == 0:
            raise ParameterError("lower and upper corners must have the same dimension")
        if not all(a < b for a, b in zip(lo, hi)):
            raise ParameterError(f"degenerate box: lower={lo} upper={hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def cube(cls, center, side: float) -> "Box":
        c = np.asarray(center, dtype=float).reshape(-1)
        return cls(c - side / 2, c + side / 2)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def sides(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    @property
    def center(self) -> np.ndarray:
        return (np.asarray(self.upper) + np.asarray(self.lower)) / 2

    @property
    def measure(self) -> float:
        return float(np.prod(self.sides))

    @property
    def bounding_box(self) -> "Box":
        return self

    def contains(self, points) -> np.ndarray:
        pts = _points(points, self.dim)
        return np.all((pts >= self.lower) & (pts <= self.upper), axis=-1)

    def contains_box(self, other: "Box", tol: float = _TOL) -> bool:
        scale = tol * max(1.0, float(np.max(np.abs(self.sides))))
        return bool(
            np.all(np.asarray(other.lower) >= np.asarray(self.lower) - scale)
            and np.all(np.asarray(other.upper) <= np.asarray(self.upper) + scale)
        )

    def intersect(self, other: "Box") -> "Box | None":
        lo = np.maximum(self.lower, other.lower)
        hi = np.minimum(self.upper, other.upper)
        if np.any(hi <= lo):
            return None
        return Box(lo, hi)

    def overlap_measure(self, other: "Box") -> float:
        lo = np.maximum(self.lower, other.lower)
        hi = np.minimum(self.upper, other.upper)
        return float(np.prod(np.clip(hi - lo, 0.0, None)))

    def translate(self, t) -> "Box":
        t = np.asarray(t, dtype=float)
        return Box(np.asarray(self.lower) + t, np.asarray(self.upper) + t)

    def scale(self, s: float) -> "Box":
        return Box(np.asarray(self.lower) * s, np.asarray(self.upper) * s)

    def cube_fractions(self, centers, side: float, samples: int = 8) -> np.ndarray:
        c = _points(centers, self.dim)
        lo = np.maximum(c - side / 2, self.lower)
        hi = np.minimum(c + side / 2, self.upper)
        return np.prod(np.clip(hi - lo, 0.0, None) / side, axis=-1)


@dataclass(frozen=True)
class Cylinder:
    """``base x (a, b)`` with the axis along the last coordinate."""

    base: Box
    a: float
    b: float

    def __post_init__(self):
        if not self.b > self.a:
            raise ParameterError(f"cylinder interval must satisfy b > a, got ({self.a}, {self.b})")

    @property
    def dim(self) -> int:
        return self.base.dim + 1

    @property
    def measure(self) -> float:
        return self.base.measure * (self.b - self.a)

    def as_box(self) -> Box:
        return Box(self.base.lower + (self.a,), self.base.upper + (self.b,))

    @property
    def bounding_box(self) -> Box:
        return self.as_box()

    def contains(self, points) -> np.ndarray:
        return self.as_box().contains(points)

    def cube_fractions(self, centers, side: float, samples: int = 8) -> np.ndarray:
        return self.as_box().cube_fractions(centers, side)


@dataclass(frozen=True)
class Slab:
    """The unbounded layer ``R^(N-1) x (a, b)``."""

    a: float
    b: float
    dim: int = 2

    def __post_init__(self):
        if not self.b > self.a:
            raise ParameterError(f"slab interval must satisfy b > a, got ({self.a}, {self.b})")
        if self.dim < 1:
            raise ParameterError("dimension must be >= 1")

    @property
    def measure(self) -> float:
        return float(self.b - self.a) if self.dim == 1 else math.inf

    @property
    def bounding_box(self) -> Box:
        if self.dim == 1:
            return Box((self.a,), (self.b,))
        raise DomainError("a slab is unbounded; truncate it first")

    def truncate(self, half_width: float) -> Box:
        """Restrict to ``[-half_width, half_width]^(N-1) x (a, b)``."""
        w = float(half_width)
        return Box((-w,) * (self.dim - 1) + (self.a,), (w,) * (self.dim - 1) + (self.b,))

    def contains(self, points) -> np.ndarray:
        pts = _points(points, self.dim)
        return (pts[:, -1] >= self.a) & (pts[:, -1] <= self.b)

    def cube_fractions(self, centers, side: float, samples: int = 8) -> np.ndarray:
        c = _points(centers, self.dim)[:, -1]
        lo = np.maximum(c - side / 2, self.a)
        hi = np.minimum(c + side / 2, self.b)
        return np.clip(hi - lo, 0.0, None) / side


def _halfspace_unit_cube_volume(a: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Volume of ``{u in [0,1]^m : a.u < c}`` for rows of positive ``a``."""
    k, m = a.shape
    out = np.zeros(k)
    for v in itertools.product((0, 1), repeat=m):
        v = np.asarray(v, dtype=float)
        sign = -1.0 if int(v.sum()) % 2 else 1.0
        out += sign * np.clip(c - a @ v, 0.0, None) ** m
    return out / (math.factorial(m) * np.prod(a, axis=1))


@dataclass(frozen=True)
class HalfSpace:
    """``{x : normal . x < offset}``; fractions against boxes are exact."""

    normal: tuple[float, ...]
    offset: float

    def __post_init__(self):
        n = _as_tuple(self.normal)
        if not any(v != 0 for v in n):
            raise ParameterError("half-space normal must be nonzero")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def below(cls, axis: int, level: float, dim: int) -> "HalfSpace":
        """The axis-aligned half-space ``{x_axis < level}``."""
        n = np.zeros(dim)
        n[axis] = 1.0
        return cls(tuple(n), level)

    @property
    def dim(self) -> int:
        return len(self.normal)

    @property
    def measure(self) -> float:
        return math.inf

    @property
    def bounding_box(self) -> Box:
        raise DomainError("a half-space is unbounded; intersect it with a box")

    def contains(self, points) -> np.ndarray:
        return _points(points, self.dim) @ np.asarray(self.normal) < self.offset

    def box_fractions(self, lower, upper) -> np.ndarray:
        lo = _points(lower, self.dim)
        hi = _points(upper, self.dim)
        n = np.asarray(self.normal)
        coef = n * (hi - lo)
        c = self.offset - lo @ n - np.where(coef < 0, coef, 0.0).sum(axis=1)
        coef = np.abs(coef)
        # the vertex formula cancels catastrophically for tiny coefficients;
        # such axes barely tilt the plane, so fold their mean into the offset
        small = coef <= 1e-7 * coef.max(axis=1, keepdims=True)
        c = c - 0.5 * np.where(small, coef, 0.0).sum(axis=1)
        frac = np.empty(len(c))
        for pattern in np.unique(small, axis=0):
            rows = np.all(small == pattern, axis=1)
            keep = ~pattern
            if keep.any():
                frac[rows] = _halfspace_unit_cube_volume(coef[rows][:, keep], c[rows])
            else:
                frac[rows] = (c[rows] > 0).astype(float)
        return np.clip(frac, 0.0, 1.0)

    def cube_fractions(self, centers, side: float, samples: int = 8) -> np.ndarray:
        c = _points(centers, self.dim)
        return self.box_fractions(c - side / 2, c + side / 2)

    def intersect_box(self, box: Box) -> "Box | None":
        """Exact intersection when the normal is a coordinate direction."""
        n = np.asarray(self.normal)
        axes = np.flatnonzero(n)
        if len(axes) != 1:
            raise DomainError("only axis-aligned half-spaces intersect boxes exactly")
        ax = int(axes[0])
        lo, hi = list(box.lower), list(box.upper)
        level = self.offset / n[ax]
        if n[ax] > 0:
            hi[ax] = min(hi[ax], level)
        else:
            lo[ax] = max(lo[ax], level)
        if hi[ax] <= lo[ax]:
            return None
        return Box(lo, hi)


@dataclass(frozen=True)
class Ball:
    """Open Euclidean ball; cube fractions use deterministic subsampling."""

    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as_tuple(self.center))
        if not self.radius > 0:
            raise ParameterError("radius must be positive")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def measure(self) -> float:
        return unit_ball_volume(self.dim) * self.radius**self.dim

    @property
    def bounding_box(self) -> Box:
        c = np.asarray(self.center)
        return Box(c - self.radius, c + self.radius)

    def contains(self, points) -> np.ndarray:
        d = _points(points, self.dim) - np.asarray(self.center)
        return np.einsum("ij,ij->i", d, d) < self.radius**2

    def cube_fractions(self, centers, side: float, samples: int = 8) -> np.ndarray:
        return _subsampled_fractions(self, centers, side, samples)


@dataclass(frozen=True)
class BoxUnion:
    """Finite union of boxes with pairwise disjoint interiors (may be empty)."""

    boxes: tuple[Box, ...] = ()
    dim: int = 0

    def __post_init__(self):
        boxes = tuple(self.boxes)
        dim = self.dim or (boxes[0].dim if boxes else 0)
        if dim <= 0:
            raise ParameterError("an empty union needs an explicit dimension")
        if any(b.dim != dim for b in boxes):
            raise ParameterError("all boxes must share one dimension")
        for p, q in itertools.combinations(boxes, 2):
            if p.overlap_measure(q) > 0:
                raise PreconditionError("boxes in a BoxUnion must have disjoint interiors")
        object.__setattr__(self, "boxes", boxes)
        object.__setattr__(self, "dim", dim)

    @property
    def measure(self) -> float:
        return float(sum(b.measure for b in self.boxes))

    @property
    def bounding_box(self) -> Box:
        if not self.boxes:
            raise DomainError("the empty set has no bounding box")
        lo = np.min([b.lower for b in self.boxes], axis=0)
        hi = np.max([b.upper for b in self.boxes], axis=0)
        return Box(lo, hi)

    def contains(self, points) -> np.ndarray:
        pts = _points(points, self.dim)
        out = np.zeros(len(pts), dtype=bool)
        for b in self.boxes:
            out |= b.contains(pts)
        return out

    def cube_fractions(self, centers, side: float, samples: int = 8) -> np.ndarray:
        c = _points(centers, self.dim)
        out = np.zeros(len(c))
        for b in self.boxes:
            out += b.cube_fractions(c, side)
        return np.clip(out, 0.0, 1.0)


Region = Union[Box, Cylinder, Slab, HalfSpace, Ball, BoxUnion]


def _subsampled_fractions(region, centers, side: float, samples: int) -> np.ndarray:
    if samples < 1:
        raise ParameterError("samples per axis must be >= 1")
    c = _points(centers, region.dim)
    ticks = (np.arange(samples) + 0.5) / samples - 0.5
    offs = np.stack(np.meshgrid(*([ticks] * region.dim), indexing="ij"), axis=-1)
    offs = offs.reshape(-1, region.dim) * side
    out = np.empty(len(c))
    chunk = max(1, 2**20 // len(offs))
    for s in range(0, len(c), chunk):
        pts = (c[s : s + chunk, None, :] + offs[None, :, :]).reshape(-1, region.dim)
        out[s : s + chunk] = region.contains(pts).reshape(-1, len(offs)).mean(axis=1)
    return out


def measure(region) -> float:
    """Exact Lebesgue measure of a region or grid set."""
    return float(region.measure)


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Grid:
    """Uniform cell decomposition of a box; cells are indexed C-order."""

    box: Box
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in np.atleast_1d(self.counts))
        if len(counts) != self.box.dim:
            raise ParameterError("one cell count per axis is required")
        if any(c < 1 for c in counts):
            raise ParameterError("cell counts must be >= 1")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def uniform(cls, box: Box, n: int) -> "Grid":
        return cls(box, (int(n),) * box.dim)

    @property
    def dim(self) -> int:
        return self.box.dim

    @property
    def h(self) -> np.ndarray:
        return self.box.sides / np.asarray(self.counts)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def axis_edges(self, k: int) -> np.ndarray:
        return np.linspace(self.box.lower[k], self.box.upper[k], self.counts[k] + 1)

    def axis_centers(self, k: int) -> np.ndarray:
        lo = self.box.lower[k]
        return lo + (np.arange(self.counts[k]) + 0.5) * self.h[k]

    def centers(self) -> np.ndarray:
        """Cell centers as an ``(size, N)`` array in C order."""
        axes = [self.axis_centers(k) for k in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)


@dataclass(frozen=True, eq=False)
class GridSet:
    """A union of grid cells given by a boolean membership array."""

    grid: Grid
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool).reshape(self.grid.counts)
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    @classmethod
    def from_region(cls, grid: Grid, region) -> "GridSet":
        return cls(grid, region.contains(grid.centers()).reshape(grid.counts))

    @classmethod
    def empty(cls, grid: Grid) -> "GridSet":
        return cls(grid, np.zeros(grid.counts, dtype=bool))

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def measure(self) -> float:
        return int(self.mask.sum()) * self.grid.cell_volume

    @property
    def bounding_box(self) -> Box:
        return self.grid.box

    def contains(self, points) -> np.ndarray:
        pts = _points(points, self.dim)
        lo = np.asarray(self.grid.box.lower)
        idx = np.floor((pts - lo) / self.grid.h).astype(int)
        counts = np.asarray(self.grid.counts)
        # closed upper faces belong to the last cell
        idx = np.where(np.isclose(pts, self.grid.box.upper) & (idx == counts), counts - 1, idx)
        inside = np.all((idx >= 0) & (idx < counts), axis=-1)
        out = np.zeros(len(pts), dtype=bool)
        out[inside] = self.mask[tuple(idx[inside].T)]
        return out

    def lattice_masses(self, axis_lower: Sequence[np.ndarray], axis_upper: Sequence[np.ndarray]) -> np.ndarray:
        """``|A n Q|`` for the tensor family of boxes given per axis."""
        out = self.mask.astype(float)
        for k in range(self.dim):
            e = self.grid.axis_edges(k)
            lo = np.maximum(np.asarray(axis_lower[k])[:, None], e[None, :-1])
            hi = np.minimum(np.asarray(axis_upper[k])[:, None], e[None, 1:])
            out = np.tensordot(np.clip(hi - lo, 0.0, None), out, axes=([1], [k]))
            out = np.moveaxis(out, 0, k)
        return out

    def box_mass(self, box: Box) -> float:
        masses = self.lattice_masses(
            [np.array([box.lower[k]]) for k in range(self.dim)],
            [np.array([box.upper[k]]) for k in range(self.dim)],
        )
        return float(masses.reshape(-1)[0])

    def cube_fractions(self, centers, side: float, samples: int = 8) -> np.ndarray:
        c = _points(centers, self.dim)
        out = np.empty(len(c))
        for i, ci in enumerate(c):
            out[i] = self.box_mass(Box.cube(ci, side)) / side**self.dim
        return out


SetLike = Union[Region, GridSet]


def cell_fraction(s: SetLike, cube: Box, samples: int = 8) -> float:
    """``|A n Q| / |Q|`` for a region (exact where possible) or a grid set.

    Grid sets are resolved cell by cell, which is exact for the piecewise
    constant set they represent.  Balls are subsampled at ``samples**N``
    points per cube.
    """
    if isinstance(s, GridSet):
        if not s.grid.box.contains_box(cube):
            raise DomainError("cube is not contained in the grid domain")
        return s.box_mass(cube) / cube.measure
    if isinstance(s, HalfSpace):
        return float(s.box_fractions(np.asarray(cube.lower)[None], np.asarray(cube.upper)[None])[0])
    if isinstance(s, (Box, Cylinder, BoxUnion)):
        boxes = [s.as_box()] if isinstance(s, Cylinder) else ([s] if isinstance(s, Box) else s.boxes)
        return sum(b.overlap_measure(cube) for b in boxes) / cube.measure
    if isinstance(s, Slab):
        lo, hi = max(cube.lower[-1], s.a), min(cube.upper[-1], s.b)
        return max(hi - lo, 0.0) / (cube.upper[-1] - cube.lower[-1])
    sides = cube.sides
    if np.allclose(sides, sides[0]):
        return float(s.cube_fractions(cube.center[None], float(sides[0]), samples)[0])
    ticks = [cube.lower[k] + (np.arange(samples) + 0.5) * sides[k] / samples for k in range(cube.dim)]
    pts = np.stack([m.reshape(-1) for m in np.meshgrid(*ticks, indexing="ij")], axis=-1)
    return float(s.contains(pts).mean())


# ---------------------------------------------------------------------------
# Lattice families and the cube census
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeFamily:
    """Cubes of side ``r`` centred on ``r Z^N`` (shift 0) or on ``r(Z^N + e_i/2)``."""

    r: float
    shift: int
    dim: int

    def __post_init__(self):
        if not self.r > 0:
            raise ParameterError("cube side must be positive")
        if not 0 <= self.shift <= self.dim:
            raise ParameterError(f"shift index must lie in 0..{self.dim}")

    def axis_centers(self, window: Box) -> list[np.ndarray]:
        """Per-axis centres of the cubes lying entirely inside ``window``."""
        out = []
        for k in range(self.dim):
            off = 0.5 if self.shift == k + 1 else 0.0
            lo = (window.lower[k] + self.r / 2) / self.r - off
            hi = (window.upper[k] - self.r / 2) / self.r - off
            h0 = math.ceil(lo - 1e-9)
            h1 = math.floor(hi + 1e-9)
            out.append((np.arange(h0, h1 + 1) + off) * self.r)
        return out

    def centers(self, window: Box) -> np.ndarray:
        axes = self.axis_centers(window)
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1) if mesh[0].size else np.zeros((0, self.dim))


def lattice_fractions(s: SetLike, family: LatticeFamily, window: Box, samples: int = 8) -> np.ndarray:
    """Volume fractions of ``s`` on every family cube inside ``window``.

    The result has one axis per coordinate, matching
    :meth:`LatticeFamily.axis_centers`.
    """
    if s.dim != family.dim or window.dim != family.dim:
        raise ParameterError("set, family and window dimensions differ")
    axes = family.axis_centers(window)
    shape = tuple(len(a) for a in axes)
    if 0 in shape:
        return np.zeros(shape)
    r = family.r
    if isinstance(s, GridSet):
        if not s.grid.box.contains_box(window):
            raise DomainError("census window is not contained in the grid domain")
        masses = s.lattice_masses([a - r / 2 for a in axes], [a + r / 2 for a in axes])
        return np.clip(masses / r**family.dim, 0.0, 1.0)
    centers = family.centers(window)
    return s.cube_fractions(centers, r, samples).reshape(shape)


def _check_threshold(a: float) -> None:
    if not 0 < a < 0.25:
        raise ParameterError(f"census threshold a must lie in (0, 1/4), got {a}")


def cube_census(s: SetLike, family: LatticeFamily, a: float, window: Box, samples: int = 8) -> int:
    """Number of family cubes inside ``window`` whose fraction lies in ``(a, 1-a)``."""
    _check_threshold(a)
    f = lattice_fractions(s, family, window, samples)
    return int(np.count_nonzero((f > a) & (f < 1 - a)))


def census_counts(s: SetLike, r: float, a: float, window: Box, samples: int = 8) -> list[int]:
    """Census counts for every shift ``i = 0..N``."""
    return [cube_census(s, LatticeFamily(r, i, s.dim), a, window, samples) for i in range(s.dim + 1)]


@dataclass(frozen=True, eq=False)
class CensusApproximation:
    """The cube-union set ``A_r`` together with its face-counted perimeter.

    ``interior_perimeter`` counts faces shared by a member cube and a
    non-member lattice cube inside the window; ``perimeter`` also counts
    member faces on the outer boundary of the window lattice.
    """

    approx: GridSet
    r: float
    a: float
    fractions: np.ndarray = field(repr=False)
    perimeter: float
    interior_perimeter: float
    symmetric_difference: float


def census_approximation(s: SetLike, r: float, a: float, window: Box, samples: int = 8) -> CensusApproximation:
    """Union of shift-0 cubes with fraction ``>= 1 - a`` and its exact perimeter."""
    _check_threshold(a)
    fam = LatticeFamily(r, 0, s.dim)
    axes = fam.axis_centers(window)
    if any(len(ax) == 0 for ax in axes):
        raise DomainError("no lattice cube fits inside the window")
    frac = lattice_fractions(s, fam, window, samples)
    member = frac >= 1 - a
    box = Box([ax[0] - r / 2 for ax in axes], [ax[-1] + r / 2 for ax in axes])
    grid = Grid(box, member.shape)
    face = r ** (s.dim - 1)
    interior = 0
    boundary = 0
    for k in range(s.dim):
        m = np.moveaxis(member, k, 0)
        interior += int(np.count_nonzero(m[1:] != m[:-1]))
        boundary += int(np.count_nonzero(m[0])) + int(np.count_nonzero(m[-1]))
    vol = r**s.dim
    symdiff = float(((1 - frac) * member).sum() + (frac * ~member).sum()) * vol
    return CensusApproximation(
        approx=GridSet(grid, member),
        r=r,
        a=a,
        fractions=frac,
        perimeter=(interior + boundary) * face,
        interior_perimeter=interior * face,
        symmetric_difference=symdiff,
    )


def face_mapping_bound(counts: Sequence[int], r: float, dim: int) -> float:
    """Upper bound ``2 * 2^N (N+1) r^(N-1) sum_i census_i`` on the interior perimeter."""
    return 2 * 2**dim * (dim + 1) * r ** (dim - 1) * float(sum(counts))


def checkerboard(grid: Grid) -> GridSet:
    """Alternating cell membership, a set whose census does not stay bounded."""
    idx = np.indices(grid.counts).sum(axis=0)
    return GridSet(grid, idx % 2 == 0)


def jump_area(values: np.ndarray, grid: Grid) -> float:
    """``H^(N-1)`` measure of the faces between cells with different values."""
    v = np.asarray(values).reshape(grid.counts)
    h = grid.h
    total = 0.0
    for k in range(grid.dim):
        m = np.moveaxis(v, k, 0)
        face = float(np.prod(np.delete(h, k)))
        total += int(np.count_nonzero(m[1:] != m[:-1])) * face
    return total
