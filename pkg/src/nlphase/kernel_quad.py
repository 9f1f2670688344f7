"""Numerical estimators of the pair energy ``G(A, B, S)``.

Two independent routes are provided: a cell-midpoint rule with recursive
dyadic refinement of close cell pairs, and a plain Monte Carlo sample mean.
Both only need the sets to be meshable (boxes, unions of boxes, grid sets,
or bounded regions with a membership test) and to stay apart.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ParameterError, PreconditionError, SamplingError
from .geometry import Box, BoxUnion, Cylinder, GridSet, HalfSpace, Slab
from .kernel_exact import SlabPairConfig, unit_ball_area

_CHUNK = 1 << 21


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature settings.

    ``resolution`` is the number of cells per unit length used to mesh
    regions (grid sets keep their own cells).  Cell pairs whose centres are
    closer than ``kappa`` times the larger cell side are split dyadically,
    at most ``depth`` times.
    """

    scheme: str = "midpoint"
    resolution: int = 32
    samples: int = 200_000
    depth: int = 6
    kappa: float = 3.0
    seed: int = 0

    def __post_init__(self):
        if self.scheme not in ("midpoint", "mc"):
            raise ParameterError(f"unknown scheme {self.scheme!r}")
        if self.resolution < 2:
            raise ParameterError("resolution must be >= 2")
        if self.depth < 0:
            raise ParameterError("refinement depth must be >= 0")
        if self.samples < 2:
            raise ParameterError("need at least two samples")
        if not self.kappa > 0:
            raise ParameterError("kappa must be positive")


@dataclass(frozen=True)
class EnergyEstimate:
    value: float
    error: float
    tail: float = 0.0
    evaluations: int = 0
    reliable: bool = True
    scheme: str = "midpoint"

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "EnergyEstimate":
        return cls(**data)


# ---------------------------------------------------------------------------
# meshing
# ---------------------------------------------------------------------------


def _mesh_local(box: Box, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Cell centres of ``box`` relative to its lower corner, and cell sides."""
    counts = [max(1, math.ceil(s * resolution - 1e-9)) for s in box.sides]
    h = box.sides / np.asarray(counts)
    axes = [(np.arange(c) + 0.5) * h[k] for k, c in enumerate(counts)]
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    return centers, np.broadcast_to(h, centers.shape).copy()


def _bounded_box(x, s) -> Box | None:
    """Exact box for ``x n s`` when both are box-like, else ``None``."""
    if isinstance(x, Cylinder):
        x = x.as_box()
    if isinstance(s, Cylinder):
        s = s.as_box()
    if isinstance(x, Box):
        return x if s is None else (x.intersect(s) if isinstance(s, Box) else None)
    if isinstance(s, Box):
        if isinstance(x, Slab):
            return _slab_box(x, s)
        if isinstance(x, HalfSpace) and np.count_nonzero(x.normal) == 1:
            return x.intersect_box(s)
    return None


def _slab_box(x: Slab, s: Box) -> Box | None:
    lo, hi = list(s.lower), list(s.upper)
    lo[-1], hi[-1] = max(lo[-1], x.a), min(hi[-1], x.b)
    return Box(lo, hi) if hi[-1] > lo[-1] else None


def mesh_local(x, s=None, spec: QuadSpec = QuadSpec()) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Anchor corner, anchor-relative cell centres and cell sides covering ``x n s``.

    Local coordinates depend only on differences of the input coordinates,
    so an exact translation of the input moves the anchor and nothing else.
    """
    dim = x.dim
    empty = (np.zeros(dim), np.zeros((0, dim)), np.zeros((0, dim)))
    if isinstance(x, GridSet):
        g = x.grid
        anchor = np.asarray(g.box.lower, dtype=float)
        axes = [(np.arange(c) + 0.5) * g.h[k] for k, c in enumerate(g.counts)]
        local = np.stack([m.reshape(-1) for m in np.meshgrid(*axes, indexing="ij")], axis=-1)
        local = local[x.mask.reshape(-1)]
        sizes = np.broadcast_to(g.h, local.shape).copy()
    elif isinstance(x, BoxUnion):
        boxes = [b if s is None or not isinstance(s, Box) else b.intersect(s) for b in x.boxes]
        boxes = [b for b in boxes if b is not None]
        if not boxes:
            return empty
        anchor = np.asarray(boxes[0].lower, dtype=float)
        parts = []
        for b in boxes:
            loc, h = _mesh_local(b, spec.resolution)
            parts.append((np.asarray(b.lower) - anchor + loc, h))
        local = np.concatenate([q[0] for q in parts])
        sizes = np.concatenate([q[1] for q in parts])
    else:
        box = _bounded_box(x, s)
        if box is not None:
            anchor = np.asarray(box.lower, dtype=float)
            local, sizes = _mesh_local(box, spec.resolution)
            s = None if isinstance(s, (Box, Cylinder)) else s
        else:
            if s is not None and not isinstance(s, (Slab, HalfSpace)):
                bb = s.bounding_box
                if bb is not None and x.bounding_box is not None:
                    bb = bb.intersect(x.bounding_box)
            else:
                bb = x.bounding_box
            if bb is None:
                return empty
            anchor = np.asarray(bb.lower, dtype=float)
            local, sizes = _mesh_local(bb, spec.resolution)
            keep = x.contains(anchor + local)
            local, sizes = local[keep], sizes[keep]
    if s is not None and (not isinstance(s, Box) or isinstance(x, GridSet)):
        keep = s.contains(anchor + local)
        local, sizes = local[keep], sizes[keep]
    return anchor, local, sizes


def mesh(x, s=None, spec: QuadSpec = QuadSpec()) -> tuple[np.ndarray, np.ndarray]:
    """Cell centres and sides covering ``x n s``."""
    anchor, local, sizes = mesh_local(x, s, spec)
    return anchor + local, sizes


def common_frame(a, b, s=None, spec: QuadSpec = QuadSpec()):
    """Meshes of ``a`` and ``b`` in a shared frame at the corner ``min(anchor_a, anchor_b)``.

    The frame is symmetric in ``a, b`` and moves with exact translations, so
    the pair sum built on it is exactly symmetric and translation invariant.
    """
    oa, la, ha = mesh_local(a, s, spec)
    ob, lb, hb = mesh_local(b, s, spec)
    m = np.minimum(oa, ob)
    return la + (oa - m), ha, lb + (ob - m), hb, m


# ---------------------------------------------------------------------------
# refined midpoint pair sum
# ---------------------------------------------------------------------------


def _far_terms(diff: np.ndarray, ha: np.ndarray, hb: np.ndarray, p: int):
    """Midpoint values and leading-order bias estimates for separated pairs."""
    r2 = np.einsum("...k,...k->...", diff, diff)
    vol = np.prod(ha, axis=-1) * np.prod(hb, axis=-1)
    val = vol * r2 ** (-p / 2)
    curv = ((ha**2 + hb**2) * ((p + 2) * diff**2 / r2[..., None] - 1)).sum(axis=-1)
    bias = val * p * curv / (24 * r2)
    return val, bias


def _touching(diff, ha, hb) -> np.ndarray:
    gap = np.clip(np.abs(diff) - (ha + hb) / 2, 0.0, None)
    return np.all(gap <= 1e-14 * (ha + hb), axis=-1)


class _Accumulator:
    def __init__(self):
        self.parts: list[float] = []
        self.bias: list[float] = []
        self.count = 0
        self.unreliable = False

    def add(self, val: np.ndarray, bias: np.ndarray):
        if val.size:
            self.parts.append(float(np.sum(val)))
            self.bias.append(float(np.sum(bias)))
            self.count += int(val.size)

    @property
    def total(self) -> float:
        return math.fsum(self.parts)

    @property
    def bias_total(self) -> float:
        return math.fsum(self.bias)


def _children(c: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = c.shape[-1]
    signs = np.array(list(itertools.product((-0.25, 0.25), repeat=n)))
    cc = c[:, None, :] + signs[None, :, :] * h[:, None, :]
    hh = np.broadcast_to(h[:, None, :] / 2, cc.shape)
    return cc, hh


def _refine(pa, ha, pb, hb, depth, kappa, p, acc: _Accumulator):
    n = pa.shape[-1]
    k = 2**n
    step = max(1, _CHUNK // (k * k))
    for s in range(0, len(pa), step):
        ca, hca = _children(pa[s : s + step], ha[s : s + step])
        cb, hcb = _children(pb[s : s + step], hb[s : s + step])
        da = ca[:, :, None, :]
        db = cb[:, None, :, :]
        diff = (da - db).reshape(-1, n)
        ha2 = np.broadcast_to(hca[:, :, None, :], (len(ca), k, k, n)).reshape(-1, n)
        hb2 = np.broadcast_to(hcb[:, None, :, :], (len(ca), k, k, n)).reshape(-1, n)
        _split(diff, ha2, hb2, depth, kappa, p, acc,
               np.broadcast_to(da, (len(ca), k, k, n)).reshape(-1, n),
               np.broadcast_to(db, (len(ca), k, k, n)).reshape(-1, n))


def _split(diff, ha, hb, depth, kappa, p, acc, ca, cb):
    hmax = np.maximum(ha.max(axis=-1), hb.max(axis=-1))
    r = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    near = r < kappa * hmax
    if depth <= 0:
        if np.any(near & _touching(diff, ha, hb)):
            acc.unreliable = True
        val, bias = _far_terms(diff, ha, hb, p)
        acc.add(val, bias)
        return
    far = ~near
    val, bias = _far_terms(diff[far], ha[far], hb[far], p)
    acc.add(val, bias)
    if np.any(near):
        _refine(ca[near], ha[near], cb[near], hb[near], depth - 1, kappa, p, acc)


def pair_sum(ca, ha, cb, hb, depth: int, kappa: float) -> _Accumulator:
    """Refined midpoint sum of ``|x - y|^-(N+1)`` over two cell lists."""
    n = ca.shape[-1]
    p = n + 1
    acc = _Accumulator()
    if len(ca) == 0 or len(cb) == 0:
        return acc
    rows = max(1, _CHUNK // len(cb))
    for s in range(0, len(ca), rows):
        a = ca[s : s + rows]
        diff = (a[:, None, :] - cb[None, :, :]).reshape(-1, n)
        h1 = np.broadcast_to(ha[s : s + rows][:, None, :], (len(a), len(cb), n)).reshape(-1, n)
        h2 = np.broadcast_to(hb[None, :, :], (len(a), len(cb), n)).reshape(-1, n)
        c1 = np.broadcast_to(a[:, None, :], (len(a), len(cb), n)).reshape(-1, n)
        c2 = np.broadcast_to(cb[None, :, :], (len(a), len(cb), n)).reshape(-1, n)
        _split(diff, h1, h2, depth, kappa, p, acc, c1, c2)
    return acc


def _canonical(ca, ha, cb, hb):
    """Order the two cell lists so the sum is symmetric and shift-invariant.

    Keys use coordinates relative to each list's own minimum, which are
    bit-identical under any translation that moves the centres exactly.
    Congruent lists are ordered by the sign of their offset.
    """
    if len(ca) == 0 or len(cb) == 0:
        return ca, ha, cb, hb

    def key(c, h):
        return (len(c), (c - c.min(axis=0)).tobytes(), h.tobytes())

    ka, kb = key(ca, ha), key(cb, hb)
    if ka == kb:
        off = cb.min(axis=0) - ca.min(axis=0)
        swap = off[np.flatnonzero(off)[0]] < 0
    else:
        swap = kb < ka
    return (cb, hb, ca, ha) if swap else (ca, ha, cb, hb)


def _check_disjoint(a, b, ca, cb):
    if isinstance(a, GridSet) and isinstance(b, GridSet) and a.grid == b.grid:
        if np.any(a.mask & b.mask):
            raise PreconditionError("A and B share grid cells")
        return
    boxes_a, boxes_b = _as_boxes(a), _as_boxes(b)
    if boxes_a is not None and boxes_b is not None:
        if any(p.overlap_measure(q) > 0 for p in boxes_a for q in boxes_b):
            raise PreconditionError("A and B overlap")
        return
    # otherwise: no cell centre of one set may lie inside the other
    if (len(ca) and np.any(b.contains(ca))) or (len(cb) and np.any(a.contains(cb))):
        raise PreconditionError("A and B overlap")


def _as_boxes(x):
    if isinstance(x, Box):
        return [x]
    if isinstance(x, Cylinder):
        return [x.as_box()]
    if isinstance(x, BoxUnion):
        return list(x.boxes)
    return None


def midpoint_pair_energy(a, b, s=None, spec: QuadSpec = QuadSpec()) -> EnergyEstimate:
    """Refined cell-midpoint estimate of ``G(A, B, S)``.

    ``error`` is the magnitude of the summed leading-order midpoint bias.
    Pairs whose cells still touch after ``spec.depth`` refinements make the
    estimate unreliable; the flag is set instead of trusting the value.
    """
    ca, ha, cb, hb, origin = common_frame(a, b, s, spec)
    _check_disjoint(a, b, origin + ca, origin + cb)
    ca, ha, cb, hb = _canonical(ca, ha, cb, hb)
    acc = pair_sum(ca, ha, cb, hb, spec.depth, spec.kappa)
    return EnergyEstimate(
        value=acc.total,
        error=abs(acc.bias_total),
        evaluations=acc.count,
        reliable=not acc.unreliable,
        scheme="midpoint",
    )


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


class _Sampler:
    """Uniform proposals on a set of known measure plus an optional indicator."""

    def __init__(self, x, s):
        self.indicator = None
        self.empty = False
        box = _bounded_box(x, s) if not isinstance(x, (GridSet, BoxUnion)) else None
        if isinstance(x, GridSet):
            self.kind = "grid"
            g = x.grid
            self.centers = g.centers()[x.mask.reshape(-1)]
            self.h = g.h
            self.volume = x.measure
            self.indicator = None if s is None else s.contains
        elif isinstance(x, BoxUnion):
            boxes = list(x.boxes)
            if isinstance(s, Box):
                boxes = [q for q in (bx.intersect(s) for bx in boxes) if q is not None]
            elif s is not None:
                self.indicator = s.contains
            self.kind = "union"
            self.boxes = boxes
            vols = np.array([q.measure for q in boxes])
            self.volume = float(vols.sum())
            self.weights = vols / self.volume if self.volume > 0 else vols
        elif box is not None or (isinstance(x, (Box, Cylinder)) and box is None):
            self.kind = "box"
            self.box = box
            self.volume = 0.0 if box is None else box.measure
            if s is not None and not isinstance(s, (Box, Cylinder)):
                self.indicator = s.contains
        else:
            self.kind = "box"
            if s is not None and isinstance(s, (Box, Cylinder)):
                bb = s.bounding_box if isinstance(s, Box) else s.as_box()
                if not isinstance(x, (Slab, HalfSpace)):
                    bb = bb.intersect(x.bounding_box)
                self.box = bb
                self.indicator = x.contains
            else:
                self.box = x.bounding_box
                if s is None:
                    self.indicator = x.contains
                else:
                    self.indicator = lambda p, x=x, s=s: x.contains(p) & s.contains(p)
            self.volume = 0.0 if self.box is None else self.box.measure
        self.empty = self.volume == 0.0 or (self.kind == "grid" and len(self.centers) == 0)

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "grid":
            idx = rng.integers(0, len(self.centers), size=n)
            return self.centers[idx] + (rng.random((n, len(self.h))) - 0.5) * self.h
        if self.kind == "union":
            which = rng.choice(len(self.boxes), size=n, p=self.weights)
            lo = np.array([q.lower for q in self.boxes])[which]
            hi = np.array([q.upper for q in self.boxes])[which]
            return lo + rng.random(lo.shape) * (hi - lo)
        lo, hi = np.asarray(self.box.lower), np.asarray(self.box.upper)
        return lo + rng.random((n, len(lo))) * (hi - lo)


def _set_key(x) -> str:
    if isinstance(x, GridSet):
        return repr(x.grid) + x.mask.tobytes().hex()
    return repr(x)


def stream(seed: int, block: int) -> np.random.Generator:
    """Counter-based generator for sample block ``block`` of stream ``seed``."""
    return np.random.Generator(np.random.Philox(key=int(seed)).jumped(int(block)))


def mc_pair_energy(a, b, s=None, spec: QuadSpec = QuadSpec(scheme="mc")) -> EnergyEstimate:
    """Sample-mean estimate of ``G(A, B, S)`` with its standard error.

    Pairs ``(x, y)`` are drawn uniformly from proposal sets for ``A`` and
    ``B``; the estimator is unbiased and reproducible for a fixed seed.
    """
    if _set_key(b) < _set_key(a):
        a, b = b, a
    sa, sb = _Sampler(a, s), _Sampler(b, s)
    if sa.empty or sb.empty:
        return EnergyEstimate(0.0, 0.0, evaluations=0, scheme="mc")
    n_dim = a.dim
    p = n_dim + 1
    scale = sa.volume * sb.volume
    block = 1 << 16
    total = 0.0
    total_sq = 0.0
    accepted = 0
    drawn = 0
    for i, start in enumerate(range(0, spec.samples, block)):
        m = min(block, spec.samples - start)
        rng = stream(spec.seed, i)
        x = sa.draw(rng, m)
        y = sb.draw(rng, m)
        w = np.ones(m, dtype=bool)
        if sa.indicator is not None:
            w &= sa.indicator(x)
        if sb.indicator is not None:
            w &= sb.indicator(y)
        diff = x - y
        r2 = np.einsum("ij,ij->i", diff, diff)
        f = np.zeros(m)
        f[w] = r2[w] ** (-p / 2)
        total += float(np.sum(f))
        total_sq += float(np.sum(f * f))
        accepted += int(w.sum())
        drawn += m
    if (sa.indicator is not None or sb.indicator is not None) and accepted < 1e-3 * drawn:
        raise SamplingError(f"acceptance rate {accepted / drawn:.2e} is below 1e-3")
    mean = total / drawn
    var = max(total_sq / drawn - mean * mean, 0.0) * drawn / (drawn - 1)
    return EnergyEstimate(
        value=scale * mean,
        error=scale * math.sqrt(var / drawn),
        evaluations=drawn,
        scheme="mc",
    )


def pair_energy(a, b, s=None, spec: QuadSpec = QuadSpec()) -> EnergyEstimate:
    """Dispatch on ``spec.scheme``."""
    if spec.scheme == "mc":
        return mc_pair_energy(a, b, s, spec)
    return midpoint_pair_energy(a, b, s, spec)


# ---------------------------------------------------------------------------
# slab truncation
# ---------------------------------------------------------------------------


def slab_truncation_tail(r_trunc: float, cfg: SlabPairConfig, base_side: float = 1.0) -> float:
    """Upper bound on the energy a cylinder of side ``base_side`` loses when
    the opposite slab is cut to ``|y'|_inf <= r_trunc``.

    Uses ``|x - y| >= |x' - y'| >= r_trunc - base_side sqrt(N-1)/2`` and the
    lateral integral of ``|z'|^-(N+1)`` outside a ball.
    """
    if not r_trunc > cfg.l:
        raise ParameterError("truncation radius must exceed l")
    n = cfg.n
    if n == 1:
        return 0.0
    rho = r_trunc - base_side * math.sqrt(n - 1) / 2
    if not rho > 0:
        raise ParameterError("truncation radius must exceed the cylinder half-diagonal")
    width = (cfg.l - cfg.d) / 2
    sphere = (n - 1) * unit_ball_area(n - 1)
    return base_side ** (n - 1) * width * width * sphere / (2 * rho**2)


def cylinder_and_truncated_slab(R: float, cfg: SlabPairConfig, lateral_factor: float = 16.0) -> tuple[Box, Box, float]:
    """The cylinder ``Q'_R x (d/2, l/2)``, the slab cut at ``lateral_factor * l`` and the cut radius."""
    n = cfg.n
    half = max(lateral_factor * cfg.l, R)
    cyl = Box((-R / 2,) * (n - 1) + (cfg.d / 2,), (R / 2,) * (n - 1) + (cfg.l / 2,))
    slab = Slab(-cfg.l / 2, -cfg.d / 2, n).truncate(half) if n > 1 else Box((-cfg.l / 2,), (-cfg.d / 2,))
    return cyl, slab, half


def graded_edges(core: float, half: float, h: float, growth: float = 0.125) -> np.ndarray:
    """Cell edges on ``[-half, half]``: uniform width ``h`` on ``[-core, core]``,
    then widths growing like ``growth`` times the distance to the origin."""
    n_core = max(1, math.ceil(2 * core / h - 1e-9))
    inner = np.linspace(-core, core, n_core + 1)
    outer = []
    e = core
    while e < half - 1e-12:
        e = min(half, e + max(h, growth * e))
        outer.append(e)
    outer = np.asarray(outer)
    return np.concatenate([-outer[::-1], inner, outer])


def graded_slab_mesh(a: float, b: float, core: float, half: float, n: int, spec: QuadSpec, growth: float = 0.125):
    """Cells of ``[-half, half]^(N-1) x (a, b)``, refined laterally near ``[-core, core]^(N-1)``."""
    h = 1.0 / spec.resolution
    lat = graded_edges(core, half, h, growth)
    m = max(1, math.ceil((b - a) * spec.resolution - 1e-9))
    ax = np.linspace(a, b, m + 1)
    edges = [lat] * (n - 1) + [ax]
    mids = [0.5 * (e[1:] + e[:-1]) for e in edges]
    widths = [np.diff(e) for e in edges]
    c = np.stack([g.reshape(-1) for g in np.meshgrid(*mids, indexing="ij")], axis=-1)
    w = np.stack([g.reshape(-1) for g in np.meshgrid(*widths, indexing="ij")], axis=-1)
    return c, w


def cylinder_slab_oracle(R: float, cfg: SlabPairConfig, spec: QuadSpec = QuadSpec(), lateral_factor: float = 16.0) -> EnergyEstimate:
    """Quadrature estimate of the cylinder-slab energy with its truncation tail bound.

    The midpoint scheme meshes the truncated slab with lateral cells that
    grow geometrically away from the cylinder; the kernel is smooth there.
    """
    cyl, slab, half = cylinder_and_truncated_slab(R, cfg, lateral_factor)
    tail = slab_truncation_tail(half, cfg, R) if cfg.n > 1 else 0.0
    if spec.scheme == "mc" or cfg.n == 1:
        est = pair_energy(cyl, slab, None, spec)
        return EnergyEstimate(est.value, est.error, tail, est.evaluations, est.reliable, est.scheme)
    ca, ha = mesh(cyl, None, spec)
    cb, hb = graded_slab_mesh(-cfg.l / 2, -cfg.d / 2, R / 2 + cfg.l, half, cfg.n, spec)
    acc = pair_sum(*_canonical(ca, ha, cb, hb), spec.depth, spec.kappa)
    return EnergyEstimate(acc.total, abs(acc.bias_total), tail, acc.count, not acc.unreliable, "midpoint")


def complement_strip(R: float, d: float, l: float, n: int = 2, lateral_factor: float = 16.0) -> BoxUnion:
    """``(Q'_R)^C x (-l/2, -d/2)`` cut at ``|y'|_inf <= lateral_factor * l`` as disjoint boxes."""
    half = max(lateral_factor * l, R)
    boxes = []
    cuts = [(-half, -R / 2), (-R / 2, R / 2), (R / 2, half)]
    for combo in itertools.product(range(3), repeat=n - 1):
        if all(c == 1 for c in combo):
            continue
        lo = [cuts[c][0] for c in combo] + [-l / 2]
        hi = [cuts[c][1] for c in combo] + [-d / 2]
        boxes.append(Box(lo, hi))
    return BoxUnion(tuple(boxes), n)
