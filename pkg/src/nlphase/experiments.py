"""Experiment drivers producing plain result tables (lists of dataclasses)
plus CSV and JSON writers.  Every driver is deterministic given its spec.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .functional import DoubleWell, PhaseField, ScalingSchedule, lambda_of_eps, minimize_F
from .geometry import Ball, Box, Grid, HalfSpace, census_counts, checkerboard
from .kernel_exact import SlabPairConfig, cylinder_slab_energy
from .kernel_quad import QuadSpec, cylinder_slab_oracle, stream
from .profiles import RecoveryConfig, recovery_energy_semianalytic


def default_eps_grid(start: float = 1e-1, stop: float = 1e-4, per_decade: int = 2) -> tuple[float, ...]:
    """Geometric grid from ``start`` down to ``stop`` with ``per_decade`` points per decade."""
    if not (start > stop > 0):
        raise ParameterError("need start > stop > 0")
    lo, hi = math.log10(stop), math.log10(start)
    steps = max(1, round((hi - lo) * per_decade))
    return tuple(float(10 ** (hi - (hi - lo) * s / steps)) for s in range(steps + 1))


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str = "gamma-scan"
    eps: tuple[float, ...] = field(default_factory=default_eps_grid)
    k: float = 1.0
    alpha: float = 0.0
    beta: float = 1.0
    n: int = 2
    R: float = 1.0
    l: float = 1.0
    C: float = 10.0
    resolutions: tuple[int, ...] = (32,)
    configs: int = 50
    samples: int = 200_000
    seed: int = 0
    output: str | None = None

    def __post_init__(self):
        eps = tuple(float(e) for e in self.eps)
        if not eps or any(e <= 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
            raise ParameterError("eps list must be positive and strictly decreasing")
        if self.n not in (1, 2, 3):
            raise ParameterError("N must be 1, 2 or 3")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "resolutions", tuple(int(r) for r in self.resolutions))


@dataclass(frozen=True)
class ScanRow:
    eps: float
    log_lambda: float
    lambda_eps: float
    main: float
    potential: float
    correction_area2: float
    correction_area: float
    total: float
    limit: float
    deviation: float
    k: float
    C: float


def gamma_scan(spec: ExperimentSpec) -> list[ScanRow]:
    """Recovery-energy estimate against the limit value, one row per ``eps``."""
    schedule = ScalingSchedule(spec.k)
    well = DoubleWell(spec.alpha, spec.beta)
    rows = []
    for eps in sorted(spec.eps, reverse=True):
        est = recovery_energy_semianalytic(RecoveryConfig(spec.R, spec.l, eps, schedule, well, spec.n), spec.C)
        rows.append(ScanRow(
            eps=eps,
            log_lambda=est.log_lambda,
            lambda_eps=lambda_of_eps(schedule, eps),
            main=est.main,
            potential=est.potential_bound,
            correction_area2=est.correction_area2,
            correction_area=est.correction_area,
            total=est.total,
            limit=est.limit,
            deviation=est.deviation,
            k=spec.k,
            C=spec.C,
        ))
    return rows


@dataclass(frozen=True)
class OracleRow:
    index: int
    d: float
    l: float
    R: float
    closed_form: float
    midpoint: float
    midpoint_error: float
    tail: float
    monte_carlo: float
    mc_stderr: float
    midpoint_agrees: bool
    mc_agrees: bool


def oracle_agreement(closed: float, est: float, err: float, tail: float, rel: float = 0.01, sigmas: float = 0.0) -> bool:
    """``closed`` within ``rel`` (relative) plus error bars of an estimate on the truncated slab."""
    return bool(est - rel * closed - sigmas * err <= closed <= est + tail + (1 + sigmas) * err + rel * closed)


def oracle_sweep(spec: ExperimentSpec, midpoint_rel: float = 0.01) -> list[OracleRow]:
    """Closed form vs. midpoint and Monte Carlo on random ``(d, l, R)``, ``N = 2``."""
    res = spec.resolutions[0]
    rows = []
    for idx in range(spec.configs):
        rng = stream(spec.seed, idx)
        l = float(rng.uniform(0.5, 4 / 3))
        d = float(l * rng.uniform(0.1, 0.9))
        R = float(rng.uniform(0.5, 2.0))
        cfg = SlabPairConfig(d, l, 2)
        closed = cylinder_slab_energy(R, cfg)
        mid = cylinder_slab_oracle(R, cfg, QuadSpec(resolution=res))
        mc = cylinder_slab_oracle(R, cfg, QuadSpec(scheme="mc", samples=spec.samples, seed=spec.seed + idx + 1))
        rows.append(OracleRow(
            idx, d, l, R, closed,
            mid.value, mid.error, mid.tail,
            mc.value, mc.error,
            oracle_agreement(closed, mid.value, mid.error, mid.tail, midpoint_rel),
            oracle_agreement(closed, mc.value, mc.error, mc.tail, 0.0, sigmas=3.0),
        ))
    return rows


@dataclass(frozen=True)
class CensusRow:
    name: str
    r: float
    counts: tuple[int, ...]
    max_product: float


def default_census_sets(n: int = 2) -> dict:
    grid = Grid.uniform(Box((0.0,) * n, (1.0,) * n), 128)
    return {
        "halfspace": HalfSpace.below(n - 1, 0.5, n),
        "ball": Ball((0.5,) * n, 0.25),
        "checkerboard": checkerboard(grid),
    }


def census_scaling(sets: dict | None = None, exponents=range(3, 8), a: float = 0.1, n: int = 2) -> list[CensusRow]:
    """``max_i count_i r^(N-1)`` over the shifted lattices for ``r = 2^-e``."""
    sets = default_census_sets(n) if sets is None else sets
    window = Box((0.0,) * n, (1.0,) * n)
    rows = []
    for name, s in sets.items():
        for e in exponents:
            r = 2.0 ** -e
            counts = tuple(census_counts(s, r, a, window))
            rows.append(CensusRow(name, r, counts, max(counts) * r ** (n - 1)))
    return rows


@dataclass(frozen=True)
class DescentRow:
    iteration: int
    energy: float


def descent_demo(spec: ExperimentSpec, cells: int = 64) -> list[DescentRow]:
    """Gradient descent from a seeded random start on ``(0, 1)^N`` at ``eps = spec.eps[0]``."""
    grid = Grid.uniform(Box((0.0,) * spec.n, (1.0,) * spec.n), cells)
    rng = stream(spec.seed, 0)
    u0 = PhaseField(grid, spec.alpha + (spec.beta - spec.alpha) * rng.random(grid.counts))
    res = minimize_F(u0, spec.eps[0], ScalingSchedule(spec.k), DoubleWell(spec.alpha, spec.beta))
    return [DescentRow(i, e) for i, e in enumerate(res.energies)]


def _flat(row) -> dict:
    out = {}
    for k, v in dataclasses.asdict(row).items():
        out[k] = ";".join(str(x) for x in v) if isinstance(v, (tuple, list)) else v
    return out


def rows_to_csv(rows) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    fields = [f.name for f in dataclasses.fields(rows[0])]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in _flat(r).items()})
    return buf.getvalue()


def rows_to_json(rows) -> str:
    return json.dumps([dataclasses.asdict(r) for r in rows], allow_nan=True)


def write_rows(rows, path: str) -> None:
    """CSV for ``.csv`` paths, JSON otherwise."""
    text = rows_to_csv(rows) if str(path).endswith(".csv") else rows_to_json(rows)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def summary_line(kind: str, rows) -> str:
    if kind == "gamma-scan" and rows:
        last = rows[-1]
        return f"gamma-scan: {len(rows)} rows, limit {last.limit:.6g}, deviation at eps={last.eps:.3g}: {last.deviation:.3%}"
    if kind == "oracle-sweep" and rows:
        mid = np.mean([r.midpoint_agrees for r in rows])
        mc = np.mean([r.mc_agrees for r in rows])
        return f"oracle-sweep: {len(rows)} configs, midpoint agreement {mid:.0%}, Monte Carlo agreement {mc:.0%}"
    return f"{kind}: {len(rows)} rows"
