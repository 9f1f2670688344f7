"""Command-line entry point: ``python3 -m nlphase <subcommand> [flags]``.

Lengths are in abstract units, energies in the same units raised to
``N - 1``.  ``--params FILE`` reads ``key = value`` lines named like the
flags (without dashes); flags given on the command line win.

Exit codes: 0 success, 2 parameter or precondition error, 3 a requested
check failed, 4 a numerical-reliability flag was raised.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import experiments as ex
from .bounds_lab import (
    cube_energy_floor,
    reflection_chain_suite,
)
from .errors import DomainError, ParameterError, PreconditionError, SamplingError
from .functional import (
    DoubleWell,
    PhaseField,
    ScalingSchedule,
    eval_F,
    grad_check,
    minimize_F,
)
from .geometry import Box, Grid, GridSet
from .kernel_exact import (
    ADJUDICATED,
    PRINTED,
    SlabPairConfig,
    cylinder_slab_energy,
    slab_energy_per_area,
    slab_H_profile,
    triangle_strip_bound,
    triangle_strip_limit,
    triangle_strip_sum,
)
from .kernel_quad import QuadSpec, cylinder_slab_oracle, mc_pair_energy, midpoint_pair_energy, stream
from .profiles import RecoveryConfig, recovery_energy_semianalytic, sharp_interface_field
from .serialize import from_dict

EXIT_OK, EXIT_PARAM, EXIT_CHECK, EXIT_RELIABILITY = 0, 2, 3, 4


class CheckFailed(Exception):
    pass


class Unreliable(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def parse_eps(text: str) -> tuple[float, ...]:
    """``a:b`` (two points per decade), ``a:b:k`` (k per decade) or a comma list."""
    try:
        if ":" not in text:
            return tuple(float(x) for x in text.split(","))
        parts = [float(x) for x in text.split(":")]
    except ValueError as exc:
        raise ParameterError(f"cannot parse eps {text!r}") from exc
    if len(parts) == 2:
        return ex.default_eps_grid(parts[0], parts[1])
    if len(parts) == 3:
        return ex.default_eps_grid(parts[0], parts[1], int(parts[2]))
    raise ParameterError(f"cannot parse eps range {text!r}")


def parse_region(text: str):
    """A region as JSON (see ``nlphase.serialize``) or a box ``lo1,..,loN:hi1,..,hiN``."""
    text = text.strip()
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            text = fh.read().strip()
    try:
        if text.startswith("{"):
            return from_dict(json.loads(text))
        lo, hi = text.split(":")
        return Box([float(x) for x in lo.split(",")], [float(x) for x in hi.split(",")])
    except (ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"cannot parse region {text!r}: {exc}") from exc


def read_params(path: str) -> list[tuple[str, str]]:
    items = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"parameter file line {raw.strip()!r} is not key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            items.append((key, value))
    return items


def _params_to_argv(items, sub: argparse.ArgumentParser) -> list[str]:
    flags = {}
    for action in sub._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                flags[opt[2:].replace("-", "_")] = action
    argv = []
    for key, value in items:
        norm = key.replace("-", "_")
        if norm not in flags or norm in ("params", "help"):
            raise ParameterError(f"unknown parameter {key!r} in parameter file")
        action = flags[norm]
        opt = action.option_strings[-1]
        if action.nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append(opt)
        else:
            argv += [opt, value]
    return argv


def _common(p: argparse.ArgumentParser, seed: bool = False):
    p.add_argument("--params", metavar="FILE", help="key = value parameter file; flags override it")
    p.add_argument("--out", metavar="PATH", help="output file (.csv or .json); removed if the run fails")
    p.add_argument("--threads", type=int, default=1, help="worker cap (computations run in one process; default 1)")
    p.add_argument("-v", "--verbose", action="store_true", help="print extra diagnostics to stderr")
    if seed:
        p.add_argument("--seed", type=int, default=0, help="random stream seed (default 0)")


def _slab(p):
    p.add_argument("--n", type=int, default=2, help="dimension N (default 2)")
    p.add_argument("--d", type=float, default=0.1, help="gap d between the layers, 0 < d < l (default 0.1)")
    p.add_argument("--l", type=float, default=1.0, help="outer extent l (default 1)")


def _wells(p):
    p.add_argument("--k", type=float, default=1.0, help="scaling constant k, lambda_eps = exp(k/eps) (default 1)")
    p.add_argument("--alpha", type=float, default=0.0, help="lower well (default 0)")
    p.add_argument("--beta", type=float, default=1.0, help="upper well (default 1)")


def _quad(p, mc=False):
    p.add_argument("--a", required=True, help="set A: JSON region or box 'lo1,lo2:hi1,hi2'")
    p.add_argument("--b", required=True, help="set B, same syntax")
    p.add_argument("--s", help="optional localizing region S, same syntax")
    if mc:
        p.add_argument("--samples", type=int, default=200_000, help="sample pairs (default 200000)")
    else:
        p.add_argument("--resolution", type=int, default=32, help="cells per unit length (default 32)")
        p.add_argument("--depth", type=int, default=6, help="near-pair refinement depth (default 6)")
        p.add_argument("--kappa", type=float, default=3.0, help="refine pairs closer than kappa*h (default 3)")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="nlphase", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("slab-exact", help="per-area slab-pair energy (closed form)")
    _common(p)
    _slab(p)
    p.add_argument("--variant", choices=(ADJUDICATED, PRINTED), default=ADJUDICATED, help="closed-form constant (default adjudicated)")

    p = sub.add_parser("h-profile", help="antipodal slice density H(a_N) of the slab pair")
    _common(p)
    _slab(p)
    p.add_argument("--a-n", default="0", help="comma-separated heights a_N (default 0)")

    p = sub.add_parser("cyl-slab", help="cylinder vs. slab energy; --check compares with quadrature")
    _common(p)
    _slab(p)
    p.add_argument("--R", type=float, default=1.0, help="cylinder base side (default 1)")
    p.add_argument("--check", action="store_true", help="run the midpoint oracle and require 1%% agreement")
    p.add_argument("--resolution", type=int, default=64, help="oracle cells per unit length (default 64)")

    p = sub.add_parser("strip-sum", help="2H-strip inner approximation and its bound")
    _common(p)
    p.add_argument("--R", type=float, default=1.0, help="base side (default 1)")
    p.add_argument("--l", type=float, default=1.0, help="extent l <= 4/3 (default 1)")
    p.add_argument("--H", type=int, default=10_000, help="strip count (default 10000)")
    p.add_argument("--n", type=int, default=2, help="dimension N (default 2)")

    p = sub.add_parser("quad", help="refined midpoint estimate of G(A, B, S)")
    _common(p)
    _quad(p)

    p = sub.add_parser("mc", help="Monte Carlo estimate of G(A, B, S)")
    _common(p, seed=True)
    _quad(p, mc=True)

    p = sub.add_parser("energy", help="evaluate F_eps on a phase field")
    _common(p)
    _wells(p)
    p.add_argument("--eps", type=float, default=0.5, help="eps > 0 (default 0.5)")
    p.add_argument("--field", help="phase field file (.csv or .json); default: sharp field on the unit box")
    p.add_argument("--cells", type=int, default=16, help="cells per axis for the default field (default 16)")
    p.add_argument("--n", type=int, default=2, help="dimension of the default field (default 2)")
    p.add_argument("--height", type=float, default=0.5, help="interface height of the default field (default 0.5)")
    p.add_argument("--depth", type=int, default=0, help="near-pair refinement depth (default 0)")

    p = sub.add_parser("grad-check", help="gradient vs. central finite differences on random fields")
    _common(p, seed=True)
    _wells(p)
    p.add_argument("--eps", type=float, default=0.5, help="eps > 0 (default 0.5)")
    p.add_argument("--cells", type=int, default=8, help="cells per axis (default 8)")
    p.add_argument("--n", type=int, default=2, help="dimension (default 2)")
    p.add_argument("--trials", type=int, default=20, help="random fields (default 20)")
    p.add_argument("--tol", type=float, default=1e-5, help="relative tolerance (default 1e-5)")

    p = sub.add_parser("minimize", help="gradient descent with backtracking from a random start")
    _common(p, seed=True)
    _wells(p)
    p.add_argument("--eps", type=float, default=0.5, help="eps > 0 (default 0.5)")
    p.add_argument("--cells", type=int, default=64, help="cells per axis (default 64)")
    p.add_argument("--n", type=int, default=1, help="dimension (default 1)")
    p.add_argument("--max-iter", type=int, default=500, help="iteration budget (default 500)")

    p = sub.add_parser("recovery", help="closed-form recovery energy estimate")
    _common(p)
    _wells(p)
    p.add_argument("--eps", type=float, default=1e-3, help="eps > 0 (default 1e-3)")
    p.add_argument("--R", type=float, default=1.0, help="base side (default 1)")
    p.add_argument("--l", type=float, default=1.0, help="cylinder height (default 1)")
    p.add_argument("--n", type=int, default=2, help="dimension (default 2)")
    p.add_argument("--C", type=float, default=10.0, help="ramp correction constant (default 10)")

    p = sub.add_parser("gamma-scan", help="recovery energy vs. the limit over an eps grid (CSV)")
    _common(p)
    _wells(p)
    p.add_argument("--eps", default="1e-1:1e-4", help="'a:b' geometric, 'a:b:k' k per decade, or a list (default 1e-1:1e-4)")
    p.add_argument("--R", type=float, default=1.0, help="base side (default 1)")
    p.add_argument("--l", type=float, default=1.0, help="cylinder height (default 1)")
    p.add_argument("--n", type=int, default=2, help="dimension 1, 2 or 3 (default 2)")
    p.add_argument("--C", type=float, default=10.0, help="ramp correction constant (default 10)")

    p = sub.add_parser("oracle-sweep", help="closed form vs. midpoint vs. Monte Carlo on random slabs")
    _common(p, seed=True)
    p.add_argument("--configs", type=int, default=50, help="random configurations (default 50)")
    p.add_argument("--resolution", type=int, default=32, help="midpoint cells per unit length (default 32)")
    p.add_argument("--samples", type=int, default=200_000, help="Monte Carlo samples (default 200000)")
    p.add_argument("--min-agreement", type=float, default=0.95, help="required agreement fraction (default 0.95)")

    p = sub.add_parser("census", help="cube census count * r^(N-1) across dyadic r")
    _common(p)
    p.add_argument("--set", choices=("halfspace", "ball", "checkerboard", "all"), default="all", help="test set (default all)")
    p.add_argument("--a", type=float, default=0.1, help="threshold in (0, 1/4) (default 0.1)")
    p.add_argument("--exp-min", type=int, default=3, help="coarsest r = 2^-exp_min (default 3)")
    p.add_argument("--exp-max", type=int, default=7, help="finest r = 2^-exp_max (default 7)")

    p = sub.add_parser("chain-check", help="randomized reflection-chain suite")
    _common(p, seed=True)
    p.add_argument("--trials", type=int, default=1000, help="instances (default 1000)")
    p.add_argument("--m", type=int, default=256, help="section resolution (default 256)")
    p.add_argument("--l", type=float, default=1.0, help="section length (default 1)")

    p = sub.add_parser("cube-floor", help="eps G(A, B, Q) / R^(N-1) for two layers in a cube")
    _common(p)
    p.add_argument("--cells", type=int, default=32, help="grid cells per axis on the unit square (default 32)")
    p.add_argument("--gap", type=float, default=0.0625, help="empty band between A and B (default 0.0625)")
    p.add_argument("--eps", type=float, default=0.1, help="eps > 0 (default 0.1)")
    p.add_argument("--frac", type=float, default=0.25, help="mass fraction a in (0, 1/2] (default 0.25)")
    p.add_argument("--side", type=float, default=1.0, help="cube side around the interface (default 1)")
    return top


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_slab_exact(a):
    cfg = SlabPairConfig(a.d, a.l, a.n)
    return {"per_area": slab_energy_per_area(cfg, a.variant), "omega": cfg.omega, "variant": a.variant, "n": a.n, "d": a.d, "l": a.l}


def _cmd_h_profile(a):
    cfg = SlabPairConfig(a.d, a.l, a.n)
    pts = [float(x) for x in a.a_n.split(",")]
    return {"a_n": pts, "H": [slab_H_profile(cfg, x) for x in pts], "fold": cfg.fold}


def _cmd_cyl_slab(a):
    cfg = SlabPairConfig(a.d, a.l, a.n)
    out = {"energy": cylinder_slab_energy(a.R, cfg), "R": a.R}
    if a.check:
        est = cylinder_slab_oracle(a.R, cfg, QuadSpec(resolution=a.resolution))
        out["oracle"] = est.to_dict()
        ok = ex.oracle_agreement(out["energy"], est.value, est.error, est.tail, 0.01)
        out["agrees"] = ok
        if not est.reliable:
            raise Unreliable(out)
        if not ok:
            raise CheckFailed(out)
    return out


def _cmd_strip_sum(a):
    val = triangle_strip_sum(a.R, a.l, a.H, a.n)
    bound = triangle_strip_bound(a.R, a.l, a.n)
    out = {"sum": val, "limit": triangle_strip_limit(a.R, a.l, a.n), "bound": bound, "holds": val <= bound}
    if not out["holds"]:
        raise CheckFailed(out)
    return out


def _cmd_quad(a):
    s = parse_region(a.s) if a.s else None
    est = midpoint_pair_energy(parse_region(a.a), parse_region(a.b), s, QuadSpec(resolution=a.resolution, depth=a.depth, kappa=a.kappa))
    if not est.reliable:
        raise Unreliable(est.to_dict())
    return est.to_dict()


def _cmd_mc(a):
    s = parse_region(a.s) if a.s else None
    return mc_pair_energy(parse_region(a.a), parse_region(a.b), s, QuadSpec(scheme="mc", samples=a.samples, seed=a.seed)).to_dict()


def _load_field(path: str) -> PhaseField:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return PhaseField.from_json(text) if text.lstrip().startswith("{") else PhaseField.from_csv(text)


def _cmd_energy(a):
    well = DoubleWell(a.alpha, a.beta)
    if a.field:
        u = _load_field(a.field)
    else:
        u = sharp_interface_field(a.height, Grid.uniform(Box((0.0,) * a.n, (1.0,) * a.n), a.cells), well)
    br = eval_F(u, a.eps, None, ScalingSchedule(a.k), well, depth=a.depth)
    if not br.reliable:
        raise Unreliable(br.to_dict())
    return br.to_dict()


def _cmd_grad_check(a):
    worst = grad_check(a.eps, a.cells, a.n, a.trials, a.seed, ScalingSchedule(a.k), DoubleWell(a.alpha, a.beta))
    out = {"max_relative_error": worst, "tol": a.tol, "holds": worst <= a.tol}
    if not out["holds"]:
        raise CheckFailed(out)
    return out


def _cmd_minimize(a):
    well = DoubleWell(a.alpha, a.beta)
    grid = Grid.uniform(Box((0.0,) * a.n, (1.0,) * a.n), a.cells)
    rng = stream(a.seed, 0)
    u0 = PhaseField(grid, well.alpha + (well.beta - well.alpha) * rng.random(grid.counts))
    res = minimize_F(u0, a.eps, ScalingSchedule(a.k), well, max_iter=a.max_iter)
    near = np.minimum(np.abs(res.field.values - well.alpha), np.abs(res.field.values - well.beta))
    return {
        "energies": res.energies,
        "accepted": res.accepted,
        "converged": res.converged,
        "fraction_near_wells": float(np.mean(near < 0.1 * (well.beta - well.alpha))),
        "field": res.field.to_dict(),
    }


def _cmd_recovery(a):
    cfg = RecoveryConfig(a.R, a.l, a.eps, ScalingSchedule(a.k), DoubleWell(a.alpha, a.beta), a.n)
    est = recovery_energy_semianalytic(cfg, a.C)
    return {
        "eps": est.eps, "log_lambda": est.log_lambda, "main": est.main, "potential": est.potential_bound,
        "correction_area2": est.correction_area2, "correction_area": est.correction_area,
        "total": est.total, "limit": est.limit, "deviation": est.deviation, "C": est.C,
    }


def _cmd_gamma_scan(a):
    spec = ex.ExperimentSpec("gamma-scan", parse_eps(a.eps), a.k, a.alpha, a.beta, a.n, a.R, a.l, a.C)
    return ex.gamma_scan(spec)


def _cmd_oracle_sweep(a):
    spec = ex.ExperimentSpec("oracle-sweep", resolutions=(a.resolution,), configs=a.configs, samples=a.samples, seed=a.seed)
    rows = ex.oracle_sweep(spec)
    agree = np.mean([r.midpoint_agrees and r.mc_agrees for r in rows]) if rows else 1.0
    if agree < a.min_agreement:
        raise CheckFailed(rows)
    return rows


def _cmd_census(a):
    sets = ex.default_census_sets(2)
    if a.set != "all":
        sets = {a.set: sets[a.set]}
    return ex.census_scaling(sets, range(a.exp_min, a.exp_max + 1), a.a)


def _cmd_chain_check(a):
    report = reflection_chain_suite(a.trials, a.seed, a.m, a.l)
    if report.failures:
        raise CheckFailed(report)
    return report


def _cmd_cube_floor(a):
    grid = Grid.uniform(Box((0.0, 0.0), (1.0, 1.0)), a.cells)
    g = a.gap / 2
    A = GridSet.from_region(grid, Box((0.0, 0.5 + g), (1.0, 1.0)))
    B = GridSet.from_region(grid, Box((0.0, 0.0), (1.0, 0.5 - g)))
    h = a.side / 2
    cube = Box((0.5 - h, 0.5 - h), (0.5 + h, 0.5 + h))
    est = cube_energy_floor(A, B, cube, a.eps, QuadSpec(), a.frac)
    out = {"energy": est.energy, "error": est.error, "ratio": est.ratio, "side": est.side, "reliable": est.reliable}
    if not est.reliable:
        raise Unreliable(out)
    return out


COMMANDS = {
    "slab-exact": _cmd_slab_exact,
    "h-profile": _cmd_h_profile,
    "cyl-slab": _cmd_cyl_slab,
    "strip-sum": _cmd_strip_sum,
    "quad": _cmd_quad,
    "mc": _cmd_mc,
    "energy": _cmd_energy,
    "grad-check": _cmd_grad_check,
    "minimize": _cmd_minimize,
    "recovery": _cmd_recovery,
    "gamma-scan": _cmd_gamma_scan,
    "oracle-sweep": _cmd_oracle_sweep,
    "census": _cmd_census,
    "chain-check": _cmd_chain_check,
    "cube-floor": _cmd_cube_floor,
}

TABLE_COMMANDS = {"gamma-scan", "oracle-sweep", "census"}


def _render(command: str, result, fmt_csv: bool) -> str:
    if command in TABLE_COMMANDS:
        return ex.rows_to_csv(result) if fmt_csv else ex.rows_to_json(result)
    if hasattr(result, "to_json"):
        return result.to_json()
    return json.dumps(result, indent=None if fmt_csv else 2, default=float)


def _emit(args, result) -> None:
    command = args.command
    if args.out:
        text = _render(command, result, str(args.out).endswith(".csv"))
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        if command in TABLE_COMMANDS:
            print(ex.summary_line(command, result))
        else:
            print(f"{command}: wrote {args.out}")
    else:
        if command in TABLE_COMMANDS:
            sys.stdout.write(ex.rows_to_csv(result))
            print(ex.summary_line(command, result))
        else:
            print(_render(command, result, False))


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.params:
        sub = parser._subparsers._group_actions[0].choices[args.command]
        try:
            extra = _params_to_argv(read_params(args.params), sub)
        except (OSError, ParameterError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARAM
        rest = argv[argv.index(args.command) + 1 :]
        try:
            args = parser.parse_args([args.command] + extra + rest)
        except SystemExit as exc:
            return int(exc.code or 0)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_PARAM
    existed = bool(args.out) and os.path.exists(args.out)
    code = EXIT_OK
    try:
        result = COMMANDS[args.command](args)
        _emit(args, result)
    except (ParameterError, DomainError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_PARAM
    except CheckFailed as exc:
        _emit(args, exc.args[0])
        print(f"{args.command}: check failed", file=sys.stderr)
        code = EXIT_CHECK
    except (Unreliable, SamplingError) as exc:
        payload = exc.args[0] if exc.args else None
        if isinstance(exc, Unreliable):
            print(json.dumps(payload, default=float))
        print(f"{args.command}: numerical reliability flag raised ({exc if isinstance(exc, SamplingError) else 'unreliable estimate'})", file=sys.stderr)
        code = EXIT_RELIABILITY
    if code in (EXIT_PARAM, EXIT_RELIABILITY) and args.out and os.path.exists(args.out) and not existed:
        os.remove(args.out)
    return code


def main() -> None:
    sys.exit(run())
