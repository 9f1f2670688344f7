import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from nlphase.errors import ParameterError, PreconditionError
from nlphase.kernel_exact import (
    PRINTED,
    BoundParams,
    SlabPairConfig,
    cylinder_complement_bound,
    cylinder_slab_energy,
    slab_energy_per_area,
    slab_H_profile,
    special_cylinder_limit,
    special_cylinder_lower_bound,
    triangle_strip_bound,
    triangle_strip_limit,
    triangle_strip_sum,
    unit_ball_area,
)

# Per-area energy for N=2, l=1, from scipy dblquad of the kernel over the
# upper layer against the full lower layer (lateral integral done in closed
# form, 2/t^2); frozen here as an independent reference.
SLAB_ORACLE_N2_L1 = {0.4: 0.405882, 0.2: 1.175573, 0.1: 2.213822}


def _dblquad_per_area(d, l):
    # lateral integral of |(z, t)|^-3 over R is 2/t^2
    val, _ = integrate.dblquad(lambda y, x: 2.0 / (x - y) ** 2, d / 2, l / 2, -l / 2, -d / 2, epsabs=1e-12, epsrel=1e-10)
    return val


def test_oracle_values_are_reproducible():
    for d, v in SLAB_ORACLE_N2_L1.items():
        assert _dblquad_per_area(d, 1.0) == pytest.approx(v, abs=2e-6)


@pytest.mark.parametrize("d", sorted(SLAB_ORACLE_N2_L1))
def test_adjudicated_matches_oracle(d):
    cfg = SlabPairConfig(d, 1.0, 2)
    assert slab_energy_per_area(cfg) == pytest.approx(SLAB_ORACLE_N2_L1[d], rel=1e-6)
    # the printed constant is off by exactly 2 ln 2 omega
    assert slab_energy_per_area(cfg, PRINTED) - slab_energy_per_area(cfg) == pytest.approx(2 * math.log(2) * 2)


def test_unit_ball_area_examples():
    assert unit_ball_area(1) == 2
    assert unit_ball_area(2) == math.pi
    assert unit_ball_area(3) == pytest.approx(4 * math.pi / 3)
    with pytest.raises(ParameterError):
        unit_ball_area(-1)


def test_config_validation():
    with pytest.raises(ParameterError):
        SlabPairConfig(1.0, 1.0)
    with pytest.raises(ParameterError):
        SlabPairConfig(0.0, 1.0)
    cfg = SlabPairConfig.from_log_gap(-1000.0, 1.0)
    assert cfg.d == 0.0 and cfg.log_d == -1000.0


def test_h_profile_examples():
    cfg = SlabPairConfig(0.2, 1.0, 3)
    assert slab_H_profile(cfg, 0.0) == pytest.approx(4 * math.pi)
    assert slab_H_profile(cfg, 0.2) == 0.0
    assert slab_H_profile(cfg, 0.3) == 0.0


configs = st.tuples(st.floats(0.3, 2.0), st.floats(0.02, 0.95), st.integers(1, 4)).map(
    lambda t: SlabPairConfig(t[0] * t[1], t[0], t[2])
)


@given(configs, st.floats(0, 1))
def test_h_profile_even_and_decreasing(cfg, s):
    a = s * cfg.fold
    assert slab_H_profile(cfg, a) == slab_H_profile(cfg, -a)
    assert slab_H_profile(cfg, a) >= 0
    if 0 < s < 0.99:
        assert slab_H_profile(cfg, a) > slab_H_profile(cfg, a + 0.01 * cfg.fold)


@settings(max_examples=30)
@given(configs)
def test_profile_integrates_to_closed_form(cfg):
    val, _ = integrate.quad(lambda a: slab_H_profile(cfg, a), -cfg.fold, cfg.fold, epsabs=0, epsrel=1e-12, limit=200)
    assert val == pytest.approx(slab_energy_per_area(cfg), rel=1e-8)


def test_one_dimensional_closed_form_matches_quadrature():
    for d, l in [(0.1, 1.0), (0.2, 1.0), (0.5, 1.3)]:
        val, _ = integrate.dblquad(lambda y, x: (x - y) ** -2, d / 2, l / 2, -l / 2, -d / 2, epsrel=1e-11)
        assert slab_energy_per_area(SlabPairConfig(d, l, 1)) == pytest.approx(val, rel=1e-8)


@given(configs, st.floats(0.01, 0.9))
def test_per_area_monotone(cfg, t):
    smaller_d = SlabPairConfig(cfg.d * t, cfg.l, cfg.n)
    assert slab_energy_per_area(smaller_d) > slab_energy_per_area(cfg)
    larger_l = SlabPairConfig(cfg.d, cfg.l / t, cfg.n)
    assert slab_energy_per_area(larger_l) > slab_energy_per_area(cfg)


def test_per_area_limits():
    assert slab_energy_per_area(SlabPairConfig(1 - 1e-9, 1.0)) == pytest.approx(0.0, abs=1e-8)
    # halving d adds about omega ln 2
    a = slab_energy_per_area(SlabPairConfig(1e-6, 1.0))
    b = slab_energy_per_area(SlabPairConfig(5e-7, 1.0))
    assert b - a == pytest.approx(2 * math.log(2), rel=1e-5)


def test_tiny_gap_uses_log():
    cfg = SlabPairConfig.from_log_gap(-1e4, 1.0)
    # leading term -omega ln(d/2)
    assert slab_energy_per_area(cfg) == pytest.approx(2 * (1e4 + math.log(2) + 2 * math.log(0.25) - math.log(0.5)))


def test_cylinder_scaling():
    cfg2 = SlabPairConfig(0.1, 1.0, 2)
    assert cylinder_slab_energy(1.0, cfg2) == slab_energy_per_area(cfg2)
    cfg3 = SlabPairConfig(0.1, 1.0, 3)
    assert cylinder_slab_energy(2.0, cfg3) == 4 * cylinder_slab_energy(1.0, cfg3)
    for R in (0.5, 1.0, 2.0):
        assert cylinder_slab_energy(R, cfg2) / R == slab_energy_per_area(cfg2)


def test_complement_bound():
    b = cylinder_complement_bound(1.0, 0.1, 1.0, 100.0, estimate=1.0)
    assert b.bound == pytest.approx(100 * (1 - math.log(0.5)))
    assert b.bound == pytest.approx(169.3, abs=0.05)
    assert b.holds
    with pytest.raises(ParameterError):
        cylinder_complement_bound(1.0, 0.1, 2 * math.e, 1.0)
    assert cylinder_complement_bound(1.0, 1.0, 1.0, 1.0, estimate=0.0).holds


def test_strip_sum_first_term():
    # one strip: both halves of width R at gap l/2
    assert triangle_strip_sum(1.0, 1.0, 1) == pytest.approx(2 * cylinder_slab_energy(1.0, SlabPairConfig(0.5, 1.0, 2)))


@pytest.mark.parametrize("l", [0.2, 0.5, 1.0, 4 / 3])
def test_strip_sum_monotone_and_bounded(l):
    vals = np.array([triangle_strip_sum(1.0, l, H) for H in range(1, 200)])
    assert np.all(np.diff(vals) >= 0)
    assert vals[-1] <= triangle_strip_bound(1.0, l)


def test_strip_sum_converges():
    lim = triangle_strip_limit(1.0, 1.0)
    val = triangle_strip_sum(1.0, 1.0, 10_000)
    assert abs(val - lim) / lim < 0.02
    assert val <= 2 * 2 * (1 - 2 * math.log(0.5))
    with pytest.raises(ParameterError):
        triangle_strip_sum(1.0, 1.5, 10)


def _params(eps, defect=0.0, c=0.0, xi=1.0, k=1.0):
    return BoundParams(defect=defect, eps=eps, c=c, r=1.0, R=1.0, xi=xi, c_n=1.0, log_lambda_eps=k / eps)


def test_special_cylinder_limit_along_eps():
    target = special_cylinder_limit(1.0, 1.0, 0.0, 1.0)
    assert target == 2.0
    errs = [abs(special_cylinder_lower_bound(_params(1 / m))["eps_main"] - target) for m in (10, 100, 1000, 10_000)]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-2


def test_special_cylinder_limit_with_defect():
    lam, xi = 0.05, 0.7
    target = special_cylinder_limit(1.0, 1.0, lam, xi)
    val = special_cylinder_lower_bound(_params(1e-6, defect=lam, xi=xi))["eps_main"]
    assert val == pytest.approx(target, rel=1e-4)


def test_special_cylinder_degenerate_and_errors():
    # the second factor stays positive for small xi, so the sign follows 1 - 3 lambda - 6 eps
    assert special_cylinder_lower_bound(_params(0.01, defect=1 / 3, xi=0.1))["main"] <= 0
    with pytest.raises(PreconditionError):
        special_cylinder_lower_bound(_params(0.4))
