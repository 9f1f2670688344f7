import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlphase.errors import ParameterError, PreconditionError
from nlphase.functional import (
    DoubleWell,
    EnergyBreakdown,
    PhaseField,
    ScalingSchedule,
    eval_F,
    eval_nonlocal_term,
    eval_potential_term,
    gamma_limit_F,
    grad_F,
    lambda_of_eps,
    minimize_F,
    offset_weights,
    sharp_sets,
)
from nlphase.geometry import Box, Grid, GridSet
from nlphase.kernel_quad import QuadSpec, midpoint_pair_energy

UNIT2 = Box((0.0, 0.0), (1.0, 1.0))
G8 = Grid.uniform(UNIT2, 8)


def _random_field(seed, grid=G8):
    return PhaseField(grid, np.random.default_rng(seed).uniform(-0.5, 1.5, grid.counts))


def test_lambda_examples():
    s = ScalingSchedule(1.0)
    assert lambda_of_eps(s, 1.0) == pytest.approx(math.e)
    assert lambda_of_eps(s, 0.05) == pytest.approx(4.85e8, rel=1e-3)
    assert lambda_of_eps(s, 1e-4) == math.inf
    with pytest.raises(ParameterError):
        lambda_of_eps(s, 0.0)
    with pytest.raises(ParameterError):
        ScalingSchedule(0.0)


@given(st.floats(1e-6, 1e3), st.floats(0.1, 10))
def test_default_rule_identity(eps, k):
    assert eps * ScalingSchedule(k).log_lambda(eps) == pytest.approx(k, rel=1e-14)


def test_custom_rule_limit_along_one_over_m():
    s = ScalingSchedule(2.0, log_rule=lambda e: 2.0 / e + math.log(1 / e))
    errs = [abs((1 / m) * s.log_lambda(1 / m) - 2.0) for m in (10, 100, 1000, 10_000)]
    assert all(a > b for a, b in zip(errs, errs[1:]))


@given(st.floats(-10, 10))
def test_double_well_properties(t):
    w = DoubleWell(0.0, 1.0)
    assert w.W(t) >= 0
    if abs(t) > 2:
        assert w.W(t) >= abs(t) - 2
    h = 1e-6
    assert w.dW(t) == pytest.approx((w.W(t + h) - w.W(t - h)) / (2 * h), rel=1e-5, abs=1e-6)


def test_double_well_zeros():
    w = DoubleWell(-1.0, 2.0)
    assert w.W(-1.0) == 0 and w.W(2.0) == 0 and w.W(0.5) > 0
    assert w.max_between == pytest.approx(float(w.W(0.5)))
    with pytest.raises(ParameterError):
        DoubleWell(1.0, 1.0)


def test_potential_examples():
    s = ScalingSchedule(1.0)
    assert eval_potential_term(PhaseField.constant(G8, 0.0), 0.5, schedule=s) == 0.0
    mid = eval_potential_term(PhaseField.constant(G8, 0.5), 0.5, schedule=s)
    assert mid == pytest.approx(math.exp(2.0) * 0.0625)


def test_potential_survives_huge_lambda():
    u = PhaseField.constant(G8, 0.0)
    assert eval_potential_term(u, 1e-5) == 0.0
    assert eval_potential_term(PhaseField.constant(G8, 0.5), 1e-5) == math.inf


def test_nonlocal_constant_and_shift():
    assert eval_nonlocal_term(PhaseField.constant(G8, 0.3), 0.5) == 0.0
    u = _random_field(1)
    base = eval_nonlocal_term(u, 0.5)
    assert eval_nonlocal_term(u.with_values(u.values + 3.0), 0.5) == pytest.approx(base, rel=1e-12)
    assert eval_nonlocal_term(u.with_values(2.0 - u.values), 0.5) == pytest.approx(base, rel=1e-12)


def test_two_cell_example():
    g = Grid(Box((0.0, 0.0), (2.0, 1.0)), (2, 1))
    u = PhaseField(g, [0.0, 1.0])
    br = eval_F(u, 0.25)
    # one unordered pair at distance 1 with unit cells, counted twice
    assert br.nonlocal_ == pytest.approx(2 * 0.25)
    assert br.potential == 0.0


def test_eval_f_examples():
    assert eval_F(PhaseField.constant(G8, 1.0), 0.3).total == 0.0
    empty = GridSet.empty(G8)
    assert eval_F(_random_field(2), 0.3, region=empty).total == 0.0
    br = eval_F(_random_field(3), 0.3)
    assert br.total == br.potential + br.nonlocal_
    assert isinstance(br, EnergyBreakdown) and br.to_dict()["total"] == br.total


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_energy_nonnegative_and_zero_only_at_wells(seed):
    rng = np.random.default_rng(seed)
    mixed = PhaseField(G8, rng.choice([0.0, 1.0], G8.counts))
    assert eval_F(mixed, 0.4).total >= 0
    if 0 < mixed.values.sum() < mixed.values.size:
        assert eval_F(mixed, 0.4).nonlocal_ > 0


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 7))
def test_localization_superadditive(seed, cut):
    u = _random_field(seed)
    left = np.zeros(G8.counts, dtype=bool)
    left[:cut] = True
    parts = eval_nonlocal_term(u, 0.5, GridSet(G8, left)) + eval_nonlocal_term(u, 0.5, GridSet(G8, ~left))
    assert eval_nonlocal_term(u, 0.5) >= parts


def test_sharp_field_matches_pair_energy():
    g = Grid(Box((0.0, 0.0), (2.0, 1.0)), (32, 16))
    x = g.centers()[:, 0].reshape(g.counts)
    vals = np.where(x < 0.75, 0.0, np.where(x > 1.25, 2.0, 1.0))
    u = PhaseField(g, vals)
    a, b = GridSet(g, vals == 0.0), GridSet(g, vals == 2.0)
    region = GridSet(g, a.mask | b.mask)
    nl = eval_nonlocal_term(u, 0.1, region)
    exact_pairs = midpoint_pair_energy(a, b, spec=QuadSpec(depth=0)).value
    assert nl == pytest.approx(2 * 0.1 * 4 * exact_pairs, rel=1e-10)
    refined = midpoint_pair_energy(a, b)
    assert nl == pytest.approx(2 * 0.1 * 4 * refined.value, rel=0.01)


def test_offset_weights_refinement_flags_adjacent_cells():
    _, w0, ok0 = offset_weights(G8, 0)
    assert ok0 and np.all(w0 > 0)
    _, w1, ok1 = offset_weights(Grid.uniform(UNIT2, 3), 2)
    assert not ok1 and np.all(w1 > 0)


def test_gradient_zero_at_wells():
    assert np.all(grad_F(PhaseField.constant(G8, 0.0), 0.5) == 0)
    assert np.all(grad_F(PhaseField.constant(G8, 1.0), 0.5) == 0)


def test_gradient_finite_differences():
    u = _random_field(5, Grid.uniform(UNIT2, 4))
    g = grad_F(u, 0.5)
    step = 1e-6
    for idx in np.ndindex(u.grid.counts):
        up, dn = u.values.copy(), u.values.copy()
        up[idx] += step
        dn[idx] -= step
        fd = (eval_F(u.with_values(up), 0.5).total - eval_F(u.with_values(dn), 0.5).total) / (2 * step)
        assert g[idx] == pytest.approx(fd, rel=1e-5, abs=1e-9)


def test_gradient_shift_changes_only_potential_part():
    u = _random_field(6)
    big = ScalingSchedule(1.0, log_rule=lambda e: -50.0)  # lambda ~ 0 isolates the nonlocal part
    g1 = grad_F(u, 0.5, big)
    g2 = grad_F(u.with_values(u.values + 0.7), 0.5, big)
    assert np.allclose(g1, g2, rtol=1e-10, atol=1e-12)
    assert not np.allclose(grad_F(u, 0.5), grad_F(u.with_values(u.values + 0.7), 0.5))


def test_minimize_from_well_is_immediate():
    g = Grid.uniform(Box((0.0,), (1.0,)), 64)
    res = minimize_F(PhaseField.constant(g, 0.0), 0.5)
    assert res.accepted == 0 and res.converged


def test_minimize_random_start():
    g = Grid.uniform(Box((0.0,), (1.0,)), 64)
    u0 = PhaseField(g, np.random.default_rng(0).uniform(0.0, 1.0, 64))
    res = minimize_F(u0, 0.5)
    assert all(b <= a for a, b in zip(res.energies, res.energies[1:]))
    a, b = sharp_sets(res.field)
    assert (a.mask.sum() + b.mask.sum()) / 64 >= 0.9


def test_minimize_refuses_unresolved_width():
    g = Grid.uniform(Box((0.0,), (1.0,)), 64)
    with pytest.raises(PreconditionError, match="interface width"):
        minimize_F(PhaseField.constant(g, 0.5), 0.01)


def test_gamma_limit_examples():
    assert gamma_limit_F(0.0) == 0.0
    assert gamma_limit_F(1.0, 0.0, 1.0, 1.0, 2) == 4.0
    assert gamma_limit_F(1.0, 0.0, 2.0) == 4 * gamma_limit_F(1.0, 0.0, 1.0)
    assert gamma_limit_F(1.0, n=3) == pytest.approx(2 * math.pi)
    with pytest.raises(ParameterError):
        gamma_limit_F(-1.0)


def test_phase_field_roundtrips():
    u = _random_field(9, Grid(Box((0.0, -1.0), (2.0, 1.0)), (3, 5)))
    for back in (PhaseField.from_json(u.to_json()), PhaseField.from_csv(u.to_csv())):
        assert back.grid == u.grid
        assert np.array_equal(back.values, u.values)
    with pytest.raises(ParameterError):
        PhaseField.from_csv("2,3,5,0,0,1\n0.5\n")
    with pytest.raises(ParameterError):
        PhaseField(G8, np.full(G8.counts, np.nan))


def test_sharp_sets_validation():
    a, b = sharp_sets(PhaseField(G8, np.linspace(0, 1, 64)))
    assert not np.any(a.mask & b.mask)
    with pytest.raises(ParameterError):
        sharp_sets(PhaseField.constant(G8, 0.0), delta=0.6)
