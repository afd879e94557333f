"""Discrete action, stationarity defects, and the multiplier identity."""
from __future__ import annotations

import numpy as np
import pytest

from cpwave import (
    POLARIZED,
    BoundaryData,
    FieldState,
    action_stationarity_check,
    default_perturbation_bank,
    discrete_action,
    lagrangian_density,
    solve_goursat,
)
from cpwave.variational import VARIATION_EPS
from conftest import FAMILIES, family_data, unit_grid

# Frozen max stationarity defect of the solved f = 1 + t, g = v - v^2/4
# family with the default bank.
MAX_DEFECT = {51: 4.5017e-06, 101: 1.1250e-06, 201: 2.8123e-07}


def _flat_state(n):
    grid = unit_grid(n)
    z = np.zeros((1, n, n))
    return FieldState(grid, POLARIZED, M=z.copy(), U=z.copy(), V=z.copy(), W=z.copy())


def test_density_zero_point():
    names = ("m", "u", "w", "m_t", "u_t", "u_v", "v_t", "v_v", "w_t", "w_v",
             "m_tv", "u_tv", "u_tt")
    assert lagrangian_density(**dict.fromkeys(names, 0.0), lam=0.0) == 0.0


def test_density_multiplier_brace_pin():
    names = ("m", "u", "w", "m_t", "u_t", "u_v", "v_t", "v_v", "w_t", "w_v",
             "m_tv", "u_tv")
    assert lagrangian_density(**dict.fromkeys(names, 0.0), u_tt=1.0, lam=1.0) == 1.0


def test_density_evolution_brace_pins():
    base = dict.fromkeys(
        ("m", "u", "w", "m_t", "u_t", "u_v", "v_t", "v_v", "w_t", "w_v",
         "m_tv", "u_tv", "u_tt"), 0.0)
    assert lagrangian_density(**{**base, "m_tv": 1.0}) == -2.0
    assert lagrangian_density(**{**base, "u_tv": 1.0}) == -4.0
    assert lagrangian_density(**{**base, "u_t": 1.0, "u_v": 1.0}) == 3.0
    # exp(-U) weight on the first brace
    assert lagrangian_density(**{**base, "u": 1.0, "v_t": 2.0, "v_v": 1.0}) == (
        pytest.approx(2.0 * np.exp(-1.0), rel=1e-15))
    # exp(-M-U) weight on the multiplier brace
    got = lagrangian_density(**{**base, "m": 0.5, "u_t": 1.0, "m_t": 1.0}, lam=2.0)
    assert got == pytest.approx(2.0 * 0.5 * np.exp(-0.5), rel=1e-15)


def test_flat_state_is_critical():
    report = action_stationarity_check(_flat_state(31))
    assert report.max_defect() <= 1e-12
    np.testing.assert_allclose(report.action, 0.0, rtol=0.0, atol=1e-15)
    np.testing.assert_allclose(report.lambda_derivative, 0.0, rtol=0.0, atol=1e-12)
    assert report.eps == VARIATION_EPS == 1e-6


@pytest.mark.parametrize("n", [51, 101, 201])
def test_defects_on_exact_family(solve_family, n):
    _, _, result = solve_family("constraint", n)
    report = action_stationarity_check(result.state)
    assert report.max_defect() <= 1.5 * MAX_DEFECT[n]
    assert len(report.defects) == 4


def test_defects_second_order():
    assert 3.5 <= MAX_DEFECT[51] / MAX_DEFECT[101] <= 4.5
    assert 3.5 <= MAX_DEFECT[101] / MAX_DEFECT[201] <= 4.5


def test_lambda_derivative_matches_quadrature(solve_family):
    _, _, result = solve_family("evolution", 101)
    report = action_stationarity_check(result.state)
    quad = report.lambda_quadrature
    deriv = report.lambda_derivative
    assert np.all(np.abs(quad) > 1e-3)
    np.testing.assert_allclose(deriv, quad, rtol=1e-8, atol=0.0)
    # this family violates the longitudinal constraint by O(1), so the
    # multiplier direction is decidedly non-flat
    assert quad[0] == pytest.approx(-0.09436440091391346, rel=1e-10)


def test_corrupted_cell_breaks_stationarity(solve_family):
    n = 61
    _, _, result = solve_family("constraint", n)
    base = result.state
    report0 = action_stationarity_check(base)
    corrupted = FieldState(
        base.grid, base.polarization,
        M=base.M.copy(), U=base.U.copy(), V=base.V.copy(), W=base.W.copy(),
    )
    corrupted.U[0, n // 3, 2 * n // 5] += 0.1
    report1 = action_stationarity_check(corrupted)
    ratios = [
        float(np.max(np.abs(report1.defects[k])) / np.max(np.abs(report0.defects[k])))
        for k in ("M", "U")
    ]
    assert max(ratios) >= 10.0


def test_gauge_shift_leaves_defects_invariant():
    # f -> f + c, g -> g - c leaves f + g pointwise unchanged, so the data
    # and hence the solved fields and defects agree.  A dyadic grid and a
    # dyadic c keep every sample exactly representable; on non-dyadic
    # spacings round-off in f + g re-enters at the last bit and the solver
    # amplifies it to ~1e-10 in the defects
    n = 33
    grid = unit_grid(n)
    f, g = FAMILIES["constraint"]
    c = 0.75
    base = solve_goursat(POLARIZED, family_data(grid, f, g))
    shifted = solve_goursat(
        POLARIZED, family_data(grid, lambda t: f(t) + c, lambda s: g(s) - c))
    r0 = action_stationarity_check(base.state)
    r1 = action_stationarity_check(shifted.state)
    for key in r0.defects:
        np.testing.assert_allclose(r1.defects[key], r0.defects[key], rtol=0.0, atol=1e-12)
    np.testing.assert_allclose(r1.lambda_derivative, r0.lambda_derivative,
                               rtol=0.0, atol=1e-12)
    np.testing.assert_allclose(r1.action, r0.action, rtol=0.0, atol=1e-12)


def test_edge_touching_perturbation_rejected():
    st = _flat_state(21)
    bank = default_perturbation_bank(st.grid)
    bank["U"] = bank["U"].copy()
    bank["U"][0, 5] = 1e-3
    with pytest.raises(ValueError, match="edge"):
        action_stationarity_check(st, bank)


def test_bank_shape_and_name_validation():
    st = _flat_state(21)
    with pytest.raises(ValueError, match="shape"):
        action_stationarity_check(st, {"U": np.zeros((5, 5))})
    with pytest.raises(ValueError, match="unknown field"):
        action_stationarity_check(st, {"Q": np.zeros((21, 21))})


def test_default_bank_members_independent():
    bank = default_perturbation_bank(unit_grid(33))
    assert set(bank) == {"M", "U", "V", "W"}
    for name, delta in bank.items():
        assert np.max(np.abs(delta)) > 0.0
        assert np.all(delta[0, :] == 0.0) and np.all(delta[-1, :] == 0.0)
        assert np.all(delta[:, 0] == 0.0) and np.all(delta[:, -1] == 0.0)
    # no two members are proportional
    keys = list(bank)
    flat = {k: bank[k].ravel() for k in keys}
    for i, a in enumerate(keys):
        for b in keys[i + 1:]:
            cos = np.dot(flat[a], flat[b]) / (
                np.linalg.norm(flat[a]) * np.linalg.norm(flat[b]))
            assert abs(cos) < 0.999


def test_action_multiplier_argument_forms(solve_family):
    _, _, result = solve_family("evolution", 51)
    st = result.state
    none_val = discrete_action(st)
    zero_val = discrete_action(st, 0.0)
    np.testing.assert_allclose(zero_val, none_val, rtol=0.0, atol=1e-15)
    ones = np.ones((st.grid.n_theta, st.grid.n_v))
    np.testing.assert_allclose(discrete_action(st, 1.0), discrete_action(st, ones),
                               rtol=0.0, atol=1e-15)
    assert abs(discrete_action(st, 1.0)[0] - none_val[0]) > 1e-3
