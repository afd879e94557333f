"""Background boundary-data generators and their constraint values."""
from __future__ import annotations

import math

import numpy as np
import pytest

from cpwave import (
    SCALE_FACTOR_PRESETS,
    BackgroundSpec,
    build_grid,
    invert_tortoise,
    minkowski_spherical_data,
    rw_constraint_G,
    rw_spherical_data,
    sample_boundary_line,
    schwarzschild_spherical_data,
    schwarzschild_tortoise,
    v_constraint_G_line,
)

SQRT2 = math.sqrt(2.0)

# Frozen finite-difference G values (interior nodes, second-order stencils).
MINKOWSKI_G = {201: 3.0798e-05, 401: 8.0083e-06}      # v in [1, 3], y = pi/3
SCHWARZSCHILD_G = {201: 2.0139e-07, 401: 5.0687e-08}  # v in [-6, -3], m = 1/2
RW_G_DIFF = {201: 7.0941e-04, 401: 1.9163e-04}        # v in [0.5, 2.5], k = 0, p = 1/2


def _fd_G(spec, vlo, vhi, n, y=math.pi / 2):
    grid = build_grid((0.0, 1.0), (vlo, vhi), 3, n, slices=((y, 0.0),))
    lines, aux = sample_boundary_line(spec, grid, 0)
    G = v_constraint_G_line(lines["M"], lines["U"], lines["V"], lines["W"], grid.dv)
    return G, grid.v, aux


def test_minkowski_outgoing_unit_radius_point():
    pt = minkowski_spherical_data(SQRT2, math.pi / 2)
    assert pt.U == pytest.approx(0.0, abs=1e-15)
    assert pt.V == pytest.approx(0.0, abs=1e-15)
    assert pt.M == 0.0
    assert pt.W == 0.0


def test_minkowski_quarter_radius_point():
    pt = minkowski_spherical_data(1.0, math.pi / 6)
    assert math.exp(-pt.U) == pytest.approx(0.25, rel=1e-15)
    assert math.exp(-pt.V) == pytest.approx(0.5, rel=1e-15)


def test_minkowski_wrong_sign_rejected():
    with pytest.raises(ValueError, match="v"):
        minkowski_spherical_data(-1.0, math.pi / 2)
    with pytest.raises(ValueError, match="v"):
        minkowski_spherical_data(1.0, math.pi / 2, direction="incoming")


@pytest.mark.parametrize("n", [201, 401])
def test_minkowski_constraint_vanishes_second_order(n):
    G, _, _ = _fd_G(BackgroundSpec("minkowski"), 1.0, 3.0, n, y=math.pi / 3)
    assert np.max(np.abs(G[2:-2])) <= 1.5 * MINKOWSKI_G[n]


def test_tortoise_paper_form_at_half_mass():
    assert schwarzschild_tortoise(2.0, 0.5) == pytest.approx(2.0, rel=1e-15)
    r = 3.7
    assert schwarzschild_tortoise(r, 0.5) == pytest.approx(r + math.log(r - 1.0), rel=1e-15)


def test_tortoise_rejects_horizon():
    with pytest.raises(ValueError, match="horizon"):
        schwarzschild_tortoise(1.0, 0.5)
    with pytest.raises(ValueError, match="horizon"):
        invert_tortoise(1e9, 0.5)


def test_tortoise_round_trip():
    m = 0.5
    for v in np.linspace(-9.0, -2.9, 13):
        r = invert_tortoise(v, m)
        assert r > 2 * m
        assert schwarzschild_tortoise(r, m) == pytest.approx(-v / SQRT2, abs=1e-12)


def test_tortoise_inversion_pin():
    assert invert_tortoise(-2.0 * SQRT2, 0.5) == pytest.approx(2.0, rel=1e-12)


def test_schwarzschild_point_at_radius_two():
    y = math.pi / 3
    pt = schwarzschild_spherical_data(-2.0 * SQRT2, y, 0.5)
    assert math.exp(-pt.M) == pytest.approx(0.5, rel=1e-12)
    assert math.exp(-pt.U) == pytest.approx(4.0 * math.sin(y), rel=1e-12)
    assert math.exp(-pt.V) == pytest.approx(math.sin(y), rel=1e-12)
    assert pt.W == 0.0
    assert pt.aux["r"] == pytest.approx(2.0, rel=1e-12)


def test_schwarzschild_massless_limit_is_minkowski():
    y = math.pi / 2
    v = -2.0 * SQRT2
    pt = schwarzschild_spherical_data(v, y, 1e-10)
    mink = minkowski_spherical_data(v, y, direction="incoming")
    assert abs(pt.M) <= 1e-7
    assert math.exp(-pt.U) == pytest.approx(math.exp(-mink.U), rel=1e-6)
    assert pt.V == pytest.approx(mink.V, abs=1e-12)


@pytest.mark.parametrize("n", [201, 401])
def test_schwarzschild_constraint_vanishes_second_order(n):
    spec = BackgroundSpec("schwarzschild", direction="incoming", mass=0.5)
    G, _, _ = _fd_G(spec, -6.0, -3.0, n)
    assert np.max(np.abs(G[2:-2])) <= 1.5 * SCHWARZSCHILD_G[n]


def test_schwarzschild_radius_identities():
    # r_v = -a / sqrt(2) and r_vv = -a_v / sqrt(2), five-point stencils on
    # the sampled inversion; h large enough that the root-finder noise
    # (amplified by 1/h^2) stays below the 1e-10 budget
    m, h = 0.5, 0.04
    worst_rv = worst_rvv = 0.0

    def r_a(v):
        pt = schwarzschild_spherical_data(v, math.pi / 2, m)
        return pt.aux["r"], pt.aux["a"]

    for v in np.linspace(-8.0, -5.0, 31):
        rm2, am2 = r_a(v - 2 * h)
        rm1, am1 = r_a(v - h)
        r0, a0 = r_a(v)
        rp1, ap1 = r_a(v + h)
        rp2, ap2 = r_a(v + 2 * h)
        r_v = (-rp2 + 8 * rp1 - 8 * rm1 + rm2) / (12 * h)
        r_vv = (-rp2 + 16 * rp1 - 30 * r0 + 16 * rm1 - rm2) / (12 * h * h)
        a_v = (-ap2 + 8 * ap1 - 8 * am1 + am2) / (12 * h)
        worst_rv = max(worst_rv, abs(r_v + a0 / SQRT2))
        worst_rvv = max(worst_rvv, abs(r_vv + a_v / SQRT2))
    assert worst_rv <= 1e-10
    assert worst_rvv <= 1e-10


def test_rw_static_preset_reduces_to_minkowski():
    y = math.pi / 3
    for v in (0.7, 1.3, 2.9):
        pt = rw_spherical_data(v, y, 0, SCALE_FACTOR_PRESETS["static"])
        mink = minkowski_spherical_data(v, y)
        assert pt.M == pytest.approx(mink.M, abs=1e-14)
        assert pt.U == pytest.approx(mink.U, rel=1e-14)
        assert pt.V == pytest.approx(mink.V, rel=1e-14)


def test_rw_radiation_point_pin():
    pt = rw_spherical_data(SQRT2, math.pi / 2, 0, 0.5)
    assert pt.aux["t"] == pytest.approx(1.5 ** (2.0 / 3.0), rel=1e-14)
    assert pt.aux["r"] == pytest.approx(1.0, rel=1e-14)


def test_rw_closed_arc_bound():
    with pytest.raises(ValueError, match="pi"):
        rw_spherical_data(math.pi * SQRT2, math.pi / 2, 1, 0.5)


def test_rw_rejects_bad_arguments():
    with pytest.raises(ValueError, match="v"):
        rw_spherical_data(-1.0, math.pi / 2, 0, 0.5)
    with pytest.raises(ValueError, match="curvature|k"):
        rw_spherical_data(1.0, math.pi / 2, 2, 0.5)


def test_rw_constraint_closed_form_pin():
    # t = 1 corresponds to v = sqrt(2) I(1) = sqrt(2) * 2/3
    assert rw_constraint_G(2.0 * SQRT2 / 3.0, 0, 0.5) == pytest.approx(-0.5, rel=1e-13)


def test_rw_constraint_generically_nonzero():
    for k in (-1, 0, 1):
        assert abs(rw_constraint_G(1.0, k, 0.5)) > 0.05


@pytest.mark.parametrize("n", [201, 401])
def test_rw_fd_matches_closed_form_flat(n):
    spec = BackgroundSpec("robertson_walker", exponent=0.5, curvature=0)
    G, vv, _ = _fd_G(spec, 0.5, 2.5, n)
    Ga = np.array([rw_constraint_G(float(s), 0, 0.5) for s in vv])
    assert np.max(np.abs((G - Ga)[2:-2])) <= 1.5 * RW_G_DIFF[n]


@pytest.mark.parametrize("k, bound", [(1, 2.6e-04), (-1, 3.2e-04)])
def test_rw_fd_matches_closed_form_curved(k, bound):
    spec = BackgroundSpec("robertson_walker", exponent=0.5, curvature=k)
    G, vv, _ = _fd_G(spec, 0.5, 2.5, 401)
    Ga = np.array([rw_constraint_G(float(s), k, 0.5) for s in vv])
    assert np.max(np.abs((G - Ga)[2:-2])) <= bound


def test_generated_exp_neg_u_positive():
    grid = build_grid((0.0, 1.0), (0.5, 2.5), 3, 101, slices=((math.pi / 3, 0.0),))
    for spec in (
        BackgroundSpec("minkowski"),
        BackgroundSpec("robertson_walker", exponent=2.0 / 3.0, curvature=-1),
        BackgroundSpec("robertson_walker", exponent=0.5, curvature=1),
    ):
        lines, _ = sample_boundary_line(spec, grid, 0)
        assert np.all(np.exp(-lines["U"]) > 0.0)
    gridw = build_grid((0.0, 1.0), (-6.0, -3.0), 3, 101, slices=((math.pi / 3, 0.0),))
    lines, _ = sample_boundary_line(
        BackgroundSpec("schwarzschild", direction="incoming", mass=0.5), gridw, 0
    )
    assert np.all(np.exp(-lines["U"]) > 0.0)


def test_background_spec_rejects_unknown_kind():
    with pytest.raises(ValueError, match="kind"):
        BackgroundSpec("desitter")
