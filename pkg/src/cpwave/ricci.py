"""Ricci residual oracle: leading asymptotic curvature components evaluated
directly from the metric matrices.

The wave-zone metric is encoded by g_01 = -exp(-M) and the transverse block

    g_ab = [ exp(-U+V) cosh W      -exp(-U) sinh W  ]
           [ -exp(-U) sinh W     exp(-U-V) cosh W   ]

with det g_ab = exp(-2U).  The three curvature components that the reduced
system controls are (",t" = d/dtheta, ",1" = d/dv)

    R(-2)_00 = -(g^ab g_ab,t),t / 2 - g^ac g_bc,t g^bd g_ad,t / 4
               + g^01 g_01,t g^ab g_ab,t / 2
    R(-1)_01 = -(g^01 g_01,1),t - (g^ab g_ab,1),t / 2
               - g^ac g_bc,t g^bd g_ad,1 / 4
    R(-1)_ab = -g^01 ( g_ab,1t - g^cd (g_ac,t g_bd,1 + g_ac,1 g_bd,t) / 2
                       + g^cd (g_cd,1 g_ab,t + g_cd,t g_ab,1) / 4 )

These are computed with fourth-order stencils on the raw matrix entries, so
they are an oracle independent of the reduced equations.  Exact identities
(verified symbolically once, frozen in the test suite) link them to the
reduced residuals rU, rV, rW, rM and the longitudinal constraint:

    R(-2)_00 = constraint residual            (factor exactly 1)
    R(-1)_01 = rM + rU                        (unit coefficients)
    R(-1)_ab = exp(M-U) (-rU K + rV dK/dV + rW dK/dW),  K = exp(U) g_ab

ricci_from_reduced evaluates the right-hand sides of these identities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cpwave.fd import diff1_4th
from cpwave.grid import FieldState, FloatArray
from cpwave.solver import OverflowGuardError, W_CAP

# Rings of nodes (per edge) excluded from residual norms; the one-sided
# fourth-order stencils live there.
INTERIOR_MARGIN = 2


def metric_components(
    state: FieldState, point: tuple[int, int, int]
) -> tuple[float, FloatArray, FloatArray]:
    """(g_01, g_ab, g^ab) at grid point (slice, i_theta, j_v).

    The inverse is closed-form: g^ab = exp(U) K^{-1} with
    K^{-1} = [[exp(-V) cosh W, sinh W], [sinh W, exp(V) cosh W]].
    """
    s, i, j = point
    m = float(state.M[s, i, j])
    u = float(state.U[s, i, j])
    v = float(state.V[s, i, j])
    w = float(state.W[s, i, j])
    if not (abs(w) <= W_CAP):
        raise OverflowGuardError(f"|W| = {abs(w)} exceeds cap {W_CAP}")
    g01 = -np.exp(-m)
    ch, sh = np.cosh(w), np.sinh(w)
    g_ab = np.array(
        [
            [np.exp(-u + v) * ch, -np.exp(-u) * sh],
            [-np.exp(-u) * sh, np.exp(-u - v) * ch],
        ]
    )
    g_inv = np.exp(u) * np.array(
        [
            [np.exp(-v) * ch, sh],
            [sh, np.exp(v) * ch],
        ]
    )
    return float(g01), g_ab, g_inv


@dataclass(slots=True)
class RicciResiduals:
    """Curvature residual fields and their interior norms.

    r00_m2: R(-2)_00, shape (n_slices, n_theta, n_v).
    r01_m1: R(-1)_01, same shape.
    rab_m1: R(-1)_ab, shape (n_slices, n_theta, n_v, 2, 2); the (0,1) and
    (1,0) components are equal by construction.  Norms are L-infinity over
    the interior, excluding INTERIOR_MARGIN rings along every edge.
    """

    r00_m2: FloatArray
    r01_m1: FloatArray
    rab_m1: FloatArray
    norms: dict[str, float]


def _interior(a: FloatArray) -> FloatArray:
    k = INTERIOR_MARGIN
    return a[..., k:-k, k:-k]


def _matrix_fields(state: FieldState, s: int):
    M, U, V, W = state.M[s], state.U[s], state.V[s], state.W[s]
    if np.max(np.abs(W)) > W_CAP:
        raise OverflowGuardError(f"|W| exceeds cap {W_CAP}")
    ch = np.cosh(W)
    sh = np.sinh(W)
    g01 = -np.exp(-M)
    p = np.exp(-U + V) * ch
    q = -np.exp(-U) * sh
    r = np.exp(-U - V) * ch
    return g01, p, q, r


def ricci_residuals(state: FieldState) -> RicciResiduals:
    """Evaluate the three curvature components on every slice.

    Needs at least 5 nodes per direction.  All output entries are finite;
    norms cover the interior only, where the stencils are centered.
    """
    grid = state.grid
    if grid.n_theta < 5 or grid.n_v < 5:
        raise ValueError("curvature residuals need at least 5 nodes per direction")
    dt, dv = grid.dtheta, grid.dv
    ns = grid.n_slices
    shape = (ns, grid.n_theta, grid.n_v)
    r00 = np.empty(shape)
    r01 = np.empty(shape)
    rab = np.empty(shape + (2, 2))

    for s in range(ns):
        g01, p, q, r = _matrix_fields(state, s)
        det = p * r - q * q
        i22 = r / det
        i23 = -q / det
        i33 = p / det
        g01_inv = 1.0 / g01

        def dth(x: FloatArray) -> FloatArray:
            return diff1_4th(x, dt, 0)

        def dvv(x: FloatArray) -> FloatArray:
            return diff1_4th(x, dv, 1)

        g01_t, g01_v = dth(g01), dvv(g01)
        p_t, p_v = dth(p), dvv(p)
        q_t, q_v = dth(q), dvv(q)
        r_t, r_v = dth(r), dvv(r)

        c_t = i22 * p_t + 2.0 * i23 * q_t + i33 * r_t   # g^ab g_ab,t
        c_v = i22 * p_v + 2.0 * i23 * q_v + i33 * r_v   # g^ab g_ab,1

        # A = g^{-1} g_t, B = g^{-1} g_1
        a11 = i22 * p_t + i23 * q_t
        a12 = i22 * q_t + i23 * r_t
        a21 = i23 * p_t + i33 * q_t
        a22 = i23 * q_t + i33 * r_t
        b11 = i22 * p_v + i23 * q_v
        b12 = i22 * q_v + i23 * r_v
        b21 = i23 * p_v + i33 * q_v
        b22 = i23 * q_v + i33 * r_v

        r00[s] = (
            -0.5 * dth(c_t)
            - 0.25 * (a11 * a11 + 2.0 * a12 * a21 + a22 * a22)
            + 0.5 * (g01_inv * g01_t) * c_t
        )
        r01[s] = (
            -dth(g01_inv * g01_v)
            - 0.5 * dth(c_v)
            - 0.25 * (a11 * b11 + a12 * b21 + a21 * b12 + a22 * b22)
        )

        # X = g_t g^{-1} g_1; the symmetrized pair is X + X^T
        x11 = p_t * b11 + q_t * b21
        x12 = p_t * b12 + q_t * b22
        x21 = q_t * b11 + r_t * b21
        x22 = q_t * b12 + r_t * b22

        p_tv = dvv(p_t)
        q_tv = dvv(q_t)
        r_tv = dvv(r_t)

        inner22 = p_tv - 0.5 * (2.0 * x11) + 0.25 * (c_v * p_t + c_t * p_v)
        inner23 = q_tv - 0.5 * (x12 + x21) + 0.25 * (c_v * q_t + c_t * q_v)
        inner33 = r_tv - 0.5 * (2.0 * x22) + 0.25 * (c_v * r_t + c_t * r_v)
        rab[s, :, :, 0, 0] = -g01_inv * inner22
        rab[s, :, :, 0, 1] = -g01_inv * inner23
        rab[s, :, :, 1, 0] = rab[s, :, :, 0, 1]
        rab[s, :, :, 1, 1] = -g01_inv * inner33

    norms = {
        "r00_m2": float(np.max(np.abs(_interior(r00)))),
        "r01_m1": float(np.max(np.abs(_interior(r01)))),
        "rab_m1": float(np.max(np.abs(_interior(np.moveaxis(rab, (3, 4), (1, 2)))))),
    }
    return RicciResiduals(r00_m2=r00, r01_m1=r01, rab_m1=rab, norms=norms)


def reduced_residual_fields(state: FieldState) -> dict[str, FloatArray]:
    """Evolution-equation and constraint residuals via fourth-order stencils.

    Returns rU, rV, rW, rM (mixed-equation residuals) and 'constraint' (the
    longitudinal residual), each shaped (n_slices, n_theta, n_v).  Matching
    the stencil order of ricci_residuals makes the identity comparison
    meaningful at truncation order.
    """
    grid = state.grid
    dt, dv = grid.dtheta, grid.dv
    out = {k: np.empty((grid.n_slices, grid.n_theta, grid.n_v)) for k in
           ("rU", "rV", "rW", "rM", "constraint")}
    for s in range(grid.n_slices):
        M, U, V, W = state.M[s], state.U[s], state.V[s], state.W[s]
        u_t, u_v = diff1_4th(U, dt, 0), diff1_4th(U, dv, 1)
        v_t, v_v = diff1_4th(V, dt, 0), diff1_4th(V, dv, 1)
        w_t, w_v = diff1_4th(W, dt, 0), diff1_4th(W, dv, 1)
        m_t = diff1_4th(M, dt, 0)
        u_tv = diff1_4th(u_t, dv, 1)
        v_tv = diff1_4th(v_t, dv, 1)
        w_tv = diff1_4th(w_t, dv, 1)
        m_tv = diff1_4th(m_t, dv, 1)
        u_tt = diff1_4th(u_t, dt, 0)
        ch, sh, th = np.cosh(W), np.sinh(W), np.tanh(W)
        out["rU"][s] = u_tv - u_t * u_v
        out["rV"][s] = v_tv - 0.5 * (u_t * v_v + u_v * v_t) + (v_t * w_v + v_v * w_t) * th
        out["rW"][s] = w_tv - 0.5 * (u_t * w_v + u_v * w_t) - v_t * v_v * sh * ch
        out["rM"][s] = m_tv - 0.5 * (-(u_t * u_v) + v_t * v_v * ch * ch + w_t * w_v)
        out["constraint"][s] = (
            u_tt - 0.5 * (u_t**2 + v_t**2 * ch**2 + w_t**2) + u_t * m_t
        )
    return out


def ricci_from_reduced(state: FieldState) -> RicciResiduals:
    """Curvature residuals predicted by the reduced-equation identities.

    Uses R(-2)_00 = constraint residual, R(-1)_01 = rM + rU and
    R(-1)_ab = exp(M-U) (-rU K + rV dK/dV + rW dK/dW), all evaluated with
    the same fourth-order stencils as reduced_residual_fields.  On smooth
    states this agrees with ricci_residuals to truncation order.
    """
    grid = state.grid
    res = reduced_residual_fields(state)
    ns = grid.n_slices
    shape = (ns, grid.n_theta, grid.n_v)
    rab = np.empty(shape + (2, 2))
    for s in range(ns):
        V, W = state.V[s], state.W[s]
        amp = np.exp(state.M[s] - state.U[s])
        ch, sh = np.cosh(W), np.sinh(W)
        ev, evm = np.exp(V), np.exp(-V)
        rU, rV, rW = res["rU"][s], res["rV"][s], res["rW"][s]
        # K, dK/dV, dK/dW entrywise
        rab[s, :, :, 0, 0] = amp * (-rU * ev * ch + rV * ev * ch + rW * ev * sh)
        rab[s, :, :, 0, 1] = amp * (rU * sh - rW * ch)
        rab[s, :, :, 1, 0] = rab[s, :, :, 0, 1]
        rab[s, :, :, 1, 1] = amp * (-rU * evm * ch - rV * evm * ch + rW * evm * sh)
    norms = {
        "r00_m2": float(np.max(np.abs(_interior(res["constraint"])))),
        "r01_m1": float(np.max(np.abs(_interior(res["rM"] + res["rU"])))),
        "rab_m1": float(np.max(np.abs(_interior(np.moveaxis(rab, (3, 4), (1, 2)))))),
    }
    return RicciResiduals(
        r00_m2=res["constraint"],
        r01_m1=res["rM"] + res["rU"],
        rab_m1=rab,
        norms=norms,
    )
