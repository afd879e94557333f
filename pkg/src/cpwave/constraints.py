"""Constraint residuals, the transverse constraint function G, and the
jump relations across the wave strip.

The evolution preserves the longitudinal constraint

    U_tt = (U_t^2 + V_t^2 cosh^2 W + W_t^2)/2 - U_t M_t

so its residual on a solution measures scheme error.  The transverse
constraint is not imposed; its residual function

    G = U_vv - (U_v^2 + V_v^2 cosh^2 W + W_v^2)/2 + U_v M_v

is transported across polarized strips by G_t = U_t G, which integrates to
the jump relation log G_plus - log G_minus = U_plus - U_minus.  U itself
obeys exp(-U_plus) - exp(-U_minus) = const in v.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cpwave.fd import diff1, diff1_line, diff2_line
from cpwave.grid import BoundaryData, FieldState, FloatArray, POLARIZED

# G values below this magnitude are treated as constraint-preserving and
# excluded from the logarithmic jump diagnostic.
G_FLOOR = 1.0e-10


def theta_constraint_residual(state: FieldState) -> FloatArray:
    """Longitudinal-constraint residual at interior theta nodes.

    Second-order centered differences along theta, per v-row and slice;
    returns shape (n_slices, n_theta - 2, n_v).
    """
    grid = state.grid
    if grid.n_theta < 3:
        raise ValueError("need at least 3 theta nodes")
    h = grid.dtheta
    out = np.empty((grid.n_slices, grid.n_theta - 2, grid.n_v))
    for s in range(grid.n_slices):
        M, U, V, W = state.M[s], state.U[s], state.V[s], state.W[s]
        ut = (U[2:] - U[:-2]) / (2.0 * h)
        utt = (U[2:] - 2.0 * U[1:-1] + U[:-2]) / (h * h)
        vt = (V[2:] - V[:-2]) / (2.0 * h)
        wt = (W[2:] - W[:-2]) / (2.0 * h)
        mt = (M[2:] - M[:-2]) / (2.0 * h)
        ch = np.cosh(W[1:-1])
        out[s] = utt - 0.5 * (ut**2 + vt**2 * ch**2 + wt**2) + ut * mt
    return out


def v_constraint_G_line(
    m_line: FloatArray,
    u_line: FloatArray,
    v_line: FloatArray,
    w_line: FloatArray,
    dv: float,
) -> FloatArray:
    """G evaluated on a single theta = const line sampled in v.

    Centered differences in the interior, one-sided second-order stencils
    at the endpoints (the jump relations need G there).
    """
    uv = diff1_line(u_line, dv)
    uvv = diff2_line(u_line, dv)
    vv = diff1_line(v_line, dv)
    wv = diff1_line(w_line, dv)
    mv = diff1_line(m_line, dv)
    return uvv - 0.5 * (uv**2 + vv**2 * np.cosh(w_line) ** 2 + wv**2) + uv * mv


def v_constraint_G(state: FieldState, theta_index: int) -> FloatArray:
    """G along the theta-line with the given index; shape (n_slices, n_v)."""
    grid = state.grid
    i = theta_index if theta_index >= 0 else grid.n_theta + theta_index
    if not 0 <= i < grid.n_theta:
        raise IndexError(f"theta index {theta_index} out of range")
    out = np.empty((grid.n_slices, grid.n_v))
    for s in range(grid.n_slices):
        out[s] = v_constraint_G_line(
            state.M[s][i], state.U[s][i], state.V[s][i], state.W[s][i], grid.dv
        )
    return out


def g_transport_check(state: FieldState) -> tuple[FloatArray, FloatArray]:
    """Defect of the polarized transport law G_t = U_t G.

    Computes G on every theta-line, then the defect G_t - U_t G at interior
    theta nodes with centered differences.  Returns (G, defect) of shapes
    (n_slices, n_theta, n_v) and (n_slices, n_theta - 2, n_v).  The law
    holds only for W = 0, so a state carrying a nonzero W is rejected.
    """
    if state.polarization != POLARIZED and np.any(state.W != 0.0):
        raise ValueError("transport law G_t = U_t G requires a plane-polarized state (W = 0)")
    grid = state.grid
    h = grid.dtheta
    G = np.empty((grid.n_slices, grid.n_theta, grid.n_v))
    for s in range(grid.n_slices):
        for i in range(grid.n_theta):
            G[s, i] = v_constraint_G_line(
                state.M[s][i], state.U[s][i], state.V[s][i], state.W[s][i], grid.dv
            )
    defect = np.empty((grid.n_slices, grid.n_theta - 2, grid.n_v))
    for s in range(grid.n_slices):
        gt = (G[s, 2:] - G[s, :-2]) / (2.0 * h)
        ut = (state.U[s][2:] - state.U[s][:-2]) / (2.0 * h)
        defect[s] = gt - ut * G[s, 1:-1]
    return G, defect


@dataclass(slots=True)
class ConstraintReport:
    """Residual fields plus per-v-row norm summaries."""

    theta_residual: FloatArray            # (n_slices, n_theta - 2, n_v)
    g_minus: FloatArray                   # (n_slices, n_v) at theta_min
    g_plus: FloatArray                    # (n_slices, n_v) at theta_max
    transport_defect: FloatArray | None   # polarized states only
    linf_per_row: FloatArray              # (n_slices, n_v)
    l2_per_row: FloatArray                # (n_slices, n_v)
    max_abs_residual: float


def constraint_report(state: FieldState) -> ConstraintReport:
    """Assemble the longitudinal residual, boundary G lines, and norms."""
    grid = state.grid
    res = theta_constraint_residual(state)
    linf = np.max(np.abs(res), axis=1)
    l2 = np.sqrt(grid.dtheta * np.sum(res * res, axis=1))
    transport = None
    if state.polarization == POLARIZED:
        transport = g_transport_check(state)[1]
    return ConstraintReport(
        theta_residual=res,
        g_minus=v_constraint_G(state, 0),
        g_plus=v_constraint_G(state, grid.n_theta - 1),
        transport_defect=transport,
        linf_per_row=linf,
        l2_per_row=l2,
        max_abs_residual=float(np.max(np.abs(res))),
    )


@dataclass(slots=True)
class JumpReport:
    """Jump relations between the near and far edges of the strip.

    u_jump_defect is exp(-U_plus) - exp(-U_minus) minus the constant
    exp(-U0(theta_plus)) - exp(-U0(theta_min)) predicted by the initial
    line.  log_g_defect is log|G_plus| - log|G_minus| - (U_plus - U_minus),
    evaluated only where log_g_valid (both |G| above G_FLOOR with matching
    sign); a run with no valid points is constraint-preserving within
    tolerance and the logarithmic relation is vacuous.
    """

    v: FloatArray                    # (n_v,)
    plus_line: dict[str, FloatArray]  # field -> (n_slices, n_v)
    u_jump_defect: FloatArray        # (n_slices, n_v)
    u_jump_spread: FloatArray        # (n_slices,)
    predicted_u_jump: FloatArray     # (n_slices,)
    g_minus: FloatArray              # (n_slices, n_v)
    g_plus: FloatArray               # (n_slices, n_v)
    log_g_defect: FloatArray         # (n_slices, n_v), zero where invalid
    log_g_valid: np.ndarray          # bool, same shape
    constraint_preserving: bool


def jump_report(state: FieldState, data: BoundaryData) -> JumpReport:
    """Evaluate both jump relations on a completed solution."""
    if not state.complete:
        raise ValueError("jump relations need a completed (non-singular) solution")
    grid = state.grid
    ns, nv = grid.n_slices, grid.n_v

    plus_line = {name: getattr(state, name)[:, -1, :].copy() for name in ("M", "U", "V", "W")}
    u_plus = plus_line["U"]
    u_minus = data.boundary_line["U"]
    u0 = data.initial_line["U"]

    predicted = np.exp(-u0[:, -1]) - np.exp(-u0[:, 0])
    wall = np.exp(-u_plus) - np.exp(-u_minus)
    defect = wall - predicted[:, None]
    spread = wall.max(axis=1) - wall.min(axis=1)

    g_minus = v_constraint_G(state, 0)
    g_plus = v_constraint_G(state, grid.n_theta - 1)
    valid = (
        (np.abs(g_minus) > G_FLOOR)
        & (np.abs(g_plus) > G_FLOOR)
        & (np.sign(g_minus) == np.sign(g_plus))
    )
    log_defect = np.zeros((ns, nv))
    if np.any(valid):
        log_defect[valid] = (
            np.log(np.abs(g_plus[valid]))
            - np.log(np.abs(g_minus[valid]))
            - (u_plus[valid] - u_minus[valid])
        )

    return JumpReport(
        v=grid.v,
        plus_line=plus_line,
        u_jump_defect=defect,
        u_jump_spread=spread,
        predicted_u_jump=predicted,
        g_minus=g_minus,
        g_plus=g_plus,
        log_g_defect=log_defect,
        log_g_valid=valid,
        constraint_preserving=not bool(np.any(valid)),
    )
