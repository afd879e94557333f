"""Discrete action and stationarity diagnostics.

The leading-order Lagrangian density of the reduced system is

    L = { -2 M_tv - 4 U_tv + 3 U_t U_v + V_t V_v cosh^2 W + W_t W_v } exp(-U)
        + lambda { U_tt - (U_t^2 + V_t^2 cosh^2 W + W_t^2)/2 + U_t M_t } exp(-M-U)

with a multiplier lambda enforcing the longitudinal constraint; lambda = 0
is admissible once the variation has been taken.  The discrete action uses
the solver's own cell-centered derivative approximations for the evolution
brace (edge differences, 4-point averages, cell mixed differences) and a
node quadrature of the constraint brace at interior theta nodes, so that
the lambda-direction derivative is exactly the weighted constraint-residual
sum.  Converged solver output is a near-critical point: directional
derivatives against compactly supported perturbations shrink at second
order in the grid spacings.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cosh, exp

import numpy as np

from cpwave.grid import CharacteristicGrid, FieldState, FloatArray

# Central-difference step for directional derivatives of the action.
VARIATION_EPS = 1.0e-6

_FIELDS = ("M", "U", "V", "W")


def lagrangian_density(
    *,
    m: float,
    u: float,
    w: float,
    m_t: float,
    u_t: float,
    u_v: float,
    v_t: float,
    v_v: float,
    w_t: float,
    w_v: float,
    m_tv: float,
    u_tv: float,
    u_tt: float,
    lam: float = 0.0,
) -> float:
    """Pointwise Lagrangian density.

    The evolution brace needs the mixed second derivatives m_tv and u_tv;
    the multiplier brace needs u_tt.  V enters only through derivatives.
    """
    ch2 = cosh(w) ** 2
    evol = (-2.0 * m_tv - 4.0 * u_tv + 3.0 * u_t * u_v + v_t * v_v * ch2 + w_t * w_v) * exp(-u)
    if lam == 0.0:
        return evol
    cons = (u_tt - 0.5 * (u_t**2 + v_t**2 * ch2 + w_t**2) + u_t * m_t) * exp(-m - u)
    return evol + lam * cons


def _evolution_action(M: FloatArray, U: FloatArray, V: FloatArray, W: FloatArray,
                      dt: float, dv: float) -> float:
    area = dt * dv

    def cell(P: FloatArray):
        p00, p10, p01, p11 = P[:-1, :-1], P[1:, :-1], P[:-1, 1:], P[1:, 1:]
        pt = (p11 + p10 - p01 - p00) / (2.0 * dt)
        pv = (p11 + p01 - p10 - p00) / (2.0 * dv)
        mixed = (p11 - p10 - p01 + p00) / area
        avg = 0.25 * (p11 + p10 + p01 + p00)
        return pt, pv, mixed, avg

    _, _, m_tv, _ = cell(M)
    u_t, u_v, u_tv, u_c = cell(U)
    v_t, v_v, _, _ = cell(V)
    w_t, w_v, _, w_c = cell(W)
    dens = (
        -2.0 * m_tv - 4.0 * u_tv + 3.0 * u_t * u_v
        + v_t * v_v * np.cosh(w_c) ** 2 + w_t * w_v
    ) * np.exp(-u_c)
    return float(np.sum(dens) * area)


def _constraint_term(M: FloatArray, U: FloatArray, V: FloatArray, W: FloatArray,
                     lam: FloatArray, dt: float, dv: float) -> float:
    """Node quadrature of lambda * (constraint residual) * exp(-M-U)."""
    u_t = (U[2:] - U[:-2]) / (2.0 * dt)
    u_tt = (U[2:] - 2.0 * U[1:-1] + U[:-2]) / (dt * dt)
    v_t = (V[2:] - V[:-2]) / (2.0 * dt)
    w_t = (W[2:] - W[:-2]) / (2.0 * dt)
    m_t = (M[2:] - M[:-2]) / (2.0 * dt)
    res = u_tt - 0.5 * (u_t**2 + v_t**2 * np.cosh(W[1:-1]) ** 2 + w_t**2) + u_t * m_t
    weight = np.exp(-(M[1:-1] + U[1:-1]))
    return float(np.sum(lam[1:-1] * res * weight) * dt * dv)


def discrete_action(state: FieldState, lam: FloatArray | float | None = None) -> FloatArray:
    """Action per transverse slice; shape (n_slices,).

    lam may be None (multiplier dropped), a scalar, or a field shaped like
    one slice or the full state.
    """
    grid = state.grid
    out = np.empty(grid.n_slices)
    for s in range(grid.n_slices):
        val = _evolution_action(state.M[s], state.U[s], state.V[s], state.W[s],
                                grid.dtheta, grid.dv)
        if lam is not None:
            lam_arr = np.broadcast_to(
                np.asarray(lam, dtype=np.float64),
                (grid.n_theta, grid.n_v) if np.ndim(lam) <= 2 else (grid.n_slices, grid.n_theta, grid.n_v),
            )
            lam_s = lam_arr if lam_arr.ndim == 2 else lam_arr[s]
            val += _constraint_term(state.M[s], state.U[s], state.V[s], state.W[s],
                                    lam_s, grid.dtheta, grid.dv)
        out[s] = val
    return out


def default_perturbation_bank(
    grid: CharacteristicGrid, amplitude: float = 0.25
) -> dict[str, FloatArray]:
    """Four smooth perturbations (one per field) vanishing on all edges.

    Distinct lobe counts per member probe independent directions; the
    amplitude is kept moderate so the quadratic bias of the central
    difference stays far below the defects being measured.
    """
    st = np.linspace(0.0, 1.0, grid.n_theta)[:, None]
    sv = np.linspace(0.0, 1.0, grid.n_v)[None, :]

    def bump(kt: int, kv: int) -> FloatArray:
        out = amplitude * np.sin(np.pi * kt * st) ** 2 * np.sin(np.pi * kv * sv) ** 2
        # sin(pi k) underflows to ~1e-16 instead of 0; the edges are
        # analytically zero and the stationarity check requires them exact.
        out[0, :] = 0.0
        out[-1, :] = 0.0
        out[:, 0] = 0.0
        out[:, -1] = 0.0
        return out

    return {"M": bump(1, 1), "U": bump(1, 2), "V": bump(2, 1), "W": bump(2, 2)}


def _check_bank_member(delta: FloatArray, grid: CharacteristicGrid, name: str) -> None:
    if delta.shape != (grid.n_theta, grid.n_v):
        raise ValueError(f"perturbation {name!r} has shape {delta.shape}, "
                         f"expected {(grid.n_theta, grid.n_v)}")
    edges = [delta[0, :], delta[-1, :], delta[:, 0], delta[:, -1]]
    if any(np.any(e != 0.0) for e in edges):
        raise ValueError(f"perturbation {name!r} must vanish on all four grid edges")


@dataclass(slots=True)
class ActionReport:
    """Directional derivatives of the discrete action.

    defects[name][s] is the derivative of slice s's action along the bank
    member for field `name`; on a converged solution each is
    O(dtheta^2 + dv^2) * ||delta||.  lambda_derivative is the multiplier
    direction probed by central differences; lambda_quadrature is the
    closed-form weighted constraint-residual sum it must reproduce.
    """

    action: FloatArray
    defects: dict[str, FloatArray]
    bank_norms: dict[str, float]
    lambda_derivative: FloatArray
    lambda_quadrature: FloatArray
    eps: float

    def max_defect(self) -> float:
        return max(float(np.max(np.abs(d))) for d in self.defects.values())


def action_stationarity_check(
    state: FieldState,
    bank: dict[str, FloatArray] | None = None,
    *,
    eps: float = VARIATION_EPS,
) -> ActionReport:
    """Probe stationarity of the discrete action at the given state.

    Every bank member (and a multiplier-direction probe reusing the M
    member's bump) is applied as a symmetric central difference with step
    eps.  Perturbations must vanish on all four edges, where the Goursat
    data is pinned.
    """
    grid = state.grid
    dt, dv = grid.dtheta, grid.dv
    if bank is None:
        bank = default_perturbation_bank(grid)
    for name, delta in bank.items():
        _check_bank_member(np.asarray(delta, dtype=np.float64), grid, name)
        if name not in _FIELDS:
            raise ValueError(f"unknown field {name!r} in perturbation bank")

    ns = grid.n_slices
    action = np.empty(ns)
    defects = {name: np.empty(ns) for name in bank}
    lam_deriv = np.empty(ns)
    lam_quad = np.empty(ns)
    lam_probe = bank.get("M")
    if lam_probe is None:
        lam_probe = next(iter(bank.values()))

    for s in range(ns):
        arrays = {name: getattr(state, name)[s] for name in _FIELDS}
        action[s] = _evolution_action(arrays["M"], arrays["U"], arrays["V"], arrays["W"], dt, dv)
        for name, delta in bank.items():
            plus = dict(arrays)
            minus = dict(arrays)
            plus[name] = arrays[name] + eps * delta
            minus[name] = arrays[name] - eps * delta
            s_plus = _evolution_action(plus["M"], plus["U"], plus["V"], plus["W"], dt, dv)
            s_minus = _evolution_action(minus["M"], minus["U"], minus["V"], minus["W"], dt, dv)
            defects[name][s] = (s_plus - s_minus) / (2.0 * eps)
        s_plus = _constraint_term(arrays["M"], arrays["U"], arrays["V"], arrays["W"],
                                  eps * lam_probe, dt, dv)
        s_minus = _constraint_term(arrays["M"], arrays["U"], arrays["V"], arrays["W"],
                                   -eps * lam_probe, dt, dv)
        lam_deriv[s] = (s_plus - s_minus) / (2.0 * eps)
        lam_quad[s] = _constraint_term(arrays["M"], arrays["U"], arrays["V"], arrays["W"],
                                       lam_probe, dt, dv)

    bank_norms = {
        name: float(np.sqrt(np.sum(np.asarray(d) ** 2) * dt * dv)) for name, d in bank.items()
    }
    return ActionReport(
        action=action,
        defects=defects,
        bank_norms=bank_norms,
        lambda_derivative=lam_deriv,
        lambda_quadrature=lam_quad,
        eps=eps,
    )
