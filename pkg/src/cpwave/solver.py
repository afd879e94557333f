"""Characteristic (Goursat) evolution of the reduced wave equations.

The hyperbolic system for the metric functions M, U, V, W on the strip is

    U_tv = U_t U_v
    V_tv = (U_t V_v + U_v V_t)/2 - (V_t W_v + V_v W_t) tanh W
    W_tv = (U_t W_v + U_v W_t)/2 + V_t V_v sinh W cosh W
    M_tv = (-U_t U_v + V_t V_v cosh^2 W + W_t W_v)/2

(subscript t = d/dtheta, v = d/dv); the polarized system is the W = 0
reduction.  Given data on the initial line v = v_min and the boundary line
theta = theta_min, solve_goursat marches a second-order corner scheme

    P(i+1,j+1) = P(i+1,j) + P(i,j+1) - P(i,j) + dtheta*dv*F(cell center)

with cell-centered first derivatives built from edge differences and the
cell value taken as the 4-point average.  The corner is implicit and is
resolved by fixed-point iteration; the converged corner satisfies the cell
equation P11 - (P10 + P01 - P00 + dtheta*dv*F) to below FP_TOL in the
units of the field itself.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cosh, sinh, tanh

import numpy as np

from cpwave import _kernel
from cpwave.grid import (
    GENERAL,
    POLARIZED,
    BoundaryData,
    CharacteristicGrid,
    FieldState,
    FloatArray,
)

# Fixed-point iteration: absolute tolerance per field and iteration cap.
FP_TOL = 1.0e-12
MAX_FP_ITER = 50

# A cell counts as singular once exp(-U) drops below this threshold.
SING_THRESHOLD = 1.0e-8

# Hyperbolic functions of W are evaluated only for |W| <= W_CAP.
W_CAP = 300.0

STATUS_COMPLETED = "completed"
STATUS_SINGULAR = "singular"
STATUS_DIVERGED = "diverged"

_STATUS_NAMES = {
    _kernel.COMPLETED: STATUS_COMPLETED,
    _kernel.SINGULAR: STATUS_SINGULAR,
    _kernel.DIVERGED: STATUS_DIVERGED,
}


class OverflowGuardError(ValueError):
    """Raised when |W| exceeds W_CAP and cosh/sinh would be meaningless."""


@dataclass(frozen=True, slots=True)
class MixedDerivatives:
    """Right-hand sides F of the four mixed-derivative equations."""

    M: float
    U: float
    V: float
    W: float


def mixed_derivatives_polarized(
    u_t: float, u_v: float, v_t: float, v_v: float
) -> MixedDerivatives:
    """RHS of the polarized (W = 0) system at a point."""
    return MixedDerivatives(
        M=0.5 * (-(u_t * u_v) + v_t * v_v),
        U=u_t * u_v,
        V=0.5 * (u_t * v_v + u_v * v_t),
        W=0.0,
    )


def mixed_derivatives_general(
    u_t: float,
    u_v: float,
    v_t: float,
    v_v: float,
    w_t: float,
    w_v: float,
    w: float,
) -> MixedDerivatives:
    """RHS of the general (both polarizations) system at a point."""
    if not (abs(w) <= W_CAP):
        raise OverflowGuardError(f"|W| = {abs(w)} exceeds cap {W_CAP}")
    ch = cosh(w)
    sh = sinh(w)
    th = tanh(w)
    return MixedDerivatives(
        M=0.5 * (-(u_t * u_v) + v_t * v_v * (ch * ch) + w_t * w_v),
        U=u_t * u_v,
        V=0.5 * (u_t * v_v + u_v * v_t) - (v_t * w_v + v_v * w_t) * th,
        W=0.5 * (u_t * w_v + u_v * w_t) + v_t * v_v * sh * ch,
    )


@dataclass(frozen=True, slots=True)
class FixedPointStats:
    """Worst-case fixed-point behaviour over all swept cells."""

    max_iterations: int
    max_residual: float


@dataclass(slots=True)
class SolveResult:
    """Outcome of a Goursat solve.

    status is one of 'completed', 'singular', 'diverged'.  For a
    non-completed run singular_location holds (theta, v, slice_index) of
    the first offending cell; every cell preceding it in sweep order is
    filled and the state's `filled` mask records the populated region.
    """

    state: FieldState
    status: str
    singular_location: tuple[float, float, int] | None
    min_exp_neg_u: float
    fixed_point: FixedPointStats

    @property
    def grid(self) -> CharacteristicGrid:
        return self.state.grid


def _fill_mask(n_theta: int, n_v: int, loc_i: int, loc_j: int) -> np.ndarray:
    """Populated region of a sweep halted before storing cell (loc_i, loc_j).

    Columns before the halt are complete, the halt column is filled up to
    the offending row, and the two data lines (theta row 0, v column 0)
    are always populated.
    """
    mask = np.zeros((n_theta, n_v), dtype=bool)
    mask[:, :loc_j] = True
    mask[:loc_i, loc_j] = True
    mask[0, :] = True
    return mask


def solve_goursat(
    system: str,
    data: BoundaryData,
    grid: CharacteristicGrid | None = None,
    *,
    fp_tol: float = FP_TOL,
    max_fp_iter: int = MAX_FP_ITER,
    sing_threshold: float = SING_THRESHOLD,
    w_cap: float = W_CAP,
    threads: int = 1,
) -> SolveResult:
    """March the corner scheme over every transverse slice.

    system is 'polarized' or 'general'; polarized data must carry W = 0 on
    both lines.  grid defaults to data.grid and must match it otherwise.
    threads > 1 sweeps slices concurrently (profitable with the compiled
    kernel, which releases the GIL); results are independent of the thread
    count.
    """
    if system not in (POLARIZED, GENERAL):
        raise ValueError(f"unknown system {system!r}")
    if grid is None:
        grid = data.grid
    elif grid != data.grid:
        raise ValueError("grid does not match the grid the data was sampled on")

    ns, nt, nv = grid.n_slices, grid.n_theta, grid.n_v
    if system == POLARIZED:
        for part, label in ((data.initial_line, "initial"), (data.boundary_line, "boundary")):
            if np.any(part["W"] != 0.0):
                raise ValueError(f"polarized solve requires W = 0 on the {label} line")

    shape = (ns, nt, nv)
    fields = {name: np.zeros(shape) for name in ("M", "U", "V", "W")}
    for name, arr in fields.items():
        arr[:, :, 0] = data.initial_line[name]
        arr[:, 0, :] = data.boundary_line[name]

    general = system == GENERAL
    results: list[tuple[int, int, int, int, float]] = [None] * ns  # type: ignore[list-item]

    def sweep(s: int) -> None:
        results[s] = _kernel.goursat_sweep(
            fields["M"][s],
            fields["U"][s],
            fields["V"][s],
            fields["W"][s],
            grid.dtheta,
            grid.dv,
            general,
            fp_tol,
            max_fp_iter,
            sing_threshold,
            w_cap,
        )

    if threads > 1 and ns > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=min(threads, ns)) as pool:
            list(pool.map(sweep, range(ns)))
    else:
        for s in range(ns):
            sweep(s)

    status = STATUS_COMPLETED
    location: tuple[float, float, int] | None = None
    filled = np.ones(shape, dtype=bool)
    iters_max = 0
    resid_max = 0.0
    theta_nodes = grid.theta
    v_nodes = grid.v
    for s in range(ns):
        st, loc_i, loc_j, it_used, resid = results[s]
        iters_max = max(iters_max, it_used)
        resid_max = max(resid_max, resid)
        if st != _kernel.COMPLETED:
            filled[s] = _fill_mask(nt, nv, loc_i, loc_j)
            if status == STATUS_COMPLETED:
                status = _STATUS_NAMES[st]
                location = (float(theta_nodes[loc_i]), float(v_nodes[loc_j]), s)

    u_filled = fields["U"][filled]
    min_exp = float(np.exp(-u_filled.max())) if u_filled.size else float("nan")

    state = FieldState(
        grid=grid,
        polarization=system,
        M=fields["M"],
        U=fields["U"],
        V=fields["V"],
        W=fields["W"],
        filled=filled,
    )
    return SolveResult(
        state=state,
        status=status,
        singular_location=location,
        min_exp_neg_u=min_exp,
        fixed_point=FixedPointStats(max_iterations=iters_max, max_residual=resid_max),
    )


def discrete_residual(state: FieldState) -> dict[str, float]:
    """Worst cell-equation residual |P11 - (P10 + P01 - P00 + area*F)| per field.

    Measures how exactly the state satisfies the discrete scheme (in the
    units of the field values, matching the fixed-point stopping rule); a
    converged solve keeps every entry at or below FP_TOL.
    """
    grid = state.grid
    dt, dv = grid.dtheta, grid.dv
    idt2 = 1.0 / (2.0 * dt)
    idv2 = 1.0 / (2.0 * dv)
    area = dt * dv
    general = state.polarization == GENERAL

    worst = {name: 0.0 for name in ("M", "U", "V", "W")}
    for s in range(grid.n_slices):
        M, U, V, W = state.M[s], state.U[s], state.V[s], state.W[s]
        filled = state.filled[s]
        cell_ok = filled[:-1, :-1] & filled[1:, :-1] & filled[:-1, 1:] & filled[1:, 1:]

        def edge(P: FloatArray) -> tuple[FloatArray, FloatArray, FloatArray]:
            p00, p10, p01, p11 = P[:-1, :-1], P[1:, :-1], P[:-1, 1:], P[1:, 1:]
            pt = (p11 + p10 - p01 - p00) * idt2
            pv = (p11 + p01 - p10 - p00) * idv2
            mixed = p11 - (p10 + p01 - p00)
            return pt, pv, mixed

        ut, uv, mu = edge(U)
        vt, vv, mv = edge(V)
        mt_, mv_, mm = edge(M)
        wt, wv, mw = edge(W)
        if general:
            wc = 0.25 * (W[1:, 1:] + W[1:, :-1] + W[:-1, 1:] + W[:-1, :-1])
            ch = np.cosh(wc)
            sh = np.sinh(wc)
            th = np.tanh(wc)
            fu = ut * uv
            fv = 0.5 * (ut * vv + uv * vt) - (vt * wv + vv * wt) * th
            fw = 0.5 * (ut * wv + uv * wt) + vt * vv * sh * ch
            fm = 0.5 * (-(ut * uv) + vt * vv * (ch * ch) + wt * wv)
        else:
            fu = ut * uv
            fv = 0.5 * (ut * vv + uv * vt)
            fw = np.zeros_like(fu)
            fm = 0.5 * (-(ut * uv) + vt * vv)
        for name, mixed, f in (("M", mm, fm), ("U", mu, fu), ("V", mv, fv), ("W", mw, fw)):
            res = np.abs(mixed - area * f)[cell_ok]
            if res.size:
                worst[name] = max(worst[name], float(res.max()))
    return worst
