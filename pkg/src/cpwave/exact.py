"""Exact polarized solutions built from the additive decomposition
exp(-U) = f(theta) + g(v).

For the polarized system the U-equation U_tv = U_t U_v is solved exactly by
U = -log(f + g) for any profile pair; the remaining metric functions follow
by quadrature.  Two companion M-gauges are provided:

* evolution gauge   M = log(f + g)/2
  satisfies the mixed M-equation only; the longitudinal-constraint residual
  is -f''/(f + g).
* constraint gauge  M = log(f + g)/2 - log f'
  (requires f' > 0) satisfies the longitudinal constraint as well; the
  transverse-constraint function stays G = -g''/(f + g) in both gauges.

These closed forms are the primary oracle for the nonlinear solver and for
the curvature, constraint, and variational diagnostics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from cpwave.grid import CharacteristicGrid, FloatArray

# Step scale for numerically differentiating user-supplied profile
# callables: eps**(1/3) balances truncation against rounding and keeps the
# derivative error around 1e-11, below the scheme truncation of any grid
# this module is used with.
_FD_STEP = 6.055454452393343e-06


class SingularDomainError(ValueError):
    """f + g fails to stay positive on the requested domain."""

    def __init__(self, message: str, theta: float, v: float):
        super().__init__(message)
        self.theta = theta
        self.v = v


def _central_derivative(func: Callable[[float], float]) -> Callable[[float], float]:
    def d(x: float) -> float:
        h = _FD_STEP * max(1.0, abs(x))
        return (func(x + h) - func(x - h)) / (2.0 * h)

    return d


def _as_profile(
    profile: Callable[[float], float] | FloatArray,
    nodes: FloatArray,
    label: str,
) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """Normalize a profile given as a callable or as grid samples.

    Sampled profiles are interpolated with a cubic spline (value error
    O(h^4), derivative error O(h^3), below the corner scheme's truncation).
    Returns (value, derivative) callables.
    """
    if callable(profile):
        return profile, _central_derivative(profile)
    samples = np.asarray(profile, dtype=np.float64)
    if samples.shape != nodes.shape:
        raise ValueError(f"{label}: got {samples.shape} samples for {nodes.shape} nodes")
    from scipy.interpolate import CubicSpline

    spline = CubicSpline(nodes, samples)
    dspline = spline.derivative()
    return (lambda x: float(spline(x))), (lambda x: float(dspline(x)))


@dataclass(frozen=True, slots=True)
class UDecomposition:
    """Additive split exp(-U) = f(theta) + g(v), gauged so g(v_min) = 0."""

    f: Callable[[float], float]
    g: Callable[[float], float]
    df: Callable[[float], float]
    dg: Callable[[float], float]
    theta_min: float
    v_min: float

    def sum(self, theta: float, v: float) -> float:
        return self.f(theta) + self.g(v)

    def u(self, theta: float, v: float) -> float:
        e = self.sum(theta, v)
        if e <= 0.0:
            raise SingularDomainError(
                f"f + g = {e} <= 0 at (theta, v) = ({theta}, {v})", theta, v
            )
        return -float(np.log(e))

    def check_nonsingular(self, grid: CharacteristicGrid) -> None:
        """Raise SingularDomainError if f + g <= 0 anywhere on the grid.

        U data blowing up on the grid (so that f or g cannot even be
        evaluated) is the same breakdown, exp(-U) -> 0, and is reported the
        same way.
        """
        fv = np.array([self._eval_edge(self.f, t, t, grid.v[0]) for t in grid.theta])
        gv = np.array([self._eval_edge(self.g, v, grid.theta[0], v) for v in grid.v])
        e = fv[:, None] + gv[None, :]
        if np.any(e <= 0.0):
            i, j = map(int, np.argwhere(e <= 0.0)[0])
            raise SingularDomainError(
                f"f + g = {e[i, j]} <= 0 at (theta, v) = ({grid.theta[i]}, {grid.v[j]})",
                float(grid.theta[i]),
                float(grid.v[j]),
            )

    @staticmethod
    def _eval_edge(func: Callable[[float], float], x: float, theta: float, v: float) -> float:
        try:
            val = float(func(x))
        except (ValueError, OverflowError, ZeroDivisionError) as exc:
            raise SingularDomainError(
                f"U data blows up at (theta, v) = ({theta}, {v}): {exc}",
                float(theta),
                float(v),
            ) from exc
        if not math.isfinite(val):
            raise SingularDomainError(
                f"exp(-U) degenerates at (theta, v) = ({theta}, {v})",
                float(theta),
                float(v),
            )
        return val


def decompose_U(
    u_initial: Callable[[float], float] | FloatArray,
    u_boundary: Callable[[float], float] | FloatArray,
    theta_min: float,
    v_min: float,
    grid: CharacteristicGrid | None = None,
    *,
    corner_tol: float = 1.0e-12,
) -> UDecomposition:
    """Recover the split exp(-U) = f + g from the two data lines.

    u_initial is U on the line v = v_min (a function of theta), u_boundary
    is U on the line theta = theta_min (a function of v); either may be a
    callable or an array of samples on the corresponding grid nodes (grid
    required in that case).  The gauge g(v_min) = 0 fixes the split:
    f = exp(-u_initial) and g = exp(-u_boundary) - exp(-u_boundary(v_min)).
    When a grid is supplied, positivity of f + g is checked on its nodes.
    """
    if grid is None and not (callable(u_initial) and callable(u_boundary)):
        raise ValueError("sampled profiles need the grid they were sampled on")
    theta_nodes = grid.theta if grid is not None else np.array([theta_min])
    v_nodes = grid.v if grid is not None else np.array([v_min])
    u0, _ = _as_profile(u_initial, theta_nodes, "u_initial")
    um, _ = _as_profile(u_boundary, v_nodes, "u_boundary")

    corner_gap = abs(u0(theta_min) - um(v_min))
    if corner_gap > corner_tol:
        raise ValueError(
            f"data lines disagree at the corner: |U0(theta_min) - Um(v_min)| = {corner_gap:.3e}"
        )
    c0 = float(np.exp(-um(v_min)))

    def f(theta: float) -> float:
        return float(np.exp(-u0(theta)))

    def g(v: float) -> float:
        return float(np.exp(-um(v))) - c0

    dec = UDecomposition(
        f=f,
        g=g,
        df=_central_derivative(f),
        dg=_central_derivative(g),
        theta_min=float(theta_min),
        v_min=float(v_min),
    )
    if grid is not None:
        dec.check_nonsingular(grid)
    return dec


@dataclass(frozen=True, slots=True)
class JumpRelation:
    """U on the far line theta = theta_plus implied by the decomposition.

    jump holds f(theta_plus) - f(theta_min), which equals
    exp(-U_plus(v)) - exp(-U_minus(v)) for every v.
    """

    u_plus: Callable[[float], float]
    jump: float
    theta_plus: float


def u_jump_relation(dec: UDecomposition, theta_plus: float) -> JumpRelation:
    f_plus = dec.f(theta_plus)

    def u_plus(v: float) -> float:
        e = f_plus + dec.g(v)
        if e <= 0.0:
            raise SingularDomainError(
                f"f + g = {e} <= 0 at (theta, v) = ({theta_plus}, {v})", theta_plus, v
            )
        return -float(np.log(e))

    return JumpRelation(
        u_plus=u_plus,
        jump=f_plus - dec.f(dec.theta_min),
        theta_plus=float(theta_plus),
    )


def solve_V_linear(
    dec: UDecomposition,
    v_initial: Callable[[float], float] | FloatArray,
    v_boundary: Callable[[float], float] | FloatArray,
    grid: CharacteristicGrid,
) -> FloatArray:
    """Integrate the linear V-equation (f+g) V_tv = -(g' V_t + f' V_v)/2.

    This is the V evolution equation V_tv = (U_t V_v + U_v V_t)/2 with
    U = -log(f+g) substituted, so its solutions agree with the nonlinear
    system's V.  Uses the same corner scheme and cell-centered derivatives
    as the nonlinear solver, with the coefficients frozen from the
    decomposition; linearity makes the corner solvable in closed form, so
    the output satisfies the discrete equation to rounding.  Returns the V
    field of shape (n_theta, n_v).
    """
    dec.check_nonsingular(grid)
    v0c, _ = _as_profile(v_initial, grid.theta, "v_initial")
    vmc, _ = _as_profile(v_boundary, grid.v, "v_boundary")

    nt, nv = grid.n_theta, grid.n_v
    dt, dvs = grid.dtheta, grid.dv
    area = dt * dvs
    V = np.zeros((nt, nv))
    V[:, 0] = [v0c(t) for t in grid.theta]
    V[0, :] = [vmc(v) for v in grid.v]
    corner_gap = abs(V[0, 0] - v0c(grid.theta_min))
    if corner_gap > 1.0e-12:
        raise ValueError(f"V data lines disagree at the corner by {corner_gap:.3e}")

    theta_c = grid.theta[:-1] + 0.5 * dt
    v_c = grid.v[:-1] + 0.5 * dvs
    f_c = np.array([dec.f(t) for t in theta_c])
    fp_c = np.array([dec.df(t) for t in theta_c])
    g_c = np.array([dec.g(v) for v in v_c])
    gp_c = np.array([dec.dg(v) for v in v_c])

    for j in range(nv - 1):
        gj = g_c[j]
        gpj = gp_c[j]
        for i in range(nt - 1):
            e_c = f_c[i] + gj
            v00 = V[i, j]
            v10 = V[i + 1, j]
            v01 = V[i, j + 1]
            # (f+g)(V11 - V10 - V01 + V00)/area = -(g' Vt + f' Vv)/2 with the
            # cell-centered edge differences; collect the V11 coefficients.
            lhs = e_c / area + gpj / (4.0 * dt) + fp_c[i] / (4.0 * dvs)
            rhs = (
                e_c * (v10 + v01 - v00) / area
                - gpj * (v10 - v01 - v00) / (4.0 * dt)
                - fp_c[i] * (v01 - v10 - v00) / (4.0 * dvs)
            )
            V[i + 1, j + 1] = rhs / lhs
    return V
