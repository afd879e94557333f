"""Pure-Python Goursat sweep kernel.

Fallback twin of the compiled extension cpwave._sweep: identical update
formulas in identical evaluation order, so the two backends agree to
rounding.  The sweep fills the interior of one transverse slice from data
on the initial line (column 0) and the boundary line (row 0), marching
v-row by v-row with an implicit corner solved by fixed-point iteration.
"""
from __future__ import annotations

from math import cosh, exp, isfinite, log, sinh, tanh

import numpy as np

COMPLETED = 0
SINGULAR = 1
DIVERGED = 2

BACKEND = "python"


def goursat_sweep(
    M: np.ndarray,
    U: np.ndarray,
    V: np.ndarray,
    W: np.ndarray,
    dtheta: float,
    dv: float,
    general: bool,
    fp_tol: float,
    max_iter: int,
    sing_threshold: float,
    w_cap: float,
) -> tuple[int, int, int, int, float]:
    """Fill rows/columns >= 1 of the field arrays in place.

    Returns (status, loc_i, loc_j, max_iterations_used, max_residual).
    loc_i/loc_j are -1 on completion, otherwise the (theta, v) indices of
    the first cell that went singular or failed to converge; that cell is
    left unfilled.  The singularity test exp(-U) < sing_threshold is
    applied as U > -log(sing_threshold) to avoid overflow.
    """
    n_theta, n_v = M.shape
    idt2 = 1.0 / (2.0 * dtheta)
    idv2 = 1.0 / (2.0 * dv)
    area = dtheta * dv
    u_sing = -log(sing_threshold)

    m = M.tolist()
    u = U.tolist()
    v = V.tolist()
    w = W.tolist()

    status = COMPLETED
    loc_i = -1
    loc_j = -1
    iters_max = 0
    resid_max = 0.0

    for j in range(n_v - 1):
        for i in range(n_theta - 1):
            m00 = m[i][j]
            m10 = m[i + 1][j]
            m01 = m[i][j + 1]
            u00 = u[i][j]
            u10 = u[i + 1][j]
            u01 = u[i][j + 1]
            v00 = v[i][j]
            v10 = v[i + 1][j]
            v01 = v[i][j + 1]
            w00 = w[i][j]
            w10 = w[i + 1][j]
            w01 = w[i][j + 1]

            base_m = m10 + m01 - m00
            base_u = u10 + u01 - u00
            base_v = v10 + v01 - v00
            base_w = w10 + w01 - w00

            m11 = base_m
            u11 = base_u
            v11 = base_v
            w11 = base_w

            converged = False
            singular = u11 > u_sing
            delta = 0.0
            used = 0
            if not singular:
                for it in range(1, max_iter + 1):
                    uth = (u11 + u10 - u01 - u00) * idt2
                    uv_ = (u11 + u01 - u10 - u00) * idv2
                    vth = (v11 + v10 - v01 - v00) * idt2
                    vv_ = (v11 + v01 - v10 - v00) * idv2
                    if general:
                        wth = (w11 + w10 - w01 - w00) * idt2
                        wv_ = (w11 + w01 - w10 - w00) * idv2
                        wc = 0.25 * (w11 + w10 + w01 + w00)
                        if not isfinite(wc) or wc > w_cap or wc < -w_cap:
                            converged = False
                            break
                        ch = cosh(wc)
                        sh = sinh(wc)
                        th = tanh(wc)
                        fu = uth * uv_
                        fv = 0.5 * (uth * vv_ + uv_ * vth) - (vth * wv_ + vv_ * wth) * th
                        fw = 0.5 * (uth * wv_ + uv_ * wth) + vth * vv_ * sh * ch
                        fm = 0.5 * (-(uth * uv_) + vth * vv_ * (ch * ch) + wth * wv_)
                        nm = base_m + area * fm
                        nu = base_u + area * fu
                        nv = base_v + area * fv
                        nw = base_w + area * fw
                    else:
                        fu = uth * uv_
                        fv = 0.5 * (uth * vv_ + uv_ * vth)
                        fm = 0.5 * (-(uth * uv_) + vth * vv_)
                        nm = base_m + area * fm
                        nu = base_u + area * fu
                        nv = base_v + area * fv
                        nw = base_w
                    d = abs(nm - m11)
                    d2 = abs(nu - u11)
                    if d2 > d:
                        d = d2
                    d2 = abs(nv - v11)
                    if d2 > d:
                        d = d2
                    d2 = abs(nw - w11)
                    if d2 > d:
                        d = d2
                    m11 = nm
                    u11 = nu
                    v11 = nv
                    w11 = nw
                    delta = d
                    used = it
                    if u11 > u_sing:
                        singular = True
                        break
                    if d <= fp_tol:
                        converged = True
                        break

            if singular:
                status = SINGULAR
                loc_i = i + 1
                loc_j = j + 1
                break
            if (
                not converged
                or not (isfinite(m11) and isfinite(u11) and isfinite(v11) and isfinite(w11))
                or abs(w11) > w_cap
            ):
                status = DIVERGED
                loc_i = i + 1
                loc_j = j + 1
                break

            m[i + 1][j + 1] = m11
            u[i + 1][j + 1] = u11
            v[i + 1][j + 1] = v11
            w[i + 1][j + 1] = w11
            if used > iters_max:
                iters_max = used
            if delta > resid_max:
                resid_max = delta
        if status != COMPLETED:
            break

    M[...] = m
    U[...] = u
    V[...] = v
    W[...] = w
    return status, loc_i, loc_j, iters_max, resid_max
