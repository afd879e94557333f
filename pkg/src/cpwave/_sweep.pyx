# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Goursat sweep kernel.

Twin of cpwave._sweep_py with identical update formulas in identical
evaluation order; see that module for the algorithm description.  The cell
loop runs without the GIL so transverse slices can be swept from a thread
pool.
"""

from libc.math cimport cosh, exp, fabs, isfinite, log, sinh, tanh

COMPLETED = 0
SINGULAR = 1
DIVERGED = 2

BACKEND = "cython"

cdef int _COMPLETED = 0
cdef int _SINGULAR = 1
cdef int _DIVERGED = 2


def goursat_sweep(
    double[:, ::1] M,
    double[:, ::1] U,
    double[:, ::1] V,
    double[:, ::1] W,
    double dtheta,
    double dv,
    bint general,
    double fp_tol,
    int max_iter,
    double sing_threshold,
    double w_cap,
):
    """Fill rows/columns >= 1 of the field arrays in place.

    Returns (status, loc_i, loc_j, max_iterations_used, max_residual);
    same contract as cpwave._sweep_py.goursat_sweep.
    """
    cdef Py_ssize_t n_theta = M.shape[0]
    cdef Py_ssize_t n_v = M.shape[1]
    cdef double idt2 = 1.0 / (2.0 * dtheta)
    cdef double idv2 = 1.0 / (2.0 * dv)
    cdef double area = dtheta * dv
    cdef double u_sing = -log(sing_threshold)

    cdef int status = _COMPLETED
    cdef Py_ssize_t loc_i = -1
    cdef Py_ssize_t loc_j = -1
    cdef int iters_max = 0
    cdef double resid_max = 0.0

    cdef Py_ssize_t i, j
    cdef int it, used
    cdef bint converged, singular
    cdef double m00, m10, m01, u00, u10, u01, v00, v10, v01, w00, w10, w01
    cdef double base_m, base_u, base_v, base_w
    cdef double m11, u11, v11, w11
    cdef double uth, uv_, vth, vv_, wth, wv_, wc, ch, sh, th
    cdef double fu, fv, fw, fm, nm, nu, nv, nw, d, d2, delta

    with nogil:
        for j in range(n_v - 1):
            for i in range(n_theta - 1):
                m00 = M[i, j]
                m10 = M[i + 1, j]
                m01 = M[i, j + 1]
                u00 = U[i, j]
                u10 = U[i + 1, j]
                u01 = U[i, j + 1]
                v00 = V[i, j]
                v10 = V[i + 1, j]
                v01 = V[i, j + 1]
                w00 = W[i, j]
                w10 = W[i + 1, j]
                w01 = W[i, j + 1]

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
                        d = fabs(nm - m11)
                        d2 = fabs(nu - u11)
                        if d2 > d:
                            d = d2
                        d2 = fabs(nv - v11)
                        if d2 > d:
                            d = d2
                        d2 = fabs(nw - w11)
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
                    status = _SINGULAR
                    loc_i = i + 1
                    loc_j = j + 1
                    break
                if (
                    not converged
                    or not (isfinite(m11) and isfinite(u11) and isfinite(v11) and isfinite(w11))
                    or fabs(w11) > w_cap
                ):
                    status = _DIVERGED
                    loc_i = i + 1
                    loc_j = j + 1
                    break

                M[i + 1, j + 1] = m11
                U[i + 1, j + 1] = u11
                V[i + 1, j + 1] = v11
                W[i + 1, j + 1] = w11
                if used > iters_max:
                    iters_max = used
                if delta > resid_max:
                    resid_max = delta
            if status != _COMPLETED:
                break

    return status, loc_i, loc_j, iters_max, resid_max
