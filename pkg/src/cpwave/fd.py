"""Finite-difference stencils shared by the diagnostic modules.

Two accuracy families are provided: second-order (centered interior,
one-sided ends) for the constraint diagnostics, and fourth-order (centered
interior, one-sided ends) for the curvature residuals.  All routines act on
uniform grids and return arrays of the input length; callers that need
clean truncation behaviour exclude the one-sided rings from their norms.
"""
from __future__ import annotations

import numpy as np

from cpwave.grid import FloatArray


def diff1_line(f: FloatArray, h: float) -> FloatArray:
    """Second-order first derivative of a 1-D line."""
    f = np.asarray(f, dtype=np.float64)
    n = f.shape[0]
    if n < 3:
        raise ValueError("need at least 3 nodes for second-order differences")
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return out


def diff2_line(f: FloatArray, h: float) -> FloatArray:
    """Second derivative of a 1-D line: centered interior, one-sided ends.

    The 4-point one-sided stencil at the ends is second order; with only 3
    nodes the parabolic estimate (first order at the ends) is used instead.
    """
    f = np.asarray(f, dtype=np.float64)
    n = f.shape[0]
    if n < 3:
        raise ValueError("need at least 3 nodes for second differences")
    out = np.empty_like(f)
    h2 = h * h
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / h2
    if n >= 4:
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2
        out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / h2
    else:
        out[0] = out[1]
        out[-1] = out[1]
    return out


def diff1(f: FloatArray, h: float, axis: int) -> FloatArray:
    """Second-order first derivative of a 2-D array along the given axis."""
    f = np.asarray(f, dtype=np.float64)
    moved = np.moveaxis(f, axis, 0)
    out = np.empty_like(moved)
    out[1:-1] = (moved[2:] - moved[:-2]) / (2.0 * h)
    out[0] = (-3.0 * moved[0] + 4.0 * moved[1] - moved[2]) / (2.0 * h)
    out[-1] = (3.0 * moved[-1] - 4.0 * moved[-2] + moved[-3]) / (2.0 * h)
    return np.moveaxis(out, 0, axis)


def diff1_4th(f: FloatArray, h: float, axis: int) -> FloatArray:
    """Fourth-order first derivative along an axis (needs >= 5 nodes).

    Interior nodes use the 5-point centered stencil; the two rings nearest
    each end use 5-point one-sided / skewed stencils of the same order.
    """
    f = np.asarray(f, dtype=np.float64)
    moved = np.moveaxis(f, axis, 0)
    n = moved.shape[0]
    if n < 5:
        raise ValueError("need at least 5 nodes for fourth-order differences")
    out = np.empty_like(moved)
    out[2:-2] = (moved[:-4] - 8.0 * moved[1:-3] + 8.0 * moved[3:-1] - moved[4:]) / (12.0 * h)
    out[0] = (-25.0 * moved[0] + 48.0 * moved[1] - 36.0 * moved[2]
              + 16.0 * moved[3] - 3.0 * moved[4]) / (12.0 * h)
    out[1] = (-3.0 * moved[0] - 10.0 * moved[1] + 18.0 * moved[2]
              - 6.0 * moved[3] + moved[4]) / (12.0 * h)
    out[-2] = (3.0 * moved[-1] + 10.0 * moved[-2] - 18.0 * moved[-3]
               + 6.0 * moved[-4] - moved[-5]) / (12.0 * h)
    out[-1] = (25.0 * moved[-1] - 48.0 * moved[-2] + 36.0 * moved[-3]
               - 16.0 * moved[-4] + 3.0 * moved[-5]) / (12.0 * h)
    return np.moveaxis(out, 0, axis)
