"""Characteristic grids and field containers for the wave strip.

The computational domain is a rectangle in the characteristic coordinates
(theta, v): theta runs along the wave profile, v into the background.  Data
lives on uniform tensor-product grids; the transverse plane is represented
by a finite list of (y, z) parameter slices that never enter the evolution
equations, only the boundary data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]

# Angular slices must keep this distance (radians) from the axis poles,
# where sin y vanishes and the spherical data forms degenerate.
POLE_GUARD = 1.0e-3

# Polarization flags for states and solver entry points.
POLARIZED = "polarized"
GENERAL = "general"

# Corner values of the two data lines must agree to this tolerance.
CORNER_TOL = 1.0e-12

FIELD_NAMES = ("M", "U", "V", "W")


def _pole_distance(y: float) -> float:
    """Distance of y from the nearest multiple of pi."""
    r = math.fmod(y, math.pi)
    if r < 0.0:
        r += math.pi
    return min(r, math.pi - r)


@dataclass(frozen=True, slots=True)
class CharacteristicGrid:
    """Uniform grid on [theta_min, theta_max] x [v_min, v_max] with transverse slices."""

    theta_min: float
    theta_max: float
    v_min: float
    v_max: float
    n_theta: int
    n_v: int
    slices: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if self.n_theta < 2 or self.n_v < 2:
            raise ValueError(f"need at least 2 nodes per direction, got {self.n_theta}x{self.n_v}")
        if not (self.theta_max > self.theta_min):
            raise ValueError(f"nonpositive theta extent: [{self.theta_min}, {self.theta_max}]")
        if not (self.v_max > self.v_min):
            raise ValueError(f"nonpositive v extent: [{self.v_min}, {self.v_max}]")
        if not all(map(math.isfinite, (self.theta_min, self.theta_max, self.v_min, self.v_max))):
            raise ValueError("grid extents must be finite")
        if len(self.slices) == 0:
            raise ValueError("need at least one transverse slice")
        for y, z in self.slices:
            if not (math.isfinite(y) and math.isfinite(z)):
                raise ValueError(f"non-finite slice ({y}, {z})")

    @property
    def dtheta(self) -> float:
        return (self.theta_max - self.theta_min) / (self.n_theta - 1)

    @property
    def dv(self) -> float:
        return (self.v_max - self.v_min) / (self.n_v - 1)

    @property
    def theta(self) -> FloatArray:
        return np.linspace(self.theta_min, self.theta_max, self.n_theta)

    @property
    def v(self) -> FloatArray:
        return np.linspace(self.v_min, self.v_max, self.n_v)

    @property
    def n_slices(self) -> int:
        return len(self.slices)


def build_grid(
    theta_range: tuple[float, float],
    v_range: tuple[float, float],
    n_theta: int,
    n_v: int,
    slices: list[tuple[float, float]] | tuple[tuple[float, float], ...] = (
        (math.pi / 2.0, 0.0),
    ),
    *,
    angular: bool = True,
) -> CharacteristicGrid:
    """Construct a uniform characteristic grid.

    With angular=True (the default, appropriate for all spherical
    backgrounds) every slice ordinate y must stay at least POLE_GUARD away
    from the poles of sin y.  Pass angular=False when (y, z) are abstract
    transverse parameters.
    """
    slices_t = tuple((float(y), float(z)) for y, z in slices)
    if angular:
        for y, _ in slices_t:
            if _pole_distance(y) < POLE_GUARD:
                raise ValueError(
                    f"slice ordinate y={y} is within {POLE_GUARD} of a pole of sin y"
                )
    return CharacteristicGrid(
        theta_min=float(theta_range[0]),
        theta_max=float(theta_range[1]),
        v_min=float(v_range[0]),
        v_max=float(v_range[1]),
        n_theta=int(n_theta),
        n_v=int(n_v),
        slices=slices_t,
    )


def refine_grid(grid: CharacteristicGrid, factor: int) -> CharacteristicGrid:
    """Nested refinement: every coarse node is a fine node.

    Node counts map n -> (n - 1) * factor + 1; extents and slices are kept.
    """
    if factor < 1:
        raise ValueError(f"refinement factor must be >= 1, got {factor}")
    return CharacteristicGrid(
        theta_min=grid.theta_min,
        theta_max=grid.theta_max,
        v_min=grid.v_min,
        v_max=grid.v_max,
        n_theta=(grid.n_theta - 1) * factor + 1,
        n_v=(grid.n_v - 1) * factor + 1,
        slices=grid.slices,
    )


def coarse_index_map(coarse: CharacteristicGrid, fine: CharacteristicGrid) -> tuple[int, int]:
    """Return the (theta, v) index strides embedding coarse nodes into fine ones.

    Raises if the fine grid is not a nested refinement of the coarse one.
    """
    for name in ("theta_min", "theta_max", "v_min", "v_max"):
        if getattr(coarse, name) != getattr(fine, name):
            raise ValueError(f"grids differ in {name}; not nested")
    st, rt = divmod(fine.n_theta - 1, coarse.n_theta - 1)
    sv, rv = divmod(fine.n_v - 1, coarse.n_v - 1)
    if rt or rv:
        raise ValueError("fine grid node counts are not a nested refinement")
    return st, sv


def _as_field(arr: object, shape: tuple[int, ...], label: str) -> FloatArray:
    out = np.ascontiguousarray(np.asarray(arr, dtype=np.float64))
    if out.shape != shape:
        raise ValueError(f"{label} has shape {out.shape}, expected {shape}")
    return out


@dataclass(slots=True)
class FieldState:
    """Metric functions M, U, V, W on a characteristic grid.

    Arrays are shaped (n_slices, n_theta, n_v).  `filled` marks which nodes
    carry solution values; partial states produced by a halted sweep keep
    zeros (finite placeholders) in the unfilled region.
    """

    grid: CharacteristicGrid
    polarization: str
    M: FloatArray
    U: FloatArray
    V: FloatArray
    W: FloatArray
    filled: NDArray[np.bool_] | None = None

    def __post_init__(self) -> None:
        shape = (self.grid.n_slices, self.grid.n_theta, self.grid.n_v)
        self.M = _as_field(self.M, shape, "M")
        self.U = _as_field(self.U, shape, "U")
        self.V = _as_field(self.V, shape, "V")
        self.W = _as_field(self.W, shape, "W")
        if self.polarization not in (POLARIZED, GENERAL):
            raise ValueError(f"unknown polarization {self.polarization!r}")
        if self.filled is None:
            self.filled = np.ones(shape, dtype=bool)
        elif self.filled.shape != shape:
            raise ValueError(f"filled mask has shape {self.filled.shape}, expected {shape}")
        for name in FIELD_NAMES:
            a = getattr(self, name)
            if not np.all(np.isfinite(a)):
                raise ValueError(f"non-finite entries in {name}")
        if self.polarization == POLARIZED and np.any(self.W != 0.0):
            raise ValueError("polarized state must have W identically zero")

    def fields(self) -> dict[str, FloatArray]:
        return {name: getattr(self, name) for name in FIELD_NAMES}

    @property
    def complete(self) -> bool:
        return bool(np.all(self.filled))


def _as_line(arr: object, n: int, label: str) -> FloatArray:
    out = np.ascontiguousarray(np.asarray(arr, dtype=np.float64))
    if out.shape != (n,):
        raise ValueError(f"{label} has shape {out.shape}, expected ({n},)")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"non-finite entries in {label}")
    return out


def _per_slice(arr: object, ns: int) -> list[np.ndarray]:
    """Normalize a line spec to one 1-D array per slice.  A single 1-D
    array is shared across all slices."""
    a = np.asarray(arr, dtype=np.float64)
    if a.ndim == 1:
        return [a] * ns
    return [a[s] for s in range(ns)]


@dataclass(slots=True)
class BoundaryData:
    """Goursat data: field values on the initial line v = v_min and the
    boundary line theta = theta_min, per transverse slice.

    initial_line and boundary_line map field name -> array of shape
    (n_slices, n_theta) resp. (n_slices, n_v).  The two lines must agree at
    the shared corner to CORNER_TOL.  When constraint_tol is given, the
    initial line is checked against the longitudinal constraint
    U'' = (U'^2 + V'^2 cosh^2 W + W'^2)/2 - U' M' with second-order
    differences; exact data on a grid of spacing h carries an O(h^2)
    discretization residual, so the tolerance declared here should reflect
    the grid, not machine precision.
    """

    grid: CharacteristicGrid
    initial_line: dict[str, FloatArray]
    boundary_line: dict[str, FloatArray]
    constraint_tol: float | None = None

    def __post_init__(self) -> None:
        ns, nt, nv = self.grid.n_slices, self.grid.n_theta, self.grid.n_v
        init = {}
        bound = {}
        for name in FIELD_NAMES:
            if name not in self.initial_line:
                raise ValueError(f"initial_line missing field {name}")
            if name not in self.boundary_line:
                raise ValueError(f"boundary_line missing field {name}")
            raw_i = _per_slice(self.initial_line[name], ns)
            raw_b = _per_slice(self.boundary_line[name], ns)
            init[name] = np.stack(
                [_as_line(raw_i[s], nt, f"initial {name}[{s}]") for s in range(ns)]
            )
            bound[name] = np.stack(
                [_as_line(raw_b[s], nv, f"boundary {name}[{s}]") for s in range(ns)]
            )
        self.initial_line = init
        self.boundary_line = bound
        for name in FIELD_NAMES:
            gap = np.abs(init[name][:, 0] - bound[name][:, 0])
            worst = float(gap.max())
            if worst > CORNER_TOL:
                raise ValueError(
                    f"corner mismatch in {name}: |initial - boundary| = {worst:.3e} at v_min"
                )
        if self.constraint_tol is not None:
            worst = float(np.max(np.abs(self.initial_line_constraint_residual())))
            if worst > self.constraint_tol:
                raise ValueError(
                    f"initial line violates the longitudinal constraint: "
                    f"max residual {worst:.3e} > {self.constraint_tol:.3e}"
                )

    def initial_line_constraint_residual(self) -> FloatArray:
        """Second-order residual of the longitudinal constraint on the
        initial line, at interior theta nodes; shape (n_slices, n_theta - 2)."""
        from cpwave.fd import diff1_line, diff2_line

        h = self.grid.dtheta
        out = np.empty((self.grid.n_slices, self.grid.n_theta - 2))
        for s in range(self.grid.n_slices):
            M0 = self.initial_line["M"][s]
            U0 = self.initial_line["U"][s]
            V0 = self.initial_line["V"][s]
            W0 = self.initial_line["W"][s]
            Ut = diff1_line(U0, h)
            Utt = diff2_line(U0, h)
            Vt = diff1_line(V0, h)
            Wt = diff1_line(W0, h)
            Mt = diff1_line(M0, h)
            res = Utt - 0.5 * (Ut**2 + Vt**2 * np.cosh(W0) ** 2 + Wt**2) + Ut * Mt
            out[s] = res[1:-1]
        return out
