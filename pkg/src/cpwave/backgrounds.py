"""Boundary data on the line theta = theta_min for waves entering curved
backgrounds.

Each generator evaluates the metric functions (M, U, V, W) of a known
space-time in the characteristic gauge, per transverse slice (y, z):

* Minkowski in spherical form: exp(-U) = v^2 sin(y)/2, V = -log sin y,
  M = 0; outgoing for v > 0, incoming for v < 0.  Satisfies G = 0.
* Schwarzschild, incoming spherical: the radius r(v) solves
  A(r) = -v/sqrt(2) with the tortoise-type primitive
  A(r) = r + 2m log(r - 2m), so that A'(r) = 1/a(r), a = 1 - 2m/r.  Then
  exp(-M) = a(r), exp(-U) = r^2 sin y, V = -log sin y.  The chain rule
  gives r_v = -a/sqrt(2) and r_vv = -a_v/sqrt(2), which force G = 0.
* Robertson-Walker with power-law scale factor R(t) = t^p, outgoing
  spherical: the conformal primitive I(t) = t^(p+1)/(p+1) satisfies
  I(t_minus) = v/sqrt(2); the comoving radius is sin, identity, or sinh of
  v/sqrt(2) for spatial curvature k = 1, 0, -1.  Then exp(-M) = 1/R^2,
  exp(-U) = r^2 sin(y)/R^2, V = -log sin y.  Here G does not vanish:
  G = -p t_minus^(-2p-2) + k, the imprint of the background matter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from cpwave.grid import POLE_GUARD, CharacteristicGrid, FloatArray, _pole_distance

SQRT2 = math.sqrt(2.0)

# Newton solve of A(r) = target: residual tolerance and bracket seeding.
# The tolerance sits near round-off so that numerically differentiating the
# inverse map still resolves the chain-rule identities to 1e-10.
TORTOISE_TOL = 1.0e-13
_BRACKET_SEED = 1.0e-6

SCALE_FACTOR_PRESETS = {"radiation": 0.5, "matter": 2.0 / 3.0, "static": 0.0}


def _check_slice_angle(y: float) -> float:
    s = math.sin(y)
    if _pole_distance(y) < POLE_GUARD or s <= 0.0:
        raise ValueError(f"slice ordinate y={y} too close to a pole of sin y (or sin y <= 0)")
    return s


@dataclass(frozen=True, slots=True)
class BoundaryPoint:
    """Metric functions of a background at one (v, slice) sample."""

    M: float
    U: float
    V: float
    W: float
    aux: dict[str, float] = field(default_factory=dict)


def minkowski_spherical_data(v: float, y: float, direction: str = "outgoing") -> BoundaryPoint:
    """Flat space in spherical characteristic form."""
    if direction == "outgoing":
        if v <= 0.0:
            raise ValueError(f"outgoing spherical data needs v > 0, got {v}")
    elif direction == "incoming":
        if v >= 0.0:
            raise ValueError(f"incoming spherical data needs v < 0, got {v}")
    else:
        raise ValueError(f"unknown direction {direction!r}")
    s = _check_slice_angle(y)
    exp_neg_u = 0.5 * v * v * s
    return BoundaryPoint(
        M=0.0,
        U=-math.log(exp_neg_u),
        V=-math.log(s),
        W=0.0,
        aux={"r": abs(v) / SQRT2},
    )


def schwarzschild_tortoise(r: float, m: float) -> float:
    """Radial primitive A(r) = r + 2m log(r - 2m), defined for r > 2m.

    A'(r) = 1/a(r) with the lapse factor a(r) = 1 - 2m/r.
    """
    if m <= 0.0:
        raise ValueError(f"mass must be positive, got {m}")
    if r <= 2.0 * m:
        raise ValueError(f"r = {r} is not outside the horizon r > {2.0 * m}")
    return r + 2.0 * m * math.log(r - 2.0 * m)


def invert_tortoise(v: float, m: float) -> float:
    """Radius r > 2m of the incoming front at parameter v: A(r) = -v/sqrt(2).

    Safeguarded Newton iteration inside a bracket grown geometrically from
    r = 2m(1 + 1e-6); bisection steps are taken whenever Newton leaves the
    bracket.  Terminates when |A(r) + v/sqrt(2)| <= TORTOISE_TOL.
    """
    if m <= 0.0:
        raise ValueError(f"mass must be positive, got {m}")
    if not math.isfinite(v):
        raise ValueError(f"non-finite front parameter {v}")
    value = -v / SQRT2
    two_m = 2.0 * m

    lo = two_m * (1.0 + _BRACKET_SEED)
    for _ in range(500):
        if schwarzschild_tortoise(lo, m) <= value:
            break
        gap = (lo - two_m) / 10.0
        if gap <= 0.0 or two_m + gap == two_m:
            raise ValueError(f"tortoise value {value} not bracketable above the horizon")
        lo = two_m + gap
    else:
        raise ValueError(f"tortoise value {value} not bracketable above the horizon")

    hi = two_m * (1.0 + _BRACKET_SEED)
    for _ in range(5000):
        if schwarzschild_tortoise(hi, m) >= value:
            break
        hi = two_m + (hi - two_m) * 2.0
        if not math.isfinite(hi):
            raise ValueError(f"tortoise value {value} not bracketable (overflow)")
    else:
        raise ValueError(f"tortoise value {value} not bracketable (overflow)")

    r = 0.5 * (lo + hi)
    for _ in range(200):
        resid = schwarzschild_tortoise(r, m) - value
        if abs(resid) <= TORTOISE_TOL:
            return r
        if resid > 0.0:
            hi = r
        else:
            lo = r
        a = 1.0 - two_m / r
        step = resid * a  # Newton: A'(r) = 1/a
        r_new = r - step
        if not (lo < r_new < hi):
            r_new = 0.5 * (lo + hi)
        r = r_new
    raise RuntimeError(f"tortoise inversion stalled at r = {r} for value {value}")


def schwarzschild_spherical_data(v: float, y: float, m: float) -> BoundaryPoint:
    """Incoming spherical wave front in a Schwarzschild exterior."""
    s = _check_slice_angle(y)
    r = invert_tortoise(v, m)
    a = 1.0 - 2.0 * m / r
    return BoundaryPoint(
        M=-math.log(a),
        U=-math.log(r * r * s),
        V=-math.log(s),
        W=0.0,
        aux={"r": r, "a": a},
    )


def _rw_time(v: float, p: float) -> float:
    if v <= 0.0:
        raise ValueError(f"outgoing Robertson-Walker data needs v > 0, got {v}")
    return ((p + 1.0) * v / SQRT2) ** (1.0 / (p + 1.0))


def _rw_radius(v: float, k: int) -> float:
    x = v / SQRT2
    if k == 1:
        if not 0.0 < x < math.pi:
            raise ValueError(f"k=1 data needs v/sqrt(2) in (0, pi), got {x}")
        return math.sin(x)
    if k == 0:
        return x
    if k == -1:
        return math.sinh(x)
    raise ValueError(f"spatial curvature k must be -1, 0 or 1, got {k}")


def rw_spherical_data(v: float, y: float, k: int, p: float) -> BoundaryPoint:
    """Outgoing spherical wave front in a power-law Robertson-Walker cosmos.

    p is the scale-factor exponent R(t) = t^p (p = 0 is the static limit,
    which for k = 0 reduces to outgoing Minkowski data); k the spatial
    curvature sign.
    """
    if p < 0.0:
        raise ValueError(f"scale-factor exponent must be >= 0, got {p}")
    s = _check_slice_angle(y)
    t = _rw_time(v, p)
    r = _rw_radius(v, k)
    big_r = t**p
    if r <= 0.0:
        raise ValueError(f"comoving radius vanished at v = {v}")
    return BoundaryPoint(
        M=2.0 * p * math.log(t),
        U=-math.log(r * r * s / (big_r * big_r)),
        V=-math.log(s),
        W=0.0,
        aux={"t": t, "r": r, "R": big_r},
    )


def rw_constraint_G(v: float, k: int, p: float) -> float:
    """Closed-form transverse-constraint value G = -p t^(-2p-2) + k."""
    if p < 0.0:
        raise ValueError(f"scale-factor exponent must be >= 0, got {p}")
    if k not in (-1, 0, 1):
        raise ValueError(f"spatial curvature k must be -1, 0 or 1, got {k}")
    if p == 0.0:
        return float(k)
    t = _rw_time(v, p)
    return -p * t ** (-2.0 * p - 2.0) + k


@dataclass(frozen=True, slots=True)
class BackgroundSpec:
    """Declarative description of a boundary-data generator.

    kind selects the space-time; the remaining parameters are read only
    where meaningful (direction for Minkowski, mass for Schwarzschild,
    exponent/curvature for Robertson-Walker).
    """

    kind: str
    direction: str = "outgoing"
    mass: float = 1.0
    exponent: float = 0.5
    curvature: int = 0

    _KINDS = ("minkowski", "schwarzschild", "robertson_walker")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown background kind {self.kind!r}; expected one of {self._KINDS}")
        if self.kind == "minkowski" and self.direction not in ("outgoing", "incoming"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.kind == "schwarzschild" and self.mass <= 0.0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.kind == "robertson_walker":
            if self.exponent < 0.0:
                raise ValueError(f"scale-factor exponent must be >= 0, got {self.exponent}")
            if self.curvature not in (-1, 0, 1):
                raise ValueError(f"spatial curvature must be -1, 0 or 1, got {self.curvature}")

    def point(self, v: float, y: float) -> BoundaryPoint:
        if self.kind == "minkowski":
            return minkowski_spherical_data(v, y, self.direction)
        if self.kind == "schwarzschild":
            return schwarzschild_spherical_data(v, y, self.mass)
        return rw_spherical_data(v, y, self.curvature, self.exponent)

    def analytic_G(self, v: float) -> float:
        """Exact transverse-constraint value of the background data."""
        if self.kind == "robertson_walker":
            return rw_constraint_G(v, self.curvature, self.exponent)
        return 0.0


def sample_boundary_line(
    spec: BackgroundSpec, grid: CharacteristicGrid, slice_index: int
) -> tuple[dict[str, FloatArray], dict[str, FloatArray]]:
    """Evaluate a background along the grid's v-nodes for one slice.

    Returns (lines, aux): lines maps field name -> (n_v,) array, aux maps
    each auxiliary quantity the background exposes (r, t, ...) to its
    sampled values.
    """
    y, _ = grid.slices[slice_index]
    points = [spec.point(float(v), y) for v in grid.v]
    lines = {
        name: np.array([getattr(pt, name) for pt in points])
        for name in ("M", "U", "V", "W")
    }
    aux_keys = sorted(points[0].aux)
    aux = {key: np.array([pt.aux[key] for pt in points]) for key in aux_keys}
    return lines, aux
