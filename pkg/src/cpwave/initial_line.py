"""Initial-line construction: wave-profile pulses plus the longitudinal
constraint ODE for U.

Data on the initial line v = v_min is free in V, W, M; U is then forced by
the longitudinal constraint

    U'' = (U'^2 + V'^2 cosh^2 W + W'^2)/2 - U' M'

integrated from the corner with U(theta_min) anchored to the boundary line
and U'(theta_min) = 0 unless overridden (the wave enters an undisturbed
background, so the sandwich convention starts U flat).  Strong pulses focus
the line: exp(-U/2) is driven to zero, U blows up, and the build reports
the focusing location instead of returning data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from cpwave.grid import CharacteristicGrid, FloatArray
from cpwave.solver import SING_THRESHOLD

PULSE_SHAPES = ("none", "gaussian", "bump")


class FocusingError(RuntimeError):
    """U blew up on the initial line: the pulse focuses inside the strip."""

    def __init__(self, message: str, theta: float):
        super().__init__(message)
        self.theta = theta


@dataclass(frozen=True, slots=True)
class PulseProfile:
    """Smooth single-pulse profile for one metric function.

    gaussian: amplitude * exp(-s^2), s = (theta - center)/width.
    bump: amplitude * exp(1 - 1/(1 - s^2)) for |s| < 1, zero outside, a
    compactly supported C-infinity hat whose support must sit strictly
    inside the strip.
    """

    shape: str = "none"
    amplitude: float = 0.0
    center: float = 0.0
    width: float = 1.0

    def __post_init__(self) -> None:
        if self.shape not in PULSE_SHAPES:
            raise ValueError(f"unknown pulse shape {self.shape!r}; expected one of {PULSE_SHAPES}")
        if self.shape != "none" and self.width <= 0.0:
            raise ValueError(f"pulse width must be positive, got {self.width}")

    def value(self, theta: float) -> float:
        if self.shape == "none" or self.amplitude == 0.0:
            return 0.0
        s = (theta - self.center) / self.width
        if self.shape == "gaussian":
            return self.amplitude * math.exp(-s * s)
        if abs(s) >= 1.0:
            return 0.0
        return self.amplitude * math.exp(1.0 - 1.0 / (1.0 - s * s))

    def derivative(self, theta: float) -> float:
        if self.shape == "none" or self.amplitude == 0.0:
            return 0.0
        s = (theta - self.center) / self.width
        if self.shape == "gaussian":
            return self.amplitude * math.exp(-s * s) * (-2.0 * s) / self.width
        if abs(s) >= 1.0:
            return 0.0
        inner = 1.0 - s * s
        return self.value(theta) * (-2.0 * s / (inner * inner)) / self.width

    def check_support(self, theta_min: float, theta_max: float) -> None:
        if self.shape == "bump" and self.amplitude != 0.0:
            if not (theta_min < self.center - self.width and self.center + self.width < theta_max):
                raise ValueError(
                    f"bump support [{self.center - self.width}, {self.center + self.width}] "
                    f"must sit strictly inside ({theta_min}, {theta_max})"
                )


@dataclass(frozen=True, slots=True)
class InitialLine:
    """Sampled initial-line data (one transverse slice)."""

    theta: FloatArray
    M: FloatArray
    U: FloatArray
    V: FloatArray
    W: FloatArray
    u_prime: FloatArray


def build_initial_line(
    grid: CharacteristicGrid,
    pulses: dict[str, PulseProfile],
    corner: dict[str, float],
    *,
    u0_prime: float = 0.0,
    steps_per_interval: int = 2,
) -> InitialLine:
    """Sample pulses for V, W, M and integrate the constraint ODE for U.

    pulses maps 'V'/'W'/'M' to profiles (missing entries mean no pulse);
    each profile is anchored by subtracting its value at theta_min, so the
    line matches `corner` exactly there.  corner supplies the boundary-line
    values at v_min for all four fields; U starts from corner['U'] with
    slope u0_prime.  The ODE is integrated with classical RK4 using
    steps_per_interval steps per grid interval (the default 2 keeps the
    integration error below the corner scheme's truncation at matching
    resolution).  Raises FocusingError when exp(-U) falls below the
    singularity threshold or U stops being finite.
    """
    if steps_per_interval < 1:
        raise ValueError("steps_per_interval must be >= 1")
    theta = grid.theta
    t_min, t_max = grid.theta_min, grid.theta_max

    profiles: dict[str, PulseProfile] = {}
    for name in ("V", "W", "M"):
        prof = pulses.get(name, PulseProfile())
        prof.check_support(t_min, t_max)
        profiles[name] = prof

    def line_value(name: str, th: float) -> float:
        prof = profiles[name]
        return corner[name] + prof.value(th) - prof.value(t_min)

    def vp(th: float) -> float:
        return profiles["V"].derivative(th)

    def wp(th: float) -> float:
        return profiles["W"].derivative(th)

    def mp(th: float) -> float:
        return profiles["M"].derivative(th)

    def w_at(th: float) -> float:
        return line_value("W", th)

    def rhs(th: float, u: float, up: float) -> tuple[float, float]:
        q = vp(th) ** 2 * math.cosh(w_at(th)) ** 2 + wp(th) ** 2
        return up, 0.5 * (up * up + q) - up * mp(th)

    u_cap = -math.log(SING_THRESHOLD)
    n = grid.n_theta
    u_nodes = np.empty(n)
    up_nodes = np.empty(n)
    u = float(corner["U"])
    up = float(u0_prime)
    u_nodes[0] = u
    up_nodes[0] = up
    h = grid.dtheta / steps_per_interval
    for i in range(n - 1):
        th = theta[i]
        for k in range(steps_per_interval):
            t0 = th + k * h
            k1u, k1p = rhs(t0, u, up)
            k2u, k2p = rhs(t0 + 0.5 * h, u + 0.5 * h * k1u, up + 0.5 * h * k1p)
            k3u, k3p = rhs(t0 + 0.5 * h, u + 0.5 * h * k2u, up + 0.5 * h * k2p)
            k4u, k4p = rhs(t0 + h, u + h * k3u, up + h * k3p)
            u = u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
            up = up + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
            if not (math.isfinite(u) and math.isfinite(up)) or u > u_cap:
                bad = t0 + h
                raise FocusingError(
                    f"initial line focuses near theta = {bad:.6g} "
                    f"(exp(-U) fell below {SING_THRESHOLD})",
                    bad,
                )
        u_nodes[i + 1] = u
        up_nodes[i + 1] = up

    return InitialLine(
        theta=theta,
        M=np.array([line_value("M", t) for t in theta]),
        U=u_nodes,
        V=np.array([line_value("V", t) for t in theta]),
        W=np.array([line_value("W", t) for t in theta]),
        u_prime=up_nodes,
    )
