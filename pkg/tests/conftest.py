"""Shared fixtures: closed-form polarized families and cached solves.

Both families take U = -log(f + g) with V = W = 0 and M = (1/2) log(f + g),
which satisfies the evolution system for any smooth f, g.  The "evolution"
family (f = 1 + t^2) exercises convergence; the "constraint" family uses a
linear f, so the longitudinal constraint holds identically and the
v-constraint function G = -g''/(f + g) stays bounded away from zero.
"""
from __future__ import annotations

import numpy as np
import pytest

from cpwave import POLARIZED, BoundaryData, CharacteristicGrid, build_grid, solve_goursat

FAMILIES = {
    "evolution": (lambda t: 1.0 + t * t, lambda s: s),
    "constraint": (lambda t: 1.0 + t, lambda s: s - 0.25 * s * s),
}


def unit_grid(n: int) -> CharacteristicGrid:
    return build_grid((0.0, 1.0), (0.0, 1.0), n, n, angular=False)


def family_data(grid: CharacteristicGrid, f, g) -> BoundaryData:
    th, v = grid.theta, grid.v
    F0 = f(th) + g(v[0])
    Fb = f(th[0]) + g(v)
    return BoundaryData(
        grid,
        initial_line={
            "M": 0.5 * np.log(F0),
            "U": -np.log(F0),
            "V": np.zeros_like(th),
            "W": np.zeros_like(th),
        },
        boundary_line={
            "M": 0.5 * np.log(Fb),
            "U": -np.log(Fb),
            "V": np.zeros_like(v),
            "W": np.zeros_like(v),
        },
    )


def family_fields(grid: CharacteristicGrid, f, g) -> dict[str, np.ndarray]:
    F = f(grid.theta)[:, None] + g(grid.v)[None, :]
    return {"M": 0.5 * np.log(F), "U": -np.log(F)}


@pytest.fixture(scope="session")
def solve_family():
    """solve_family(name, n) -> (grid, data, SolveResult), cached per key."""
    cache: dict[tuple[str, int], tuple] = {}

    def get(name: str, n: int):
        key = (name, n)
        if key not in cache:
            f, g = FAMILIES[name]
            grid = unit_grid(n)
            data = family_data(grid, f, g)
            cache[key] = (grid, data, solve_goursat(POLARIZED, data))
        return cache[key]

    return get
