"""Deterministic run artifacts: CSV tables and the JSON run manifest.

Every float is written with 17 significant digits (round-trippable); no
timestamps, hostnames, or absolute paths enter any artifact, so identical
runs produce byte-identical files.  Tables carry a single '# grid: ...'
comment line declaring the grid and slice they belong to, then a CSV
header.  Singular runs emit only the filled rows of each slice.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from cpwave import __version__
from cpwave._kernel import KERNEL_BACKEND
from cpwave.config import ScenarioConfig, parse_config
from cpwave.grid import CharacteristicGrid, FieldState
from cpwave.solver import SolveResult

MANIFEST_NAME = "run_manifest.json"

_FIELDS = ("M", "U", "V", "W")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _grid_comment(grid: CharacteristicGrid, slice_index: int) -> str:
    y, z = grid.slices[slice_index]
    return (
        f"# grid: theta=[{fmt(grid.theta_min)},{fmt(grid.theta_max)}] n_theta={grid.n_theta} "
        f"v=[{fmt(grid.v_min)},{fmt(grid.v_max)}] n_v={grid.n_v} "
        f"slice={slice_index} y={fmt(y)} z={fmt(z)}"
    )


def write_table(
    path: Path,
    grid: CharacteristicGrid,
    slice_index: int,
    columns: list[str],
    rows: "np.ndarray | list[list]",
) -> None:
    """Write one CSV table; cells may be floats or pre-formatted strings."""
    lines = [_grid_comment(grid, slice_index), ",".join(columns)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else fmt(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n")


def solution_filename(slice_index: int) -> str:
    return f"solution_slice{slice_index:03d}.csv"


def write_solution(out_dir: Path, result: SolveResult) -> list[str]:
    """Emit one solution table per slice (filled nodes only)."""
    state = result.state
    grid = state.grid
    written = []
    theta, v = grid.theta, grid.v
    for s in range(grid.n_slices):
        rows = []
        mask = state.filled[s]
        for i in range(grid.n_theta):
            for j in range(grid.n_v):
                if mask[i, j]:
                    rows.append(
                        [theta[i], v[j], state.M[s, i, j], state.U[s, i, j],
                         state.V[s, i, j], state.W[s, i, j]]
                    )
        name = solution_filename(s)
        write_table(out_dir / name, grid, s, ["theta", "v", "M", "U", "V", "W"], rows)
        written.append(name)
    return written


def write_manifest(
    out_dir: Path,
    command: str,
    config: ScenarioConfig,
    extra: dict,
) -> None:
    doc = {
        "command": command,
        "config": config.to_mapping(),
        "package": {"name": "cpwave", "version": __version__, "kernel": KERNEL_BACKEND},
    }
    doc.update(extra)
    (out_dir / MANIFEST_NAME).write_text(
        json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"
    )


def read_manifest(out_dir: Path) -> dict:
    return json.loads((out_dir / MANIFEST_NAME).read_text())


def read_solution(out_dir: Path) -> tuple[ScenarioConfig, FieldState, dict]:
    """Reload a solve run: (config, state, manifest).

    Requires a completed run; verification of partial (singular) output is
    not supported.
    """
    manifest = read_manifest(out_dir)
    config = parse_config(manifest)
    if manifest.get("status") != "completed":
        raise ValueError(
            f"stored run has status {manifest.get('status')!r}; reports need a completed solve"
        )
    grid = config.grid
    fields = {name: np.empty((grid.n_slices, grid.n_theta, grid.n_v)) for name in _FIELDS}
    for s in range(grid.n_slices):
        # skip_header jumps over the '# grid: ...' line; genfromtxt would
        # otherwise read the column names from it, comment marker and all.
        rows = np.genfromtxt(out_dir / solution_filename(s), delimiter=",",
                             names=True, skip_header=1)
        if rows.size != grid.n_theta * grid.n_v:
            raise ValueError(
                f"solution table {solution_filename(s)} has {rows.size} rows, "
                f"expected {grid.n_theta * grid.n_v}"
            )
        for name in _FIELDS:
            fields[name][s] = np.asarray(rows[name]).reshape(grid.n_theta, grid.n_v)
    state = FieldState(
        grid=grid,
        polarization=config.system,
        M=fields["M"],
        U=fields["U"],
        V=fields["V"],
        W=fields["W"],
    )
    return config, state, manifest
