"""Scenario configuration: a single YAML document describing a run.

Schema (keys and defaults):

    system: polarized | general                  (required)
    grid:
      theta: [min, max]                          (required)
      v: [min, max]                              (required)
      n_theta: int >= 2                          (required)
      n_v: int >= 2                              (required)
      slices: [[y, z], ...]                      (default [[pi/2, 0.0]])
    boundary:                                    (exactly one source)
      background: minkowski | schwarzschild | robertson_walker
      direction: outgoing | incoming             (minkowski; default outgoing)
      mass: float > 0                            (schwarzschild; default 1.0)
      scale_factor: radiation | matter | static  (robertson_walker presets)
      exponent: float >= 0                       (robertson_walker, overrides preset)
      curvature: -1 | 0 | 1                      (robertson_walker; default 0)
      table: path.csv                            (tabulated line: columns v,M,U,V,W)
    pulse:
      V: {shape: gaussian|bump|none, amplitude, center, width}
      W: {...}                                   (must stay zero for polarized)
      M: {...}
    initial:
      u0_prime: float                            (default 0.0)
    solver:
      fp_tol: float                              (default 1e-12)
      max_iterations: int                        (default 50)
      singularity_threshold: float               (default 1e-8)
      w_cap: float                               (default 300.0)
    convergence:
      levels: int >= 2                           (default 3)
    output:
      reports: [constraints, jump, ricci, variational]   (default all four)

A run manifest produced by the CLI embeds the resolved config under the
key "config"; loading such a manifest as a config re-runs the original
scenario (YAML is a superset of JSON).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from cpwave.backgrounds import SCALE_FACTOR_PRESETS, BackgroundSpec, sample_boundary_line
from cpwave.grid import (
    GENERAL,
    POLARIZED,
    BoundaryData,
    CharacteristicGrid,
    build_grid,
)
from cpwave.initial_line import PulseProfile, build_initial_line

REPORT_KINDS = ("constraints", "jump", "ricci", "variational")


class ConfigError(ValueError):
    """Invalid scenario configuration; `path` names the offending key."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _require(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise ConfigError(f"{path}.{key}", "missing required key")
    return mapping[key]


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    out = float(value)
    if not math.isfinite(out):
        raise ConfigError(path, f"expected a finite number, got {value!r}")
    return out


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    return value


def _pair(value, path: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(path, f"expected a [min, max] pair, got {value!r}")
    return _number(value[0], f"{path}[0]"), _number(value[1], f"{path}[1]")


@dataclass(slots=True)
class ScenarioConfig:
    """Validated, resolved description of one run."""

    system: str
    grid: CharacteristicGrid
    background: BackgroundSpec | None
    table: str | None
    pulses: dict[str, PulseProfile]
    u0_prime: float
    fp_tol: float
    max_iterations: int
    singularity_threshold: float
    w_cap: float
    convergence_levels: int
    reports: tuple[str, ...]

    def to_mapping(self) -> dict:
        """Canonical plain mapping (manifest echo; reload gives the same config)."""
        boundary: dict = {}
        if self.table is not None:
            boundary["table"] = self.table
        else:
            bg = self.background
            boundary["background"] = bg.kind
            if bg.kind == "minkowski":
                boundary["direction"] = bg.direction
            elif bg.kind == "schwarzschild":
                boundary["mass"] = bg.mass
            else:
                boundary["exponent"] = bg.exponent
                boundary["curvature"] = bg.curvature
        return {
            "system": self.system,
            "grid": {
                "theta": [self.grid.theta_min, self.grid.theta_max],
                "v": [self.grid.v_min, self.grid.v_max],
                "n_theta": self.grid.n_theta,
                "n_v": self.grid.n_v,
                "slices": [list(s) for s in self.grid.slices],
            },
            "boundary": boundary,
            "pulse": {
                name: {
                    "shape": p.shape,
                    "amplitude": p.amplitude,
                    "center": p.center,
                    "width": p.width,
                }
                for name, p in sorted(self.pulses.items())
                if p.shape != "none"
            },
            "initial": {"u0_prime": self.u0_prime},
            "solver": {
                "fp_tol": self.fp_tol,
                "max_iterations": self.max_iterations,
                "singularity_threshold": self.singularity_threshold,
                "w_cap": self.w_cap,
            },
            "convergence": {"levels": self.convergence_levels},
            "output": {"reports": list(self.reports)},
        }


def parse_config(doc: dict) -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "config document must be a mapping")
    if "config" in doc and "package" in doc:
        doc = doc["config"]  # run manifest: re-run its embedded scenario
        if not isinstance(doc, dict):
            raise ConfigError("config", "manifest config entry must be a mapping")

    system = _require(doc, "system", "<root>")
    if system not in (POLARIZED, GENERAL):
        raise ConfigError("system", f"expected 'polarized' or 'general', got {system!r}")

    gsec = _require(doc, "grid", "<root>")
    if not isinstance(gsec, dict):
        raise ConfigError("grid", "expected a mapping")
    theta = _pair(_require(gsec, "theta", "grid"), "grid.theta")
    vrange = _pair(_require(gsec, "v", "grid"), "grid.v")
    n_theta = _integer(_require(gsec, "n_theta", "grid"), "grid.n_theta")
    n_v = _integer(_require(gsec, "n_v", "grid"), "grid.n_v")
    slices_doc = gsec.get("slices", [[math.pi / 2.0, 0.0]])
    if not isinstance(slices_doc, list) or not slices_doc:
        raise ConfigError("grid.slices", "expected a non-empty list of [y, z] pairs")
    slices = [_pair(s, f"grid.slices[{i}]") for i, s in enumerate(slices_doc)]
    try:
        grid = build_grid(theta, vrange, n_theta, n_v, slices)
    except ValueError as err:
        raise ConfigError("grid", str(err)) from err

    bsec = _require(doc, "boundary", "<root>")
    if not isinstance(bsec, dict):
        raise ConfigError("boundary", "expected a mapping")
    has_bg = "background" in bsec
    has_table = "table" in bsec
    if has_bg == has_table:
        raise ConfigError("boundary", "exactly one of 'background' or 'table' is required")
    background = None
    table = None
    if has_table:
        table = str(bsec["table"])
    else:
        kind = bsec["background"]
        exponent = 0.5
        if "scale_factor" in bsec:
            preset = bsec["scale_factor"]
            if preset not in SCALE_FACTOR_PRESETS:
                raise ConfigError(
                    "boundary.scale_factor",
                    f"unknown preset {preset!r}; expected one of {sorted(SCALE_FACTOR_PRESETS)}",
                )
            exponent = SCALE_FACTOR_PRESETS[preset]
        if "exponent" in bsec:
            exponent = _number(bsec["exponent"], "boundary.exponent")
        try:
            background = BackgroundSpec(
                kind=kind,
                direction=bsec.get("direction", "outgoing"),
                mass=_number(bsec.get("mass", 1.0), "boundary.mass"),
                exponent=exponent,
                curvature=_integer(bsec.get("curvature", 0), "boundary.curvature"),
            )
        except ValueError as err:
            raise ConfigError("boundary", str(err)) from err

    psec = doc.get("pulse", {})
    if not isinstance(psec, dict):
        raise ConfigError("pulse", "expected a mapping")
    pulses: dict[str, PulseProfile] = {}
    for name, spec in psec.items():
        if name not in ("V", "W", "M"):
            raise ConfigError(f"pulse.{name}", "pulses exist only for V, W, M")
        if not isinstance(spec, dict):
            raise ConfigError(f"pulse.{name}", "expected a mapping")
        try:
            pulses[name] = PulseProfile(
                shape=spec.get("shape", "gaussian"),
                amplitude=_number(spec.get("amplitude", 0.0), f"pulse.{name}.amplitude"),
                center=_number(spec.get("center", 0.0), f"pulse.{name}.center"),
                width=_number(spec.get("width", 1.0), f"pulse.{name}.width"),
            )
        except ValueError as err:
            raise ConfigError(f"pulse.{name}", str(err)) from err
    if system == POLARIZED:
        w_pulse = pulses.get("W")
        if w_pulse is not None and w_pulse.shape != "none" and w_pulse.amplitude != 0.0:
            raise ConfigError("pulse.W", "polarized system requires W = 0 (drop the W pulse)")

    isec = doc.get("initial", {})
    if not isinstance(isec, dict):
        raise ConfigError("initial", "expected a mapping")
    u0_prime = _number(isec.get("u0_prime", 0.0), "initial.u0_prime")

    ssec = doc.get("solver", {})
    if not isinstance(ssec, dict):
        raise ConfigError("solver", "expected a mapping")
    fp_tol = _number(ssec.get("fp_tol", 1.0e-12), "solver.fp_tol")
    max_iterations = _integer(ssec.get("max_iterations", 50), "solver.max_iterations")
    sing = _number(ssec.get("singularity_threshold", 1.0e-8), "solver.singularity_threshold")
    w_cap = _number(ssec.get("w_cap", 300.0), "solver.w_cap")
    if fp_tol <= 0.0 or sing <= 0.0 or w_cap <= 0.0 or max_iterations < 1:
        raise ConfigError("solver", "tolerances and caps must be positive")

    csec = doc.get("convergence", {})
    if not isinstance(csec, dict):
        raise ConfigError("convergence", "expected a mapping")
    levels = _integer(csec.get("levels", 3), "convergence.levels")
    if levels < 2:
        raise ConfigError("convergence.levels", "need at least 2 levels")

    osec = doc.get("output", {})
    if not isinstance(osec, dict):
        raise ConfigError("output", "expected a mapping")
    reports = osec.get("reports", list(REPORT_KINDS))
    if not isinstance(reports, list):
        raise ConfigError("output.reports", "expected a list")
    for rep in reports:
        if rep not in REPORT_KINDS:
            raise ConfigError("output.reports", f"unknown report {rep!r}; expected {REPORT_KINDS}")

    return ScenarioConfig(
        system=system,
        grid=grid,
        background=background,
        table=table,
        pulses=pulses,
        u0_prime=u0_prime,
        fp_tol=fp_tol,
        max_iterations=max_iterations,
        singularity_threshold=sing,
        w_cap=w_cap,
        convergence_levels=levels,
        reports=tuple(reports),
    )


def load_config(path: str | Path) -> ScenarioConfig:
    """Read and validate a YAML (or manifest JSON) scenario file."""
    text = Path(path).read_text()
    try:
        # Manifests are JSON; parse them as such, since YAML 1.1 reads
        # dot-less exponent literals like 1e-12 as strings.
        doc = json.loads(text)
    except ValueError:
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as err:
            raise ConfigError("<file>", f"cannot parse {path}: {err}") from err
    return parse_config(doc)


def _table_lines(table_path: Path, grid: CharacteristicGrid) -> dict[str, np.ndarray]:
    """Read a tabulated boundary line and interpolate it to the grid's v nodes."""
    from scipy.interpolate import CubicSpline

    rows = np.genfromtxt(table_path, delimiter=",", names=True, comments="#")
    for col in ("v", "M", "U", "V", "W"):
        if col not in (rows.dtype.names or ()):
            raise ConfigError("boundary.table", f"{table_path}: missing column {col!r}")
    v_tab = np.atleast_1d(rows["v"])
    if v_tab.size < 4:
        raise ConfigError("boundary.table", f"{table_path}: need at least 4 samples")
    if np.any(np.diff(v_tab) <= 0.0):
        raise ConfigError("boundary.table", f"{table_path}: v column must strictly increase")
    if grid.v_min < v_tab[0] - 1e-12 or grid.v_max > v_tab[-1] + 1e-12:
        raise ConfigError(
            "boundary.table",
            f"{table_path}: table covers [{v_tab[0]}, {v_tab[-1]}] "
            f"but the grid needs [{grid.v_min}, {grid.v_max}]",
        )
    out = {}
    for name in ("M", "U", "V", "W"):
        spline = CubicSpline(v_tab, np.atleast_1d(rows[name]))
        out[name] = spline(grid.v)
    return out


def boundary_lines(
    config: ScenarioConfig, base_dir: Path | None = None
) -> tuple[dict[str, np.ndarray], list[dict[str, np.ndarray]]]:
    """Boundary-line samples for every slice.

    Returns (lines, aux): lines maps field -> (n_slices, n_v); aux is a
    per-slice dict of auxiliary background quantities (empty for tables).
    Background preconditions (v-range restrictions, pole guard) surface as
    ConfigError.
    """
    grid = config.grid
    ns = grid.n_slices
    if config.table is not None:
        table_path = Path(config.table)
        if base_dir is not None and not table_path.is_absolute():
            table_path = base_dir / table_path
        one = _table_lines(table_path, grid)
        lines = {name: np.tile(one[name], (ns, 1)) for name in ("M", "U", "V", "W")}
        return lines, [{} for _ in range(ns)]
    lines = {name: np.empty((ns, grid.n_v)) for name in ("M", "U", "V", "W")}
    aux_all = []
    for s in range(ns):
        try:
            one, aux = sample_boundary_line(config.background, grid, s)
        except ValueError as err:
            raise ConfigError("boundary", str(err)) from err
        for name in ("M", "U", "V", "W"):
            lines[name][s] = one[name]
        aux_all.append(aux)
    return lines, aux_all


def build_data(config: ScenarioConfig, base_dir: Path | None = None) -> BoundaryData:
    """Assemble Goursat data: sampled boundary line plus pulse-built initial line."""
    grid = config.grid
    lines, _ = boundary_lines(config, base_dir)
    init = {name: np.empty((grid.n_slices, grid.n_theta)) for name in ("M", "U", "V", "W")}
    for s in range(grid.n_slices):
        corner = {name: float(lines[name][s, 0]) for name in ("M", "U", "V", "W")}
        built = build_initial_line(grid, config.pulses, corner, u0_prime=config.u0_prime)
        init["M"][s] = built.M
        init["U"][s] = built.U
        init["V"][s] = built.V
        init["W"][s] = built.W
    return BoundaryData(grid=grid, initial_line=init, boundary_line=lines)
