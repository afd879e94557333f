"""Scenario-config parsing, validation paths, and table boundary sources."""
from __future__ import annotations

import json
import math

import numpy as np
import pytest

from cpwave import ConfigError, build_data, load_config, parse_config
from cpwave.config import REPORT_KINDS, boundary_lines


def minimal_doc(**overrides):
    doc = {
        "system": "polarized",
        "grid": {"theta": [0.0, 1.0], "v": [1.0, 2.0], "n_theta": 11, "n_v": 11},
        "boundary": {"background": "minkowski"},
    }
    doc.update(overrides)
    return doc


def test_defaults_fill_in():
    cfg = parse_config(minimal_doc())
    assert cfg.system == "polarized"
    assert cfg.grid.slices == ((math.pi / 2.0, 0.0),)
    assert cfg.background.kind == "minkowski"
    assert cfg.table is None
    assert cfg.pulses == {}
    assert cfg.u0_prime == 0.0
    assert cfg.fp_tol == 1e-12
    assert cfg.max_iterations == 50
    assert cfg.singularity_threshold == 1e-8
    assert cfg.w_cap == 300.0
    assert cfg.convergence_levels == 3
    assert cfg.reports == REPORT_KINDS


@pytest.mark.parametrize(
    "mutate, path",
    [
        (lambda d: d.pop("system"), "<root>.system"),
        (lambda d: d.update(system="twisted"), "system"),
        (lambda d: d["grid"].pop("v"), "grid.v"),
        (lambda d: d["grid"].update(n_theta=2.5), "grid.n_theta"),
        (lambda d: d["grid"].update(theta=[0.0]), "grid.theta"),
        (lambda d: d["grid"].update(slices=[]), "grid.slices"),
        (lambda d: d.update(boundary={}), "boundary"),
        (lambda d: d.update(boundary={"background": "minkowski", "table": "x.csv"}),
         "boundary"),
        (lambda d: d.update(boundary={"background": "nowhere"}), "boundary"),
        (lambda d: d.update(boundary={"background": "robertson_walker",
                                      "scale_factor": "dust"}),
         "boundary.scale_factor"),
        (lambda d: d.update(pulse={"Q": {"amplitude": 0.1}}), "pulse.Q"),
        (lambda d: d.update(pulse={"V": {"shape": "square"}}), "pulse.V"),
        (lambda d: d.update(pulse={"W": {"shape": "gaussian", "amplitude": 0.1}}),
         "pulse.W"),
        (lambda d: d.update(solver={"fp_tol": -1.0}), "solver"),
        (lambda d: d.update(solver={"max_iterations": 0}), "solver"),
        (lambda d: d.update(convergence={"levels": 1}), "convergence.levels"),
        (lambda d: d.update(output={"reports": ["spectra"]}), "output.reports"),
        (lambda d: d.update(initial={"u0_prime": "fast"}), "initial.u0_prime"),
    ],
)
def test_error_paths(mutate, path):
    doc = minimal_doc()
    mutate(doc)
    with pytest.raises(ConfigError) as err:
        parse_config(doc)
    assert err.value.path == path


def test_degenerate_grid_reported_under_grid():
    doc = minimal_doc()
    doc["grid"]["theta"] = [1.0, 1.0]
    with pytest.raises(ConfigError) as err:
        parse_config(doc)
    assert err.value.path == "grid"


def test_w_pulse_allowed_for_general_system():
    doc = minimal_doc(system="general",
                      pulse={"W": {"shape": "gaussian", "amplitude": 0.1,
                                   "center": 0.5, "width": 0.2}})
    cfg = parse_config(doc)
    assert cfg.pulses["W"].amplitude == 0.1


def test_scale_factor_preset_and_override():
    doc = minimal_doc(boundary={"background": "robertson_walker",
                                "scale_factor": "matter"})
    assert parse_config(doc).background.exponent == pytest.approx(2.0 / 3.0)
    doc["boundary"]["exponent"] = 0.25
    assert parse_config(doc).background.exponent == 0.25


def test_round_trip_through_mapping():
    doc = minimal_doc(
        system="general",
        pulse={"V": {"shape": "gaussian", "amplitude": 0.2, "center": 0.4,
                     "width": 0.1}},
        solver={"fp_tol": 1e-11, "max_iterations": 40},
        output={"reports": ["constraints", "ricci"]},
    )
    cfg = parse_config(doc)
    again = parse_config(cfg.to_mapping())
    assert again == cfg


def test_manifest_document_reruns_embedded_config():
    manifest = {"package": {"name": "cpwave"}, "config": minimal_doc()}
    cfg = parse_config(manifest)
    assert cfg.grid.n_v == 11


def test_load_yaml_and_json(tmp_path):
    doc = minimal_doc(solver={"fp_tol": 1e-12})
    ypath = tmp_path / "run.yaml"
    ypath.write_text(
        "system: polarized\n"
        "grid:\n  theta: [0.0, 1.0]\n  v: [1.0, 2.0]\n  n_theta: 11\n  n_v: 11\n"
        "boundary:\n  background: minkowski\n"
        "solver:\n  fp_tol: 1.0e-12\n"
    )
    jpath = tmp_path / "run.json"
    jpath.write_text(json.dumps(doc))
    assert load_config(ypath) == load_config(jpath)
    # dot-less exponent literals are numbers here, not YAML 1.1 strings
    jpath.write_text(json.dumps(minimal_doc(solver={"fp_tol": 1e-12})))
    assert load_config(jpath).fp_tol == 1e-12


def test_load_rejects_garbage(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("system: [unclosed\n")
    with pytest.raises(ConfigError) as err:
        load_config(path)
    assert err.value.path == "<file>"


def _write_table(path, v, M=None, U=None, V=None, W=None, drop=None):
    cols = {
        "v": v,
        "M": M if M is not None else np.zeros_like(v),
        "U": U if U is not None else np.zeros_like(v),
        "V": V if V is not None else np.zeros_like(v),
        "W": W if W is not None else np.zeros_like(v),
    }
    if drop:
        cols.pop(drop)
    names = list(cols)
    lines = [",".join(names)]
    for i in range(len(v)):
        lines.append(",".join(repr(float(cols[k][i])) for k in names))
    path.write_text("\n".join(lines) + "\n")


def _table_doc(path):
    return minimal_doc(boundary={"table": str(path)})


def test_table_interpolates_to_grid(tmp_path):
    v = np.linspace(1.0, 2.0, 11)
    path = tmp_path / "line.csv"
    _write_table(path, v, M=2.0 * v, U=v**2, V=np.sin(v))
    cfg = parse_config(_table_doc(path))
    lines, aux = boundary_lines(cfg)
    np.testing.assert_allclose(lines["M"][0], 2.0 * cfg.grid.v, rtol=0.0, atol=1e-13)
    np.testing.assert_allclose(lines["U"][0], cfg.grid.v ** 2, rtol=0.0, atol=1e-13)
    assert np.max(np.abs(lines["V"][0] - np.sin(cfg.grid.v))) < 1e-5
    np.testing.assert_array_equal(lines["W"][0], 0.0)
    assert aux == [{}]


def test_table_relative_to_base_dir(tmp_path):
    v = np.linspace(1.0, 2.0, 11)
    _write_table(tmp_path / "line.csv", v)
    doc = minimal_doc(boundary={"table": "line.csv"})
    lines, _ = boundary_lines(parse_config(doc), base_dir=tmp_path)
    np.testing.assert_array_equal(lines["U"][0], 0.0)


@pytest.mark.parametrize(
    "spoil, fragment",
    [
        (dict(drop="U"), "missing column"),
        (dict(short=True), "at least 4"),
        (dict(shuffle=True), "strictly increase"),
        (dict(narrow=True), "covers"),
    ],
)
def test_table_validation(tmp_path, spoil, fragment):
    path = tmp_path / "line.csv"
    v = np.linspace(1.0, 2.0, 3 if spoil.get("short") else 11)
    if spoil.get("narrow"):
        v = np.linspace(1.2, 2.0, 11)
    if spoil.get("shuffle"):
        v = v.copy()
        v[3] = v[5]
    _write_table(path, v, drop=spoil.get("drop"))
    with pytest.raises(ConfigError, match=fragment):
        boundary_lines(parse_config(_table_doc(path)))


def test_build_data_assembles_goursat_corner(tmp_path):
    doc = minimal_doc(
        pulse={"V": {"shape": "gaussian", "amplitude": 0.1, "center": 0.5,
                     "width": 0.15}},
        initial={"u0_prime": 0.0},
    )
    cfg = parse_config(doc)
    data = build_data(cfg)
    for name in ("M", "U", "V", "W"):
        assert data.initial_line[name].shape == (1, 11)
        assert data.boundary_line[name].shape == (1, 11)
        assert data.initial_line[name][0, 0] == pytest.approx(
            data.boundary_line[name][0, 0], abs=1e-15)
    # the V pulse is anchored at the corner value, then rises
    assert np.max(data.initial_line["V"][0]) > data.initial_line["V"][0, 0]


def test_background_precondition_becomes_config_error():
    doc = minimal_doc()
    doc["grid"]["v"] = [-1.0, 1.0]  # outgoing minkowski needs v > 0
    with pytest.raises(ConfigError) as err:
        build_data(parse_config(doc))
    assert err.value.path == "boundary"
