"""Command-line driver.

    cpwave solve        --config scenario.yaml --out runs/a
    cpwave verify       --config scenario.yaml --out runs/a
    cpwave background   --config scenario.yaml --out runs/bg
    cpwave convergence  --config scenario.yaml --out runs/conv
    cpwave jump         --config scenario.yaml --out runs/a

solve evolves the scenario and writes solution tables plus a run manifest;
verify re-reads a stored solve and emits the reports selected in the
config (constraints, jump, ricci, variational); background samples the
boundary line only; convergence repeats the solve on nested refinements
and reports observed orders; jump solves and emits the jump-relation
table.  Exit codes: 0 success, 2 configuration error, 3 singular or
diverged evolution (artifacts are still written), 4 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from cpwave import __version__
from cpwave.artifacts import (
    MANIFEST_NAME,
    fmt,
    read_solution,
    solution_filename,
    write_manifest,
    write_solution,
    write_table,
)
from cpwave.config import ConfigError, ScenarioConfig, boundary_lines, build_data, load_config
from cpwave.constraints import constraint_report, jump_report
from cpwave.grid import CharacteristicGrid, coarse_index_map, refine_grid
from cpwave.initial_line import FocusingError
from cpwave.ricci import ricci_from_reduced, ricci_residuals
from cpwave.solver import SolveResult, solve_goursat
from cpwave.variational import action_stationarity_check

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SINGULAR = 3
EXIT_IO = 4

_FIELDS = ("M", "U", "V", "W")

BOUNDARY_TABLE_COPY = "boundary_line.csv"


def _emit_manifest(config: ScenarioConfig, base_dir: Path, out: Path,
                   command: str, extra: dict) -> None:
    """Write the run manifest, bundling a table-sourced boundary line.

    The original table bytes are copied next to the manifest and the echoed
    config points at the copy, so a run directory re-runs from anywhere:
    `cpwave <cmd> --config <out>/run_manifest.json --out <elsewhere>`.
    """
    if config.table is not None:
        src = Path(config.table)
        if not src.is_absolute():
            src = base_dir / src
        dst = out / BOUNDARY_TABLE_COPY
        if src.resolve() != dst.resolve():
            dst.write_bytes(src.read_bytes())
        config = replace(config, table=BOUNDARY_TABLE_COPY)
    write_manifest(out, command, config, extra)


def _solve(config: ScenarioConfig, base_dir: Path, threads: int) -> SolveResult:
    data = build_data(config, base_dir)
    return solve_goursat(
        config.system,
        data,
        threads=threads,
        fp_tol=config.fp_tol,
        max_fp_iter=config.max_iterations,
        sing_threshold=config.singularity_threshold,
        w_cap=config.w_cap,
    )


def _solve_extra(result: SolveResult) -> dict:
    extra = {
        "status": result.status,
        "min_exp_neg_u": result.min_exp_neg_u,
        "fixed_point": {
            "max_iterations": result.fixed_point.max_iterations,
            "max_residual": result.fixed_point.max_residual,
        },
    }
    if result.singular_location is not None:
        th, v, s = result.singular_location
        extra["singular_location"] = {"theta": th, "v": v, "slice": s}
    return extra


def _cmd_solve(config: ScenarioConfig, base_dir: Path, out: Path, args) -> int:
    result = _solve(config, base_dir, args.threads)
    write_solution(out, result)
    _emit_manifest(config, base_dir, out, "solve", _solve_extra(result))
    if not args.quiet:
        print(f"solve: status={result.status} min_exp_neg_u={result.min_exp_neg_u:.3e}")
        if result.singular_location is not None:
            th, v, s = result.singular_location
            print(f"solve: first singular cell at theta={th:.6g} v={v:.6g} slice={s}")
    return EXIT_OK if result.status == "completed" else EXIT_SINGULAR


def _cmd_verify(config: ScenarioConfig, base_dir: Path, out: Path, args) -> int:
    stored_config, state, _ = read_solution(out)
    data = build_data(stored_config, out)
    summary: dict = {}
    grid = state.grid

    if "constraints" in stored_config.reports:
        rep = constraint_report(state)
        theta_int = grid.theta[1:-1]
        for s in range(grid.n_slices):
            rows = []
            for i, th in enumerate(theta_int):
                for j, v in enumerate(grid.v):
                    row = [th, v, rep.theta_residual[s, i, j]]
                    if rep.transport_defect is not None:
                        row.append(rep.transport_defect[s, i, j])
                    rows.append(row)
            cols = ["theta", "v", "constraint_residual"]
            if rep.transport_defect is not None:
                cols.append("transport_defect")
            write_table(out / f"constraints_slice{s:03d}.csv", grid, s, cols, rows)
        summary["constraints"] = {
            "max_abs_residual": rep.max_abs_residual,
            "max_abs_g_minus": float(np.max(np.abs(rep.g_minus))),
            "max_abs_g_plus": float(np.max(np.abs(rep.g_plus))),
        }
        if rep.transport_defect is not None:
            summary["constraints"]["max_abs_transport_defect"] = float(
                np.max(np.abs(rep.transport_defect))
            )

    if "jump" in stored_config.reports:
        summary["jump"] = _emit_jump(state, data, out)

    if "ricci" in stored_config.reports:
        ric = ricci_residuals(state)
        pred = ricci_from_reduced(state)
        for s in range(grid.n_slices):
            rows = []
            for i, th in enumerate(grid.theta):
                for j, v in enumerate(grid.v):
                    rows.append(
                        [th, v, ric.r00_m2[s, i, j], ric.r01_m1[s, i, j],
                         ric.rab_m1[s, i, j, 0, 0], ric.rab_m1[s, i, j, 0, 1],
                         ric.rab_m1[s, i, j, 1, 1]]
                    )
            write_table(
                out / f"ricci_slice{s:03d}.csv", grid, s,
                ["theta", "v", "r00_m2", "r01_m1", "rab_22", "rab_23", "rab_33"],
                rows,
            )
        summary["ricci"] = {"norms": ric.norms, "reduced_identity_norms": pred.norms}

    if "variational" in stored_config.reports:
        act = action_stationarity_check(state)
        summary["variational"] = {
            "action": [float(a) for a in act.action],
            "max_defect": act.max_defect(),
            "defects": {k: [float(x) for x in v] for k, v in sorted(act.defects.items())},
            "lambda_derivative": [float(x) for x in act.lambda_derivative],
            "lambda_quadrature": [float(x) for x in act.lambda_quadrature],
        }

    (out / "verify_report.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True, allow_nan=False, default=float) + "\n"
    )
    if not args.quiet:
        for key in sorted(summary):
            print(f"verify: wrote {key} report")
    return EXIT_OK


def _emit_jump(state, data, out: Path) -> dict:
    rep = jump_report(state, data)
    grid = state.grid
    for s in range(grid.n_slices):
        rows = []
        for j, v in enumerate(grid.v):
            rows.append(
                [
                    v,
                    rep.plus_line["M"][s, j],
                    rep.plus_line["U"][s, j],
                    rep.plus_line["V"][s, j],
                    rep.plus_line["W"][s, j],
                    rep.u_jump_defect[s, j],
                    rep.g_minus[s, j],
                    rep.g_plus[s, j],
                    fmt(rep.log_g_defect[s, j]) if rep.log_g_valid[s, j] else "",
                ]
            )
        write_table(
            out / f"jump_slice{s:03d}.csv", grid, s,
            ["v", "M_plus", "U_plus", "V_plus", "W_plus",
             "u_jump_defect", "G_minus", "G_plus", "log_g_defect"],
            rows,
        )
    return {
        "predicted_u_jump": [float(x) for x in rep.predicted_u_jump],
        "max_abs_u_jump_defect": float(np.max(np.abs(rep.u_jump_defect))),
        "u_jump_spread": [float(x) for x in rep.u_jump_spread],
        "constraint_preserving": rep.constraint_preserving,
        "max_abs_log_g_defect": float(
            np.max(np.abs(rep.log_g_defect[rep.log_g_valid])) if np.any(rep.log_g_valid) else 0.0
        ),
    }


def _cmd_jump(config: ScenarioConfig, base_dir: Path, out: Path, args) -> int:
    result = _solve(config, base_dir, args.threads)
    extra = _solve_extra(result)
    if result.status != "completed":
        _emit_manifest(config, base_dir, out, "jump", extra)
        if not args.quiet:
            print(f"jump: evolution ended with status={result.status}; no jump table")
        return EXIT_SINGULAR
    data = build_data(config, base_dir)
    extra["jump"] = _emit_jump(result.state, data, out)
    _emit_manifest(config, base_dir, out, "jump", extra)
    if not args.quiet:
        print(f"jump: max |u_jump_defect| = {extra['jump']['max_abs_u_jump_defect']:.3e}")
    return EXIT_OK


def _cmd_background(config: ScenarioConfig, base_dir: Path, out: Path, args) -> int:
    lines, aux_all = boundary_lines(config, base_dir)
    grid = config.grid
    for s in range(grid.n_slices):
        aux = aux_all[s]
        aux_keys = sorted(aux)
        cols = ["v", "M", "U", "V", "W"] + aux_keys + ["G_analytic"]
        g_known = config.background is not None
        rows = []
        for j, v in enumerate(grid.v):
            row = [v] + [lines[name][s, j] for name in _FIELDS]
            row += [aux[k][j] for k in aux_keys]
            row.append(fmt(config.background.analytic_G(float(v))) if g_known else "")
            rows.append(row)
        write_table(out / f"background_slice{s:03d}.csv", grid, s, cols, rows)
    _emit_manifest(config, base_dir, out, "background", {"status": "completed"})
    if not args.quiet:
        print(f"background: wrote {grid.n_slices} slice table(s)")
    return EXIT_OK


def _cmd_convergence(config: ScenarioConfig, base_dir: Path, out: Path, args) -> int:
    levels = config.convergence_levels
    grids: list[CharacteristicGrid] = [config.grid]
    for _ in range(levels - 1):
        grids.append(refine_grid(grids[-1], 2))

    results = []
    for g in grids:
        level_config = ScenarioConfig(**{**_config_kwargs(config), "grid": g})
        results.append(_solve(level_config, base_dir, args.threads))

    for res in results:
        if res.status != "completed":
            _emit_manifest(config, base_dir, out, "convergence", _solve_extra(res))
            if not args.quiet:
                print(f"convergence: a level ended with status={res.status}")
            return EXIT_SINGULAR

    # Successive-difference errors on shared (coarse) nodes, then observed
    # order p = log2(e_coarse / e_fine) for adjacent error pairs.
    errors: dict[str, list[float]] = {name: [] for name in _FIELDS}
    for lev in range(levels - 1):
        coarse, fine = results[lev].state, results[lev + 1].state
        st, sv = coarse_index_map(coarse.grid, fine.grid)
        for name in _FIELDS:
            a = getattr(coarse, name)
            b = getattr(fine, name)[:, ::st, ::sv]
            errors[name].append(float(np.max(np.abs(a - b))))

    rows = []
    orders: dict[str, list[float]] = {}
    for name in _FIELDS:
        orders[name] = []
        for lev, err in enumerate(errors[name]):
            order = ""
            if lev > 0 and err > 0.0 and errors[name][lev - 1] > 0.0:
                p = float(np.log2(errors[name][lev - 1] / err))
                orders[name].append(p)
                order = fmt(p)
            rows.append(
                [name, str(grids[lev].n_theta), str(grids[lev].n_v),
                 str(grids[lev + 1].n_theta), str(grids[lev + 1].n_v), fmt(err), order]
            )
    write_table(
        out / "convergence.csv", config.grid, 0,
        ["field", "n_theta", "n_v", "n_theta_fine", "n_v_fine", "linf_difference", "observed_order"],
        rows,
    )
    _emit_manifest(
        config, base_dir, out, "convergence",
        {"status": "completed",
         "errors": {k: v for k, v in sorted(errors.items())},
         "observed_orders": {k: v for k, v in sorted(orders.items())}},
    )
    if not args.quiet:
        for name in _FIELDS:
            if orders[name]:
                print(f"convergence: {name} observed orders {[round(p, 3) for p in orders[name]]}")
    return EXIT_OK


def _config_kwargs(config: ScenarioConfig) -> dict:
    return {
        "system": config.system,
        "grid": config.grid,
        "background": config.background,
        "table": config.table,
        "pulses": config.pulses,
        "u0_prime": config.u0_prime,
        "fp_tol": config.fp_tol,
        "max_iterations": config.max_iterations,
        "singularity_threshold": config.singularity_threshold,
        "w_cap": config.w_cap,
        "convergence_levels": config.convergence_levels,
        "reports": config.reports,
    }


_COMMANDS = {
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "background": _cmd_background,
    "convergence": _cmd_convergence,
    "jump": _cmd_jump,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpwave", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"cpwave {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="scenario YAML (or run manifest JSON)")
        p.add_argument("--out", required=True, help="artifact directory (created if absent)")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
        p.add_argument("--threads", type=int, default=1,
                       help="slice-level worker threads; 0 = one per CPU")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads == 0:
        import os

        args.threads = os.cpu_count() or 1
    if args.threads < 0:
        print("error: --threads must be >= 0", file=sys.stderr)
        return EXIT_CONFIG

    try:
        config = load_config(args.config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"io error: {err}", file=sys.stderr)
        return EXIT_IO

    base_dir = Path(args.config).resolve().parent
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](config, base_dir, out, args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except FocusingError as err:
        print(f"focusing: {err}", file=sys.stderr)
        try:
            _emit_manifest(config, base_dir, out, args.command,
                           {"status": "focusing", "focus_theta": err.theta})
        except OSError:
            pass
        return EXIT_SINGULAR
    except OSError as err:
        print(f"io error: {err}", file=sys.stderr)
        return EXIT_IO
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
