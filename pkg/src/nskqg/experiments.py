"""Experiment orchestration: initial data, single runs, co-stepped runs, sweeps.

A single run ("nsk", "qg" or "limit") produces a diagnostics CSV with one
row at t=0 and one per accepted step, optional binary snapshots, a
run.json metadata file, and (by default) rendered figures.  A "sweep"
executes one limit run per eps value into its own subdirectory, fits the
convergence slopes across eps, and writes a summary CSV plus sweep.json.

Solver failures (vacuum, blow-up) abort the time loop but still write
everything accumulated so far; the metadata records the status and the
last good time.  All reductions are serial and in fixed order, so a
repeated run yields a bit-identical CSV.
"""

from __future__ import annotations

import dataclasses
import os
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import ExperimentConfig, config_hash, config_to_dict
from .constitutive import Params
from .diagnostics import DiagnosticsRow, cross_dissipation, diagnostics_row, fit_rate
from .errors import BlowUpError, SweepError, VacuumError
from .io import write_diagnostics_csv, write_json, write_snapshot
from .nsk import NskState, TimeControls, nsk_dt, nsk_step
from .qg import QgState, qg_dt, qg_step
from .spectral import SpectralWorkspace, VectorField, perp_grad


def _params(config: ExperimentConfig, eps: float | None = None) -> Params:
    return Params(config.gamma, config.s, config.alpha, config.eps if eps is None else eps)


def _controls(config: ExperimentConfig) -> TimeControls:
    return TimeControls(
        dt=config.dt, c_adv=config.c_adv, c_wave=config.c_wave, c_disp=config.c_disp
    )


def phi0_field(config: ExperimentConfig, ws: SpectralWorkspace) -> np.ndarray:
    """The initial stream potential: a finite cosine sum from phi0_modes."""
    phi = np.zeros((ws.N, ws.N))
    for k1, k2, amp, phase in config.phi0_modes:
        phi += amp * np.cos(k1 * ws.x1 + k2 * ws.x2 + phase)
    return phi


def generate_initial(
    config: ExperimentConfig, ws: SpectralWorkspace
) -> tuple[NskState, QgState]:
    """Well-prepared data: rho0 = 1 + eps*phi0, m0 = rho0 * perp_grad phi0.

    The returned QG profile is the recomputed (rho0 - 1)/eps rather than
    the analytic phi0, so the preparedness discrepancies d2 (and d1 at
    gamma = 2) vanish bit-exactly instead of to rounding; the snap moves
    phi0 by O(1e-16/eps).

    Raises VacuumError when the amplitude drives rho0 to the floor.
    """
    phi0 = phi0_field(config, ws)
    rho0 = 1.0 + config.eps * phi0
    mn = float(np.min(rho0))
    if mn <= config.rho_min:
        raise VacuumError(0.0, mn, config.rho_min)
    phi0 = (rho0 - 1.0) / config.eps
    v = perp_grad(phi0, ws)
    mom = VectorField(rho0 * v.u1, rho0 * v.u2)
    return NskState(rho0, mom, 0.0), QgState(phi0, 0.0)


@dataclasses.dataclass
class RunResult:
    config: ExperimentConfig
    rows: list[DiagnosticsRow]
    status: str  # "ok" | "vacuum" | "blowup"
    last_good_t: float
    steps: int
    error: str | None
    nsk_final: NskState | None
    qg_final: QgState | None
    out_dir: str
    csv_path: str


def _steady_partner(config: ExperimentConfig, ws: SpectralWorkspace, t: float) -> NskState:
    ones = np.ones((ws.N, ws.N))
    zeros = np.zeros((ws.N, ws.N))
    return NskState(ones, VectorField(zeros, zeros.copy()), t)


def _snapshot_fields(config: ExperimentConfig, nsk: NskState, qg: QgState) -> dict:
    fields = {}
    if config.experiment in ("nsk", "limit"):
        fields.update({"rho": nsk.rho, "m1": nsk.mom.u1, "m2": nsk.mom.u2})
    if config.experiment in ("qg", "limit"):
        fields["phi"] = qg.phi
    return fields


def run_experiment(
    config: ExperimentConfig, ws: SpectralWorkspace | None = None, figures: bool = True
) -> RunResult:
    """Execute a single nsk/qg/limit experiment and write its outputs."""
    if config.experiment not in ("nsk", "qg", "limit"):
        raise ValueError(
            f"run_experiment handles nsk/qg/limit, got {config.experiment!r}; "
            "use run_sweep for sweeps"
        )
    if ws is None:
        ws = SpectralWorkspace(config.N)
    t_start = time.perf_counter()
    params = _params(config)
    controls = _controls(config)
    step_nsk = config.experiment in ("nsk", "limit")
    step_qg = config.experiment in ("qg", "limit")

    if step_nsk:
        nsk, qg = generate_initial(config, ws)
        if not step_qg:
            qg = QgState(np.zeros((ws.N, ws.N)), 0.0)
    else:
        nsk = _steady_partner(config, ws, 0.0)
        qg = QgState(phi0_field(config, ws), 0.0)

    out_dir = config.output_dir
    os.makedirs(out_dir, exist_ok=True)
    snap_dir = os.path.join(out_dir, "snapshots")
    if config.snapshot_every > 0:
        os.makedirs(snap_dir, exist_ok=True)
        write_snapshot(
            os.path.join(snap_dir, "snapshot_000000.nskg"),
            _snapshot_fields(config, nsk, qg),
        )

    visc = 0.0
    g_prev = cross_dissipation(nsk, qg, params, ws)
    rows = [diagnostics_row(nsk, qg, visc, params, ws)]
    status, error = "ok", None
    t_end = config.T
    step = 0
    while nsk.t < t_end - 1e-12 * max(1.0, t_end):
        if step_nsk:
            dt = nsk_dt(nsk, controls, config.scheme, params, ws)
        else:
            dt = qg_dt(qg, controls, ws)
        dt = min(dt, t_end - nsk.t)
        step += 1
        try:
            if step_nsk:
                nsk = nsk_step(nsk, dt, params, ws, config.scheme, config.rho_min)
            else:
                nsk = NskState(nsk.rho, nsk.mom, nsk.t + dt)
            if step_qg:
                qg = qg_step(qg, dt, params, ws)
            else:
                qg = QgState(qg.phi, qg.t + dt)
        except VacuumError as e:
            status, error = "vacuum", str(e)
            break
        except BlowUpError as e:
            status, error = "blowup", str(e)
            break
        g_new = cross_dissipation(nsk, qg, params, ws)
        visc += 0.5 * dt * (g_prev + g_new)
        g_prev = g_new
        rows.append(diagnostics_row(nsk, qg, visc, params, ws, dt=dt))
        if config.snapshot_every > 0 and step % config.snapshot_every == 0:
            write_snapshot(
                os.path.join(snap_dir, f"snapshot_{step:06d}.nskg"),
                _snapshot_fields(config, nsk, qg),
            )

    csv_path = os.path.join(out_dir, "diagnostics.csv")
    write_diagnostics_csv(csv_path, rows)
    result = RunResult(
        config=config,
        rows=rows,
        status=status,
        last_good_t=rows[-1].t,
        steps=step if status == "ok" else step - 1,
        error=error,
        nsk_final=nsk if status == "ok" else None,
        qg_final=qg if status == "ok" else None,
        out_dir=out_dir,
        csv_path=csv_path,
    )
    write_json(
        os.path.join(out_dir, "run.json"),
        {
            "config": config_to_dict(config),
            "config_hash": config_hash(config),
            "status": status,
            "error": error,
            "last_good_t": result.last_good_t,
            "steps": result.steps,
            "wall_time_s": time.perf_counter() - t_start,
        },
    )
    if figures:
        from . import report

        report.render_run(result)
    return result


def run_limit_experiment(
    config: ExperimentConfig, ws: SpectralWorkspace | None = None, figures: bool = True
) -> RunResult:
    """Co-stepped NSK + QG run on the shared time grid (experiment=limit)."""
    if config.experiment != "limit":
        config = dataclasses.replace(config, experiment="limit")
    return run_experiment(config, ws, figures)


@dataclasses.dataclass
class SweepResult:
    config: ExperimentConfig
    eps_list: tuple[float, ...]
    statuses: tuple[str, ...]
    final_rows: tuple[DiagnosticsRow | None, ...]
    sup_H: tuple[float | None, ...]
    slope_rho: tuple[float, float, float] | None  # (slope, intercept, max_residual)
    slope_mom: tuple[float, float, float] | None
    slope_supH: tuple[float, float, float] | None
    config_hash: str
    wall_time_s: float
    out_dir: str


def _member_config(config: ExperimentConfig, eps: float) -> ExperimentConfig:
    return dataclasses.replace(
        config,
        experiment="limit",
        eps=eps,
        output_dir=os.path.join(config.output_dir, f"eps_{eps:g}"),
    )


def _run_member(args) -> tuple[str, list[DiagnosticsRow]]:
    config, figures = args
    try:
        result = run_experiment(config, None, figures)
    except VacuumError:
        # initial data already below the floor: the member never starts,
        # but the sweep carries on and records the failure
        return "vacuum", []
    except BlowUpError:
        return "blowup", []
    return result.status, result.rows


def run_sweep(
    config: ExperimentConfig,
    ws: SpectralWorkspace | None = None,
    workers: int = 1,
    figures: bool = True,
) -> SweepResult:
    """One limit experiment per eps, then convergence-rate fits across eps.

    Members are independent; workers > 1 runs them in separate processes.
    Results are assembled in eps_list order either way.  A member that
    fails (vacuum/blow-up) is excluded from the fits; fewer than 3
    survivors raise SweepError.
    """
    if config.experiment != "sweep":
        raise ValueError(f"run_sweep needs experiment=sweep, got {config.experiment!r}")
    t_start = time.perf_counter()
    os.makedirs(config.output_dir, exist_ok=True)
    member_configs = [_member_config(config, e) for e in config.eps_list]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_member, [(c, figures) for c in member_configs]))
    else:
        outcomes = [_run_member((c, figures)) for c in member_configs]

    statuses = tuple(status for status, _ in outcomes)
    final_rows = tuple(
        rows[-1] if status == "ok" else None for status, rows in outcomes
    )
    sup_H = tuple(
        max(r.H_eps for r in rows) if status == "ok" else None
        for status, rows in outcomes
    )

    ok = [
        (e, row, s)
        for e, row, s, st in zip(config.eps_list, final_rows, sup_H, statuses)
        if st == "ok"
    ]
    if len(ok) < 3:
        raise SweepError(
            f"only {len(ok)} of {len(config.eps_list)} sweep members succeeded; "
            "need at least 3 to fit rates"
        )

    def _fit(values):
        try:
            return fit_rate([(e, v) for (e, _, _), v in zip(ok, values)])
        except ValueError:
            return None

    slope_rho = _fit([row.norm_rho_gamma for _, row, _ in ok])
    slope_mom = _fit([row.norm_mom for _, row, _ in ok])
    slope_supH = _fit([s for _, _, s in ok])

    result = SweepResult(
        config=config,
        eps_list=config.eps_list,
        statuses=statuses,
        final_rows=final_rows,
        sup_H=sup_H,
        slope_rho=slope_rho,
        slope_mom=slope_mom,
        slope_supH=slope_supH,
        config_hash=config_hash(config),
        wall_time_s=time.perf_counter() - t_start,
        out_dir=config.output_dir,
    )
    _write_sweep_summary(result)
    if figures:
        from . import report

        report.render_sweep(result)
    return result


def _write_sweep_summary(result: SweepResult) -> None:
    from .diagnostics import CSV_COLUMNS
    from .io import format_value

    path = os.path.join(result.out_dir, "sweep.csv")
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write("eps,status," + ",".join(CSV_COLUMNS) + ",sup_H_eps\n")
        for e, st, row, sup in zip(
            result.eps_list, result.statuses, result.final_rows, result.sup_H
        ):
            if row is None:
                vals = ["nan"] * (len(CSV_COLUMNS) + 1)
            else:
                vals = [format_value(getattr(row, c)) for c in CSV_COLUMNS]
                vals.append(format_value(sup))
            f.write(format_value(e) + "," + st + "," + ",".join(vals) + "\n")

    def _fit_dict(fit):
        if fit is None:
            return None
        return {"slope": fit[0], "intercept": fit[1], "max_residual": fit[2]}

    write_json(
        os.path.join(result.out_dir, "sweep.json"),
        {
            "config": config_to_dict(result.config),
            "config_hash": result.config_hash,
            "eps_list": list(result.eps_list),
            "statuses": list(result.statuses),
            "sup_H_eps": [s if s is not None else None for s in result.sup_H],
            "fit_norm_rho_gamma": _fit_dict(result.slope_rho),
            "fit_norm_mom": _fit_dict(result.slope_mom),
            "fit_sup_H": _fit_dict(result.slope_supH),
            "wall_time_s": result.wall_time_s,
        },
    )
