"""Figure rendering for runs and sweeps (matplotlib, Agg backend).

Figures land in <output_dir>/figures next to the CSV output.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import read_diagnostics_csv

plt.rcParams.update(
    {
        "figure.dpi": 110,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "font.size": 9,
        "lines.linewidth": 1.2,
    }
)


def _maybe_log(ax, values_list) -> None:
    if all(np.all(np.asarray(v) > 0.0) for v in values_list if len(v)):
        ax.set_yscale("log")


def _column(rows, name):
    return np.array([getattr(r, name) for r in rows])


def render_run(result) -> list[str]:
    """Time-series and final-field figures for one run; returns the paths."""
    fig_dir = os.path.join(result.out_dir, "figures")
    os.makedirs(fig_dir, exist_ok=True)
    rows = result.rows
    t = _column(rows, "t")
    paths = []

    fig, axes = plt.subplots(1, 2, figsize=(9, 3.4), constrained_layout=True)
    axes[0].plot(t, _column(rows, "E_eps"), label="E_eps")
    axes[0].plot(t, _column(rows, "E_0"), label="E_0")
    axes[0].set_xlabel("t")
    axes[0].set_title("energies")
    axes[0].legend()
    axes[1].plot(t, _column(rows, "D_eps"), label="D_eps")
    axes[1].plot(t, _column(rows, "D_0"), label="D_0")
    axes[1].set_xlabel("t")
    axes[1].set_title("dissipations")
    axes[1].legend()
    p = os.path.join(fig_dir, "energies.png")
    fig.savefig(p)
    plt.close(fig)
    paths.append(p)

    fig, ax = plt.subplots(figsize=(5.2, 3.4), constrained_layout=True)
    series = {
        "H_eps": _column(rows, "H_eps"),
        "kinetic part": 0.5 * _column(rows, "norm_kinetic") ** 2,
        "G part": 0.5 * _column(rows, "norm_G") ** 2,
        "capillary part": 2.0 * _column(rows, "norm_cap") ** 2,
        "viscous integral": _column(rows, "visc_accum"),
    }
    for label, v in series.items():
        ax.plot(t, v, label=label)
    _maybe_log(ax, [v for v in series.values()])
    ax.set_xlabel("t")
    ax.set_title("modulated energy and its parts")
    ax.legend()
    p = os.path.join(fig_dir, "modulated.png")
    fig.savefig(p)
    plt.close(fig)
    paths.append(p)

    fig, ax = plt.subplots(figsize=(5.2, 3.4), constrained_layout=True)
    norm_names = ["norm_rho_gamma", "norm_mom", "norm_kinetic", "norm_G", "norm_cap"]
    data = [_column(rows, n) for n in norm_names]
    for name, v in zip(norm_names, data):
        ax.plot(t, v, label=name)
    _maybe_log(ax, data)
    ax.set_xlabel("t")
    ax.set_title("convergence norms")
    ax.legend()
    p = os.path.join(fig_dir, "norms.png")
    fig.savefig(p)
    plt.close(fig)
    paths.append(p)

    if result.nsk_final is not None and result.qg_final is not None:
        fig, axes = plt.subplots(1, 2, figsize=(9, 3.8), constrained_layout=True)
        im0 = axes[0].imshow(
            result.nsk_final.rho.T - 1.0, origin="lower", extent=(0, 2 * np.pi, 0, 2 * np.pi)
        )
        axes[0].set_title("rho - 1 (final)")
        fig.colorbar(im0, ax=axes[0], shrink=0.85)
        im1 = axes[1].imshow(
            result.qg_final.phi.T, origin="lower", extent=(0, 2 * np.pi, 0, 2 * np.pi)
        )
        axes[1].set_title("phi (final)")
        fig.colorbar(im1, ax=axes[1], shrink=0.85)
        for ax in axes:
            ax.set_xlabel("x1")
            ax.set_ylabel("x2")
            ax.grid(False)
        p = os.path.join(fig_dir, "fields.png")
        fig.savefig(p)
        plt.close(fig)
        paths.append(p)
    return paths


def render_sweep(result) -> list[str]:
    """Log-log rate plot and per-eps modulated-energy curves for a sweep."""
    fig_dir = os.path.join(result.out_dir, "figures")
    os.makedirs(fig_dir, exist_ok=True)
    paths = []

    ok = [
        (e, row, sup)
        for e, row, sup, st in zip(
            result.eps_list, result.final_rows, result.sup_H, result.statuses
        )
        if st == "ok"
    ]
    if ok:
        eps = np.array([e for e, _, _ in ok])
        fig, ax = plt.subplots(figsize=(5.2, 3.8), constrained_layout=True)
        curves = {
            "norm_rho_gamma(T)": (np.array([r.norm_rho_gamma for _, r, _ in ok]), result.slope_rho),
            "norm_mom(T)": (np.array([r.norm_mom for _, r, _ in ok]), result.slope_mom),
            "sup_t H_eps": (np.array([s for _, _, s in ok]), result.slope_supH),
        }
        for label, (vals, fit) in curves.items():
            if np.all(vals > 0.0):
                tag = f" (slope {fit[0]:.2f})" if fit else ""
                ax.loglog(eps, vals, "o-", label=label + tag)
        ax.set_xlabel("eps")
        ax.set_title("convergence with eps")
        ax.legend()
        p = os.path.join(fig_dir, "rates.png")
        fig.savefig(p)
        plt.close(fig)
        paths.append(p)

    fig, ax = plt.subplots(figsize=(5.2, 3.8), constrained_layout=True)
    any_curve = False
    for e, st in zip(result.eps_list, result.statuses):
        if st != "ok":
            continue
        csv = os.path.join(result.out_dir, f"eps_{e:g}", "diagnostics.csv")
        if not os.path.exists(csv):
            continue
        rows = read_diagnostics_csv(csv)
        h = _column(rows, "H_eps")
        ax.plot(_column(rows, "t"), h, label=f"eps={e:g}")
        any_curve = True
    if any_curve:
        _maybe_log(ax, [line.get_ydata() for line in ax.get_lines()])
        ax.set_xlabel("t")
        ax.set_title("modulated energy along the sweep")
        ax.legend()
        p = os.path.join(fig_dir, "modulated_sweep.png")
        fig.savefig(p)
        paths.append(p)
    plt.close(fig)
    return paths
