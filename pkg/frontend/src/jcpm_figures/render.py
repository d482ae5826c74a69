"""Rendering: one matplotlib figure per recipe, written as SVG and PNG."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .recipes import FIGURES, FigureError, read_table

SOLID_Q2 = 1.0  # island-2 bias of one electron: solid curves
DASHED_Q2 = 0.0


def _split_curves(table, key="q_G2_e"):
    groups: dict[float, dict[str, np.ndarray]] = {}
    values = np.asarray(table[key])
    for g in sorted(set(values.tolist()), reverse=True):
        mask = values == g
        groups[g] = {c: np.asarray(v)[mask] for c, v in table.items()
                     if c != "status"}
    return groups

def _style(q2: float) -> dict:
    if q2 == SOLID_Q2:
        return {"linestyle": "-", "color": "tab:blue",
                "label": "$q_{G,2} = e$"}
    return {"linestyle": "--", "color": "tab:red", "label": "$q_{G,2} = 0$"}


def _save(fig, out_dir: Path, figure_id: str) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for ext in ("svg", "png"):
        path = out_dir / f"{figure_id}.{ext}"
        fig.savefig(path, dpi=150, bbox_inches="tight")
        paths.append(path)
    plt.close(fig)
    return paths


def _render_fig2(tables, ax):
    for q2, curve in _split_curves(tables["sweep-charge"]).items():
        ax.plot(curve["q_G1_e"], curve["delta_omega_r_MHz"], **_style(q2))
    ax.set_xlabel(r"gate charge $q_{G,1}$ (e)")
    ax.set_ylabel(r"$\delta\omega_r / 2\pi$ (MHz)")
    ax.legend()


def _render_fig3(tables, ax):
    for q2, curve in _split_curves(tables["qubit-spectrum"]).items():
        ax.plot(curve["q_G1_e"], curve["omega_q_GHz"], **_style(q2))
    ax.axhline(7.5, color="k", linestyle=":", linewidth=1,
               label="resonator 7.5 GHz")
    ax.set_xlabel(r"gate charge $q_{G,1}$ (e)")
    ax.set_ylabel(r"$\omega_q / 2\pi$ (GHz)")
    ax.legend()


def _render_fig4(tables, ax):
    for q2, curve in _split_curves(tables["g-over-delta"]).items():
        ax.semilogy(curve["q_G1_e"], np.maximum(curve["abs_g_over_delta"],
                                                1e-20), **_style(q2))
    ax.set_xlabel(r"gate charge $q_{G,1}$ (e)")
    ax.set_ylabel(r"$|g/\Delta|$")
    ax.legend()


def _render_fig5(tables, ax):
    table = tables["sweep-flux"]
    groups: dict[float, dict] = {}
    q1 = np.asarray(table["q_G1_e"])
    for g in sorted(set(q1.tolist())):
        mask = q1 == g
        groups[g] = {c: np.asarray(v)[mask] for c, v in table.items()
                     if c != "status"}
    styles = {0.0: {"linestyle": "-", "color": "tab:blue",
                    "label": "$q_{G,1}=0,\\ q_{G,2}=e$"},
              1.0: {"linestyle": "--", "color": "tab:red",
                    "label": "$q_{G,1}=q_{G,2}=e$"}}
    for g, curve in groups.items():
        phi = curve["Phix_rad"] / (2 * math.pi)
        ax.plot(phi, curve["delta_omega_r_MHz"],
                **styles.get(g, {"label": f"q_G1 = {g} e"}))
    ax.axvline(1.0, color="k", linestyle=":", linewidth=1)
    ax.set_xlabel(r"total flux $\Phi_x/\Phi_0$")
    ax.set_ylabel(r"$\delta\omega_r / 2\pi$ (MHz)")
    ax.legend()


def _render_figA2(tables, axes):
    table = tables["matrix-elements"]
    top, bottom = axes
    for q2, curve in _split_curves(table).items():
        suffix = "e" if q2 == SOLID_Q2 else "0"
        ls = "-" if q2 == SOLID_Q2 else "--"
        top.plot(curve["q_G1_e"], curve["abs_cc_00"], ls, color="tab:red",
                 label=f"$|\\langle 0|cc|0\\rangle|$, $q_{{G,2}}={suffix}$")
        top.plot(curve["q_G1_e"], curve["abs_sc_00"], ls, color="tab:blue",
                 label=f"$|\\langle 0|sc|0\\rangle|$, $q_{{G,2}}={suffix}$")
        bottom.plot(curve["q_G1_e"], curve["abs_cc_10"], ls, color="tab:red",
                    label=f"$|\\langle 1|cc|0\\rangle|$, $q_{{G,2}}={suffix}$")
        bottom.plot(curve["q_G1_e"], curve["abs_sc_10"], ls, color="tab:blue",
                    label=f"$|\\langle 1|sc|0\\rangle|$, $q_{{G,2}}={suffix}$")
    top.set_ylabel("even elements")
    bottom.set_ylabel("odd elements")
    bottom.set_xlabel(r"gate charge $q_{G,1}$ (e)")
    top.legend(fontsize=7)
    bottom.legend(fontsize=7)


def _render_figB1(tables, ax):
    for q2, curve in _split_curves(tables["kerr"]).items():
        ax.plot(curve["q_G1_e"], curve["kerr_kHz"], **_style(q2))
    ax.set_xlabel(r"gate charge $q_{G,1}$ (e)")
    ax.set_ylabel(r"$K / 2\pi$ (kHz)")
    ax.legend()


def _render_figC1(tables, ax):
    grid = tables["potential-grid"]
    phi1 = np.asarray(grid["phi1_rad"])
    phi2 = np.asarray(grid["phi2_rad"])
    u = np.asarray(grid["U_GHz"])
    x = np.unique(phi1)
    y = np.unique(phi2)
    z = u.reshape(len(x), len(y))
    mesh = ax.pcolormesh(x, y, z.T, shading="auto", cmap="viridis")
    plt.colorbar(mesh, ax=ax, label=r"$U$ (GHz)")
    minima = tables["potential-grid_minima"]
    u_min = min(minima["U_GHz"])
    colors = ["tab:orange" if abs(v - u_min) < 1e-6 else "tab:pink"
              for v in minima["U_GHz"]]
    ax.scatter(minima["phi1_rad"], minima["phi2_rad"], c=colors, s=25,
               edgecolors="k", linewidths=0.4)
    ax.set_xlabel(r"$\phi_1$ (rad)")
    ax.set_ylabel(r"$\phi_2$ (rad)")


def _render_figD1(tables, ax):
    table = tables["sensitivity"]
    finite = np.isfinite(np.asarray(table["S_q_e_per_rtHz"]))
    q1 = np.asarray(table["q_G1_e"])[finite]
    s = np.asarray(table["S_q_e_per_rtHz"])[finite]
    ax.semilogy(q1, s, "-", color="tab:blue")
    ax.set_xlabel(r"gate charge $q_{G,1}$ (e)")
    ax.set_ylabel(r"$S_q$ (e$/\sqrt{\mathrm{Hz}}$)")


def render(figure_id: str, csv_dir: str | Path, out_dir: str | Path
           ) -> list[Path]:
    """Render one figure id from the CSVs in csv_dir; emit SVG and PNG."""
    if figure_id not in FIGURES:
        raise FigureError(f"unknown figure id {figure_id!r}; "
                          f"choose from {sorted(FIGURES)}")
    recipe = FIGURES[figure_id]
    tables = {stem: read_table(csv_dir, stem, recipe.experiment,
                               recipe.columns[stem])
              for stem in recipe.files}

    if figure_id == "figA2":
        fig, axes = plt.subplots(2, 1, figsize=(5.2, 6.0), sharex=True)
        _render_figA2(tables, axes)
    elif figure_id == "fig6":
        fig, (top, bottom) = plt.subplots(2, 1, figsize=(5.2, 6.0))
        charge = tables["quality-factor_charge"]
        top.semilogy(charge["q_G1_e"], charge["Q"], color="tab:blue")
        top.set_xlabel(r"gate charge $q_{G,1}$ (e)")
        top.set_ylabel(r"$Q$")
        flux = tables["quality-factor_flux"]
        bottom.semilogy(np.asarray(flux["Phix_rad"]) / (2 * math.pi),
                        flux["Q"], color="tab:blue")
        bottom.set_xlabel(r"total flux $\Phi_x/\Phi_0$")
        bottom.set_ylabel(r"$Q$")
        fig.tight_layout()
    else:
        fig, ax = plt.subplots(figsize=(5.2, 3.6))
        {"fig2": _render_fig2, "fig3": _render_fig3, "fig4": _render_fig4,
         "fig5": _render_fig5, "figB1": _render_figB1,
         "figC1": _render_figC1, "figD1": _render_figD1}[figure_id](tables, ax)
        fig.tight_layout()
    return _save(fig, Path(out_dir), figure_id)
