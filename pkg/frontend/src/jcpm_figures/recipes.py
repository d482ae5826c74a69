"""Figure recipes: which experiment CSVs and columns each figure consumes."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path


class FigureError(Exception):
    """Missing or unusable input data; the message names the experiment to rerun."""


@dataclass(frozen=True)
class FigureRecipe:
    """Declarative mapping from experiment output to one rendered figure."""

    figure_id: str
    experiment: str
    files: tuple[str, ...]  # CSV stems relative to the csv dir
    columns: dict[str, tuple[str, ...]]  # required columns per stem
    description: str


FIGURES: dict[str, FigureRecipe] = {r.figure_id: r for r in [
    FigureRecipe(
        "fig2", "sweep-charge", ("sweep-charge",),
        {"sweep-charge": ("q_G1_e", "q_G2_e", "delta_omega_r_MHz", "status")},
        "resonator frequency pull vs gate charge, two island-2 biases"),
    FigureRecipe(
        "fig3", "qubit-spectrum", ("qubit-spectrum",),
        {"qubit-spectrum": ("q_G1_e", "q_G2_e", "omega_q_GHz", "status")},
        "qubit level splitting vs gate charge"),
    FigureRecipe(
        "fig4", "g-over-delta", ("g-over-delta",),
        {"g-over-delta": ("q_G1_e", "q_G2_e", "abs_g_over_delta", "status")},
        "residual coupling-to-detuning ratio vs gate charge"),
    FigureRecipe(
        "fig5", "sweep-flux", ("sweep-flux",),
        {"sweep-flux": ("q_G1_e", "q_G2_e", "Phix_rad", "delta_omega_r_MHz",
                        "status")},
        "frequency pull vs total flux at the parity operating points"),
    FigureRecipe(
        "fig6", "quality-factor", ("quality-factor_charge",
                                   "quality-factor_flux"),
        {"quality-factor_charge": ("q_G1_e", "Q", "status"),
         "quality-factor_flux": ("Phix_rad", "Q", "status")},
        "noise quality factor vs charge (top) and flux (bottom), log scale"),
    FigureRecipe(
        "figA2", "matrix-elements", ("matrix-elements",),
        {"matrix-elements": ("q_G1_e", "q_G2_e", "abs_cc_00", "abs_sc_00",
                             "abs_cc_10", "abs_sc_10", "status")},
        "even and odd coupling matrix elements vs gate charge"),
    FigureRecipe(
        "figB1", "kerr", ("kerr",),
        {"kerr": ("q_G1_e", "q_G2_e", "kerr_kHz", "status")},
        "Kerr coefficient vs gate charge"),
    FigureRecipe(
        "figC1", "potential-grid", ("potential-grid", "potential-grid_minima"),
        {"potential-grid": ("phi1_rad", "phi2_rad", "U_GHz", "status"),
         "potential-grid_minima": ("phi1_rad", "phi2_rad", "U_GHz", "status")},
        "junction potential landscape with marked minima"),
    FigureRecipe(
        "figD1", "sensitivity", ("sensitivity",),
        {"sensitivity": ("q_G1_e", "S_q_e_per_rtHz", "status")},
        "dynamical charge sensitivity vs gate charge"),
]}


def read_table(csv_dir: str | Path, stem: str, experiment: str,
               required: tuple[str, ...]) -> dict[str, list]:
    """Columns of one experiment CSV, keeping ok rows only.

    Raises FigureError naming the experiment to rerun when the file or a
    required column is missing, or when no usable rows remain.
    """
    path = Path(csv_dir) / f"{stem}.csv"
    if not path.exists():
        raise FigureError(
            f"{path} not found; run `jcpm {experiment}` to produce it")
    with path.open() as fh:
        rows = list(csv.reader(line for line in fh if not line.startswith("#")))
    if not rows:
        raise FigureError(f"{path} is empty; rerun `jcpm {experiment}`")
    header, data = rows[0], rows[1:]
    missing = [c for c in required if c not in header]
    if missing:
        raise FigureError(
            f"{path} lacks columns {missing}; rerun `jcpm {experiment}`")
    idx = {c: header.index(c) for c in header}
    table: dict[str, list] = {c: [] for c in header}
    status_col = idx.get("status")
    for row in data:
        if status_col is not None and row[status_col] != "ok":
            continue
        for c in header:
            value = row[idx[c]]
            if c == "status":
                table[c].append(value)
                continue
            try:
                table[c].append(float(value))
            except ValueError:
                table[c].append(math.nan)
    if not table[header[0]]:
        raise FigureError(
            f"{path} has no usable rows; rerun `jcpm {experiment}`")
    return table
