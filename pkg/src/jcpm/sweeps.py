"""Named experiments, CSV emission and the run manifest.

Each experiment produces one or two CSV files with a fixed column order,
prefixed by a comment block carrying the resolved configuration hash.
Per-point computation failures become rows with a non-ok status; they never
abort a sweep.  Output is deterministic for a fixed config and seed,
independent of the worker count.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .device import (BiasPoint, DeviceParams, charging_energy_ec,
                     device_to_config, quarter_wave_frequency)
from .errors import JcpmError
from .metrics import (NoiseModel, ReadoutParams, charge_sensitivity,
                      detection_bandwidth, frequency_derivatives, gate_fidelity,
                      gate_time, parity_contrast, parity_operating_points,
                      quality_factor, snr_report)
from .disorder import DisorderSpec, YieldCriteria, yield_estimate
from .qubit import jc_coupling, matrix_elements, potential_grid, qubit_splitting
from .spectral import resolve_ncut
from .resonator import cached_load, kerr_coefficient

DEFAULT_POINTS = 201
CHARGE_SWEEP_MAX_E = 2.0  # q_G1 in [0, 2] e
FLUX_SWEEP_BAND = (0.9, 1.1)  # of 2 pi


@dataclass
class ExperimentOptions:
    points: int = DEFAULT_POINTS
    workers: int = 1
    seed: int = 1234
    n_photons: float = 10.0
    kappa_mhz: float = 10.0  # linear linewidth kappa / 2 pi
    eta: float = 1.0
    sigma: float = 0.05
    n_samples: int = 1000
    delta_q: float = 1e-6
    theta: float = math.pi / 8
    phi_x: float = 2 * math.pi  # base flux for the charge-family sweeps

    def readout(self) -> ReadoutParams:
        return ReadoutParams.from_linear_mhz(self.kappa_mhz,
                                             n_photons=self.n_photons,
                                             eta=self.eta)


@dataclass
class ExperimentResult:
    name: str
    tables: list[tuple[str, list[str], list[list]]]  # (suffix, columns, rows)
    stats: dict = field(default_factory=dict)


def _map_points(fn: Callable, items: Sequence, workers: int) -> list:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _grid(lo: float, hi: float, n: int) -> list[float]:
    if n < 2:
        raise JcpmError("swept axes need at least 2 points")
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def _charge_axis(points: int) -> list[float]:
    return _grid(0.0, CHARGE_SWEEP_MAX_E, points)


def _flux_axis(points: int) -> list[float]:
    lo, hi = FLUX_SWEEP_BAND
    return _grid(lo * 2 * math.pi, hi * 2 * math.pi, points)


def _bias(q1_e: float, q2_e: float, phix: float = 2 * math.pi) -> BiasPoint:
    return BiasPoint(ng1=0.5 * q1_e, ng2=0.5 * q2_e, phi_x=phix)


def _run_charge_pull(device: DeviceParams,
                     opts: ExperimentOptions) -> ExperimentResult:
    axis = _charge_axis(opts.points)
    phix = opts.phi_x
    ref = cached_load(device, _bias(0.0, 0.0, phix)).omega_r

    def point(args):
        q1, q2 = args
        try:
            omega = cached_load(device, _bias(q1, q2, phix)).omega_r
            return [q1, q2, phix, omega, (omega - ref) * 1e3, "ok"]
        except JcpmError as exc:
            return [q1, q2, phix, math.nan, math.nan, f"error:{exc}"]

    jobs = [(q1, q2) for q2 in (1.0, 0.0) for q1 in axis]
    rows = _map_points(point, jobs, opts.workers)
    return ExperimentResult("sweep-charge", [(
        "", ["q_G1_e", "q_G2_e", "Phix_rad", "omega_r_GHz",
             "delta_omega_r_MHz", "status"], rows)])


def _run_flux_pull(device: DeviceParams, opts: ExperimentOptions) -> ExperimentResult:
    axis = _flux_axis(opts.points)

    def point(args):
        q1, q2, phix = args
        try:
            omega = cached_load(device, _bias(q1, q2, phix)).omega_r
            ref = cached_load(device, _bias(0.0, 0.0, phix)).omega_r
            return [q1, q2, phix, omega, (omega - ref) * 1e3, "ok"]
        except JcpmError as exc:
            return [q1, q2, phix, math.nan, math.nan, f"error:{exc}"]

    jobs = [(q1, 1.0, phix) for q1 in (0.0, 1.0) for phix in axis]
    rows = _map_points(point, jobs, opts.workers)
    return ExperimentResult("sweep-flux", [(
        "", ["q_G1_e", "q_G2_e", "Phix_rad", "omega_r_GHz",
             "delta_omega_r_MHz", "status"], rows)])


def _run_qubit_spectrum(device: DeviceParams,
                        opts: ExperimentOptions) -> ExperimentResult:
    axis = _charge_axis(opts.points)

    def point(args):
        q1, q2 = args
        try:
            wq = qubit_splitting(device, _bias(q1, q2, opts.phi_x))
            return [q1, q2, opts.phi_x, wq, "ok"]
        except JcpmError as exc:
            return [q1, q2, opts.phi_x, math.nan, f"error:{exc}"]

    jobs = [(q1, q2) for q2 in (1.0, 0.0) for q1 in axis]
    rows = _map_points(point, jobs, opts.workers)
    return ExperimentResult("qubit-spectrum", [(
        "", ["q_G1_e", "q_G2_e", "Phix_rad", "omega_q_GHz", "status"], rows)])


def _run_matrix_elements(device: DeviceParams,
                         opts: ExperimentOptions) -> ExperimentResult:
    axis = _charge_axis(opts.points)

    def point(args):
        q1, q2 = args
        try:
            elems = matrix_elements(device, _bias(q1, q2, opts.phi_x), k=2)
            return [q1, q2, abs(elems.cc[0, 0]), abs(elems.sc[0, 0]),
                    abs(elems.cc[1, 0]), abs(elems.sc[1, 0]), "ok"]
        except JcpmError as exc:
            return [q1, q2, math.nan, math.nan, math.nan, math.nan,
                    f"error:{exc}"]

    jobs = [(q1, q2) for q2 in (1.0, 0.0) for q1 in axis]
    rows = _map_points(point, jobs, opts.workers)
    return ExperimentResult("matrix-elements", [(
        "", ["q_G1_e", "q_G2_e", "abs_cc_00", "abs_sc_00", "abs_cc_10",
             "abs_sc_10", "status"], rows)])


def _run_g_over_delta(device: DeviceParams,
                      opts: ExperimentOptions) -> ExperimentResult:
    axis = _charge_axis(opts.points)

    def point(args):
        q1, q2 = args
        try:
            rep = jc_coupling(device, _bias(q1, q2, opts.phi_x))
            ratio = abs(rep.g_over_delta)
            return [q1, q2, rep.omega_q, rep.g_01, rep.delta, ratio, "ok"]
        except JcpmError as exc:
            return [q1, q2, math.nan, math.nan, math.nan, math.nan,
                    f"error:{exc}"]

    jobs = [(q1, q2) for q2 in (1.0, 0.0) for q1 in axis]
    rows = _map_points(point, jobs, opts.workers)
    return ExperimentResult("g-over-delta", [(
        "", ["q_G1_e", "q_G2_e", "omega_q_GHz", "g_GHz", "delta_GHz",
             "abs_g_over_delta", "status"], rows)])


def _run_kerr(device: DeviceParams, opts: ExperimentOptions) -> ExperimentResult:
    axis = _charge_axis(opts.points)
    # Common mode amplitude from the zero-charge default bias: the headline
    # column isolates the charge modulation of the quartic termination
    # energy from the (separately reported) participation drift.
    psi_j_ref = cached_load(device, _bias(0.0, 0.0, opts.phi_x)).psi_j

    def point(args):
        q1, q2 = args
        try:
            load = cached_load(device, _bias(q1, q2, opts.phi_x))
            k_ref = kerr_coefficient(load.curve, psi_j_ref)
            return [q1, q2, k_ref * 1e6, load.kerr * 1e6, "ok"]
        except JcpmError as exc:
            return [q1, q2, math.nan, math.nan, f"error:{exc}"]

    jobs = [(q1, q2) for q2 in (1.0, 0.0) for q1 in axis]
    rows = _map_points(point, jobs, opts.workers)
    return ExperimentResult("kerr", [(
        "", ["q_G1_e", "q_G2_e", "kerr_kHz", "kerr_local_psij_kHz", "status"],
        rows)])


def _run_quality_factor(device: DeviceParams,
                        opts: ExperimentOptions) -> ExperimentResult:
    noise = NoiseModel()

    def charge_point(q1):
        try:
            return [q1, 1.0,
                    quality_factor(device, _bias(q1, 1.0, opts.phi_x), noise),
                    "ok"]
        except JcpmError as exc:
            return [q1, 1.0, math.nan, f"error:{exc}"]

    def flux_point(phix):
        try:
            return [phix, quality_factor(device, _bias(0.0, 1.0, phix), noise),
                    "ok"]
        except JcpmError as exc:
            return [phix, math.nan, f"error:{exc}"]

    charge_rows = _map_points(charge_point, _charge_axis(opts.points),
                              opts.workers)
    flux_rows = _map_points(flux_point, _flux_axis(opts.points), opts.workers)
    return ExperimentResult("quality-factor", [
        ("charge", ["q_G1_e", "q_G2_e", "Q", "status"], charge_rows),
        ("flux", ["Phix_rad", "Q", "status"], flux_rows),
    ])


def _run_snr(device: DeviceParams, opts: ExperimentOptions) -> ExperimentResult:
    rep = snr_report(device)
    rows = [[rep.contrast * 1e3, rep.max_deviation * 1e6, rep.value, "ok"]]
    return ExperimentResult("snr", [(
        "", ["contrast_MHz", "max_noise_dev_kHz", "snr", "status"], rows)],
        stats={"snr": rep.value})


def _run_sensitivity(device: DeviceParams,
                     opts: ExperimentOptions) -> ExperimentResult:
    readout = opts.readout()
    axis = _charge_axis(opts.points)

    def point(q1):
        try:
            s = charge_sensitivity(device, _bias(q1, 1.0, opts.phi_x), readout)
            return [q1, 1.0, s, "ok"]
        except JcpmError as exc:
            return [q1, 1.0, math.nan, f"error:{exc}"]

    rows = _map_points(point, axis, opts.workers)
    return ExperimentResult("sensitivity", [(
        "", ["q_G1_e", "q_G2_e", "S_q_e_per_rtHz", "status"], rows)])


def _run_bandwidth(device: DeviceParams,
                   opts: ExperimentOptions) -> ExperimentResult:
    bias = _bias(0.5, 1.0, opts.phi_x)
    n_values = [10 ** (i / max(opts.points - 1, 1) * 2)
                for i in range(opts.points)]  # 1 .. 100, log spaced

    def point(n):
        readout = ReadoutParams.from_linear_mhz(opts.kappa_mhz, n_photons=n,
                                                eta=opts.eta)
        try:
            s = charge_sensitivity(device, bias, readout)
            bw = detection_bandwidth(device, bias, readout, opts.delta_q)
            return [n, s, bw, "ok"]
        except JcpmError as exc:
            return [n, math.nan, math.nan, f"error:{exc}"]

    rows = _map_points(point, n_values, opts.workers)
    return ExperimentResult("bandwidth", [(
        "", ["n_photons", "S_q_e_per_rtHz", "BW_Hz", "status"], rows)])


def _run_gate(device: DeviceParams, opts: ExperimentOptions) -> ExperimentResult:
    rep = snr_report(device)
    omega_r = cached_load(device, _bias(0.0, 1.0, opts.phi_x)).omega_r
    t = gate_time(opts.theta, rep.contrast)
    rows = []
    for quality in (1e4, 1e5):
        fid = gate_fidelity(opts.theta, t, omega_r, quality)
        rows.append([opts.theta, rep.contrast * 1e3, t * 1e9, quality, fid, "ok"])
    return ExperimentResult("gate", [(
        "", ["theta_rad", "contrast_MHz", "t_gate_ns", "quality", "fidelity",
             "status"], rows)])


def _run_potential_grid(device: DeviceParams,
                        opts: ExperimentOptions) -> ExperimentResult:
    grid = potential_grid(device, _bias(0.0, 0.0), n_points=opts.points)
    rows = []
    for i, p1 in enumerate(grid.phi1):
        for j, p2 in enumerate(grid.phi2):
            rows.append([p1, p2, grid.values[i, j], "ok"])
    minima_rows = [[p1, p2, u, "ok"] for (p1, p2, u) in grid.minima]
    return ExperimentResult("potential-grid", [
        ("", ["phi1_rad", "phi2_rad", "U_GHz", "status"], rows),
        ("minima", ["phi1_rad", "phi2_rad", "U_GHz", "status"], minima_rows),
    ])


def _run_yield(device: DeviceParams, opts: ExperimentOptions) -> ExperimentResult:
    spec = DisorderSpec(sigma_rel=opts.sigma, n_samples=opts.n_samples,
                        seed=opts.seed, criteria=YieldCriteria())
    report = yield_estimate(device, spec, workers=opts.workers)
    summary = [[spec.sigma_rel, spec.n_samples, spec.seed, report.n_pass,
                report.n_fail, report.n_error, report.yield_fraction,
                report.wilson_95[0], report.wilson_95[1], "ok"]]
    sample_rows = []
    for r in report.samples:
        sample_rows.append(list(r.factors) + [
            r.index, r.omega_q, r.modulation, int(r.omega_q_ok),
            int(r.modulation_ok), int(r.passed),
            "ok" if r.error is None else f"error:{r.error}"])
    return ExperimentResult("yield", [
        ("summary", ["sigma_rel", "n_samples", "seed", "n_pass", "n_fail",
                     "n_error", "yield_fraction", "wilson_lo", "wilson_hi",
                     "status"], summary),
        ("samples", ["f_EJ1", "f_EJ2", "f_EJalpha", "f_C1", "f_C2",
                     "f_Calpha", "index", "omega_q_GHz", "modulation",
                     "omega_q_ok", "modulation_ok", "passed", "status"],
         sample_rows),
    ], stats={"yield_fraction": report.yield_fraction})


def _run_consistency(device: DeviceParams,
                     opts: ExperimentOptions) -> ExperimentResult:
    """Parameter self-tests; any non-ok row makes the CLI exit nonzero."""
    checks: list[list] = []

    def record(name: str, value: float, lo: float, hi: float) -> None:
        ok = lo <= value <= hi
        checks.append([name, value, lo, hi, "ok" if ok else "fail"])

    f_qw = quarter_wave_frequency(device.line)
    record("quarter_wave_GHz", f_qw, 7.5 * 0.999, 7.5 * 1.001)
    record("charging_energy_GHz", charging_energy_ec(device), 20 * 0.98,
           20 * 1.02)
    contrast = parity_contrast(device)
    for tag, point in zip(("00", "0e", "e0", "ee"), parity_operating_points()):
        rep = frequency_derivatives(device, point)
        for name in ("q1", "q2", "phix"):
            record(f"sweet_spot_{tag}_{name}", abs(rep.grad[name]), 0.0,
                   1e-4 * contrast)
    return ExperimentResult("consistency-check", [(
        "", ["check", "value", "lo", "hi", "status"], checks)])


EXPERIMENTS: dict[str, Callable[[DeviceParams, ExperimentOptions],
                                ExperimentResult]] = {
    "sweep-charge": _run_charge_pull,
    "sweep-flux": _run_flux_pull,
    "qubit-spectrum": _run_qubit_spectrum,
    "matrix-elements": _run_matrix_elements,
    "g-over-delta": _run_g_over_delta,
    "kerr": _run_kerr,
    "quality-factor": _run_quality_factor,
    "snr": _run_snr,
    "sensitivity": _run_sensitivity,
    "bandwidth": _run_bandwidth,
    "gate": _run_gate,
    "potential-grid": _run_potential_grid,
    "yield": _run_yield,
    "consistency-check": _run_consistency,
}

# Figure id served by each experiment (the renderer's contract).
FIGURE_MAP = {
    "fig2": "sweep-charge",
    "fig3": "qubit-spectrum",
    "fig4": "g-over-delta",
    "fig5": "sweep-flux",
    "fig6": "quality-factor",
    "figA2": "matrix-elements",
    "figB1": "kerr",
    "figC1": "potential-grid",
    "figD1": "sensitivity",
}


def _format_cell(value) -> str:
    if isinstance(value, float):  # includes numpy floating scalars
        return repr(float(value))
    return str(value)


def _config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _write_csv(path: Path, columns: list[str], rows: list[list],
               header_lines: list[str]) -> None:
    with path.open("w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(v) for v in row])


def run_experiment(device: DeviceParams, name: str, out_dir: str | Path,
                   opts: ExperimentOptions | None = None,
                   config: dict | None = None) -> tuple[list[Path], bool]:
    """Run one named experiment; returns output paths and overall ok flag."""
    if name not in EXPERIMENTS:
        raise JcpmError(f"unknown experiment {name!r}; "
                        f"choose from {sorted(EXPERIMENTS)}")
    opts = opts or ExperimentOptions()
    cfg = config if config is not None else device_to_config(device)
    cfg_hash = _config_hash(cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    start = time.time()
    result = EXPERIMENTS[name](device, opts)
    wall = time.time() - start

    paths: list[Path] = []
    all_ok = True
    n_rows = 0
    n_bad = 0
    for suffix, columns, rows in result.tables:
        stem = name if not suffix else f"{name}_{suffix}"
        path = out / f"{stem}.csv"
        header = [f"tool: jcpm {__version__}", f"experiment: {name}",
                  f"config_hash: {cfg_hash}"]
        _write_csv(path, columns, rows, header)
        paths.append(path)
        status_col = columns.index("status")
        bad = sum(row[status_col] != "ok" for row in rows)
        n_rows += len(rows)
        n_bad += bad
        all_ok &= bad == 0
    result.stats.setdefault("rows", n_rows)
    result.stats.setdefault("rows_not_ok", n_bad)
    result.stats.setdefault("ncut_certified",
                            resolve_ncut(device, _bias(0.0, 1.0, opts.phi_x)))

    manifest = {
        "experiment": name,
        "tool_version": __version__,
        "config": cfg,
        "config_hash": cfg_hash,
        "options": {k: getattr(opts, k) for k in vars(opts)},
        "outputs": [p.name for p in paths],
        "stats": result.stats,
        "wall_time_s": wall,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
    }
    manifest_path = out / f"{name}_manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True)
                             + "\n")
    paths.append(manifest_path)
    return paths, all_ok
