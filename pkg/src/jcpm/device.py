"""Device parameters, physical constants and unit conventions.

All Josephson and charging energies are stored as linear frequencies
(GHz, i.e. E/h), capacitances in farad, lengths in meter.  External flux
is a dimensionless phase (radians, 2*pi per flux quantum) and island gate
charge is an offset in Cooper-pair units (ng = q_G/2 for q_G in electron
units).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from pathlib import Path

from .errors import ParameterError

# CODATA 2018 exact values
ELECTRON_CHARGE = 1.602176634e-19  # C
PLANCK_H = 6.62607015e-34  # J s
HBAR = PLANCK_H / (2 * math.pi)
FLUX_QUANTUM = PLANCK_H / (2 * ELECTRON_CHARGE)  # Wb, = 2.067833848e-15

# Relative tolerance for treating junction pairs as identical.
_SYM_RTOL = 1e-12


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise ParameterError(f"{name} must be positive, got {value!r}")


def _check_nonnegative(**values: float) -> None:
    for name, value in values.items():
        if value < 0:
            raise ParameterError(f"{name} must be non-negative, got {value!r}")


@dataclass(frozen=True)
class JunctionSet:
    """The three qubit junctions: two outer ones and the central alpha junction.

    Energies in GHz, capacitances in farad.  Zero Josephson energy or zero
    alpha capacitance is allowed so limiting cases (decoupled islands, pure
    SQUID termination) remain constructible.
    """

    EJ1: float
    EJ2: float
    EJalpha: float
    C1: float
    C2: float
    Calpha: float

    def __post_init__(self) -> None:
        _check_nonnegative(EJ1=self.EJ1, EJ2=self.EJ2, EJalpha=self.EJalpha,
                           Calpha=self.Calpha)
        _check_positive(C1=self.C1, C2=self.C2)

    @classmethod
    def symmetric(cls, EJq: float, Cq: float, alpha: float) -> "JunctionSet":
        """Symmetric set: EJ1 = EJ2 = EJq, EJalpha = alpha*EJq, same for C."""
        return cls(EJ1=EJq, EJ2=EJq, EJalpha=alpha * EJq,
                   C1=Cq, C2=Cq, Calpha=alpha * Cq)

    @property
    def is_symmetric(self) -> bool:
        return (math.isclose(self.EJ1, self.EJ2, rel_tol=_SYM_RTOL)
                and math.isclose(self.C1, self.C2, rel_tol=_SYM_RTOL))

    @property
    def alpha(self) -> float:
        """Capacitance ratio Calpha/C1 of the central junction (symmetric sets)."""
        if not self.is_symmetric:
            raise ParameterError("alpha is only defined for a symmetric junction set")
        return self.Calpha / self.C1


@dataclass(frozen=True)
class SquidParams:
    """Parameters of one SQUID junction (the loop holds two equal ones)."""

    EJs: float  # GHz
    CS: float  # F

    def __post_init__(self) -> None:
        _check_positive(EJs=self.EJs)
        _check_nonnegative(CS=self.CS)


@dataclass(frozen=True)
class LineParams:
    """Transmission-line constants of the quarter-wave resonator."""

    C0: float  # F/m
    L0: float  # H/m
    length: float  # m

    def __post_init__(self) -> None:
        _check_positive(C0=self.C0, L0=self.L0, length=self.length)

    @property
    def velocity(self) -> float:
        """Phase velocity 1/sqrt(L0*C0) in m/s."""
        return 1.0 / math.sqrt(self.L0 * self.C0)

    @property
    def impedance(self) -> float:
        """Characteristic impedance sqrt(L0/C0) in ohm."""
        return math.sqrt(self.L0 / self.C0)

    @property
    def total_inductance(self) -> float:
        """L0 * length in henry."""
        return self.L0 * self.length


@dataclass(frozen=True)
class GateParams:
    """Gate capacitance per island (both islands carry the same value)."""

    CG: float  # F

    def __post_init__(self) -> None:
        _check_nonnegative(CG=self.CG)


@dataclass(frozen=True)
class DeviceParams:
    """Complete parameter record for one charge-parity-meter instance."""

    junctions: JunctionSet
    squid: SquidParams
    line: LineParams
    gates: GateParams

    @classmethod
    def default(cls) -> "DeviceParams":
        """Reference design: 7.5 GHz unloaded line, 200 GHz qubit junctions,
        350 GHz SQUID junctions, 20 GHz island charging energy."""
        cq = 3.19e-16
        return cls(
            junctions=JunctionSet.symmetric(EJq=200.0, Cq=cq, alpha=1.0),
            squid=SquidParams(EJs=350.0, CS=5.17e-17),
            line=LineParams(C0=1.11e-10, L0=2.78e-7, length=6e-3),
            gates=GateParams(CG=0.01 * cq),
        )

    @property
    def gamma(self) -> float:
        """Gate-to-junction capacitance ratio CG/C1."""
        return self.gates.CG / self.junctions.C1


@dataclass(frozen=True)
class BiasPoint:
    """External control coordinates.

    ng1, ng2 are island offset charges in Cooper-pair units (2e-periodic,
    so period 1 in ng).  phi_x is the total external flux as a phase in
    radians.  phi_q, when given, overrides the default equal flux split
    phi_s = phi_q = phi_x/2.
    """

    ng1: float = 0.0
    ng2: float = 0.0
    phi_x: float = 2 * math.pi
    phi_q: float | None = None

    @property
    def qubit_phase(self) -> float:
        """Flux phase threading the qubit loop."""
        return 0.5 * self.phi_x if self.phi_q is None else self.phi_q

    @property
    def squid_phase(self) -> float:
        """Flux phase threading the SQUID loop (remainder of the split)."""
        return self.phi_x - self.qubit_phase

    def replace(self, **kw) -> "BiasPoint":
        d = {"ng1": self.ng1, "ng2": self.ng2, "phi_x": self.phi_x, "phi_q": self.phi_q}
        d.update(kw)
        return BiasPoint(**d)


def charging_energy_ec(device: DeviceParams) -> float:
    """Island charging energy EC = e^2/(2 Cq (1+2 alpha)) in GHz.

    Only defined for symmetric junction sets; asymmetric devices must use
    the full capacitance matrix instead.
    """
    j = device.junctions
    if not j.is_symmetric:
        raise ParameterError(
            "charging energy scale requires a symmetric junction set; "
            "use build_charging_matrix for the general case")
    c_sigma = j.C1 * (1.0 + 2.0 * j.alpha)
    return ELECTRON_CHARGE**2 / (2.0 * c_sigma) / PLANCK_H / 1e9


def quarter_wave_frequency(line: LineParams) -> float:
    """Unloaded quarter-wave resonance v/(4 l) in GHz."""
    return line.velocity / (4.0 * line.length) / 1e9


# --- structured config ------------------------------------------------

def device_to_config(device: DeviceParams, bias: BiasPoint | None = None) -> dict:
    """Nested key-value representation (sections: junctions/squid/line/gates/bias)."""
    cfg = {
        "junctions": asdict(device.junctions),
        "squid": asdict(device.squid),
        "line": {"C0": device.line.C0, "L0": device.line.L0,
                 "length": device.line.length},
        "gates": asdict(device.gates),
    }
    if bias is not None:
        cfg["bias"] = asdict(bias)
    return cfg


def device_from_config(cfg: dict) -> tuple[DeviceParams, BiasPoint]:
    """Inverse of :func:`device_to_config`; missing sections fall back to defaults."""
    default = DeviceParams.default()
    try:
        junctions = (JunctionSet(**cfg["junctions"]) if "junctions" in cfg
                     else default.junctions)
        squid = SquidParams(**cfg["squid"]) if "squid" in cfg else default.squid
        line = LineParams(**cfg["line"]) if "line" in cfg else default.line
        gates = GateParams(**cfg["gates"]) if "gates" in cfg else default.gates
        bias = BiasPoint(**cfg.get("bias", {}))
    except TypeError as exc:
        raise ParameterError(f"bad config field: {exc}") from exc
    return DeviceParams(junctions=junctions, squid=squid, line=line, gates=gates), bias


def load_config(path: str | Path) -> tuple[DeviceParams, BiasPoint]:
    """Read a JSON config file; unknown keys and bad values raise ParameterError."""
    try:
        cfg = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ParameterError(f"config {path} must contain a JSON object")
    known = {"junctions", "squid", "line", "gates", "bias"}
    unknown = set(cfg) - known
    if unknown:
        raise ParameterError(f"config {path}: unknown sections {sorted(unknown)}")
    return device_from_config(cfg)


def write_default_config(path: str | Path) -> None:
    cfg = device_to_config(DeviceParams.default(), BiasPoint())
    Path(path).write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n")
