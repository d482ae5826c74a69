"""Figures of merit built on finite-difference derivatives of omega_r(bias).

Bias derivatives are taken in experimental units: island charge q_i in
electron units (q_i = 2 ng_i) and total flux in flux quanta
(Phi = phi_x / 2 pi).  Every derivative cluster is evaluated at one fixed,
convergence-certified charge-basis truncation so the stencils see a smooth
energy surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .device import BiasPoint, DeviceParams
from .errors import ParameterError
from .resonator import resonator_frequency
from .spectral import resolve_ncut

CHARGE_STEP = 1e-3  # e
FLUX_STEP = 1e-4  # Phi0
Q_CAP = 1e12
# Hz per electron; physical slopes are MHz-scale, numerical noise sub-Hz.
SLOPE_FLOOR = 1e3
KAPPA_NOTE = "kappa is stored as an angular rate; kappa/2pi is the linear linewidth"

PARAM_NAMES = ("q1", "q2", "phix")


@dataclass(frozen=True)
class NoiseModel:
    """Quasi-static noise amplitudes: charge in e, flux in Phi0."""

    delta_q1: float = 1e-2
    delta_q2: float = 1e-2
    delta_phi: float = 1e-4

    def __post_init__(self) -> None:
        if min(self.delta_q1, self.delta_q2, self.delta_phi) < 0:
            raise ParameterError("noise amplitudes must be non-negative")

    def amplitude(self, name: str) -> float:
        return {"q1": self.delta_q1, "q2": self.delta_q2,
                "phix": self.delta_phi}[name]


@dataclass(frozen=True)
class ReadoutParams:
    """Homodyne readout: kappa in angular MHz (1e6 rad/s), mean photon
    number, and measurement efficiency."""

    kappa: float = 2 * math.pi * 10.0
    n_photons: float = 10.0
    eta: float = 1.0

    def __post_init__(self) -> None:
        if self.kappa <= 0 or self.n_photons <= 0:
            raise ParameterError("kappa and n_photons must be positive")
        if not 0 < self.eta <= 1:
            raise ParameterError("eta must be in (0, 1]")

    @classmethod
    def from_linear_mhz(cls, kappa_over_2pi_mhz: float, n_photons: float = 10.0,
                        eta: float = 1.0) -> "ReadoutParams":
        return cls(kappa=2 * math.pi * kappa_over_2pi_mhz,
                   n_photons=n_photons, eta=eta)

    @property
    def kappa_rad_per_s(self) -> float:
        return self.kappa * 1e6


def shifted_bias(bias: BiasPoint, dq1: float = 0.0, dq2: float = 0.0,
                 dphi: float = 0.0) -> BiasPoint:
    """Displace a bias point by charge steps in e and a flux step in Phi0."""
    return bias.replace(ng1=bias.ng1 + 0.5 * dq1, ng2=bias.ng2 + 0.5 * dq2,
                        phi_x=bias.phi_x + 2 * math.pi * dphi)


@dataclass(frozen=True)
class DerivativeReport:
    """Gradient and Hessian of a bias observable, units GHz per (e, e, Phi0)."""

    center: float
    grad: dict[str, float]
    hess: dict[tuple[str, str], float]


def derivative_engine(f: Callable[[BiasPoint], float], bias: BiasPoint,
                      which: Iterable[str] = PARAM_NAMES,
                      charge_step: float = CHARGE_STEP,
                      flux_step: float = FLUX_STEP) -> DerivativeReport:
    """Central-difference gradient and Hessian of f over the bias coordinates.

    Diagonal second derivatives reuse the gradient evaluations; mixed
    partials use the four-corner stencil.  Non-finite values raise.
    """
    names = [n for n in PARAM_NAMES if n in set(which)]
    steps = {"q1": charge_step, "q2": charge_step, "phix": flux_step}

    def at(**kw) -> float:
        value = f(shifted_bias(bias, **kw))
        if not math.isfinite(value):
            raise ParameterError(f"non-finite observable at displaced bias {kw}")
        return value

    kwname = {"q1": "dq1", "q2": "dq2", "phix": "dphi"}
    f0 = at()
    plus: dict[str, float] = {}
    minus: dict[str, float] = {}
    grad: dict[str, float] = {}
    hess: dict[tuple[str, str], float] = {}
    for n in names:
        h = steps[n]
        plus[n] = at(**{kwname[n]: +h})
        minus[n] = at(**{kwname[n]: -h})
        grad[n] = (plus[n] - minus[n]) / (2 * h)
        hess[(n, n)] = (plus[n] - 2 * f0 + minus[n]) / (h * h)
    for i, ni in enumerate(names):
        for nj in names[i + 1:]:
            hi, hj = steps[ni], steps[nj]
            fpp = at(**{kwname[ni]: +hi, kwname[nj]: +hj})
            fpm = at(**{kwname[ni]: +hi, kwname[nj]: -hj})
            fmp = at(**{kwname[ni]: -hi, kwname[nj]: +hj})
            fmm = at(**{kwname[ni]: -hi, kwname[nj]: -hj})
            hess[(ni, nj)] = (fpp - fpm - fmp + fmm) / (4 * hi * hj)
    return DerivativeReport(center=f0, grad=grad, hess=hess)


def pinned_frequency_fn(device: DeviceParams, bias: BiasPoint
                        ) -> Callable[[BiasPoint], float]:
    """omega_r(bias) at the truncation certified once at the given center."""
    ncut = resolve_ncut(device, bias, k=2)
    return lambda b: resonator_frequency(device, b, ncut=ncut)


def frequency_derivatives(device: DeviceParams, bias: BiasPoint,
                          which: Iterable[str] = PARAM_NAMES) -> DerivativeReport:
    return derivative_engine(pinned_frequency_fn(device, bias), bias, which=which)


def noise_deviation(report: DerivativeReport, noise: NoiseModel) -> float:
    """First- plus second-order frequency deviation, term-wise magnitudes (GHz)."""
    dev = sum(abs(g) * noise.amplitude(n) for n, g in report.grad.items())
    dev += sum(abs(h) * noise.amplitude(ni) * noise.amplitude(nj)
               for (ni, nj), h in report.hess.items())
    return dev


def quality_factor(device: DeviceParams, bias: BiasPoint,
                   noise: NoiseModel = NoiseModel()) -> float:
    """omega_r over its noise-induced deviation; capped at 1e12."""
    report = frequency_derivatives(device, bias)
    dev = noise_deviation(report, noise)
    if dev <= report.center / Q_CAP:
        return Q_CAP
    return report.center / dev


def parity_operating_points(phi_x: float = 2 * math.pi) -> tuple[BiasPoint, ...]:
    """The four charge-parity operating points (ng in {0, 1/2} on each island)."""
    return tuple(BiasPoint(ng1=a, ng2=b, phi_x=phi_x)
                 for a in (0.0, 0.5) for b in (0.0, 0.5))


def parity_contrast(device: DeviceParams, ng2: float = 0.5,
                    phi_x: float = 2 * math.pi) -> float:
    """|omega_r(ng1=0) - omega_r(ng1=1/2)| at fixed second-island bias (GHz)."""
    a = BiasPoint(ng1=0.0, ng2=ng2, phi_x=phi_x)
    b = BiasPoint(ng1=0.5, ng2=ng2, phi_x=phi_x)
    return abs(resonator_frequency(device, a) - resonator_frequency(device, b))


@dataclass(frozen=True)
class SnrReport:
    value: float
    contrast: float  # GHz
    max_deviation: float  # GHz
    deviations: tuple[float, ...] = field(default=())


def snr_report(device: DeviceParams, noise: NoiseModel = NoiseModel()) -> SnrReport:
    """Parity-signal-to-noise: readout contrast over the worst operating-point
    frequency deviation under the noise model."""
    contrast = parity_contrast(device)
    devs = tuple(noise_deviation(frequency_derivatives(device, p), noise)
                 for p in parity_operating_points())
    max_dev = max(devs)
    if contrast == 0:
        value = 0.0
    elif max_dev <= contrast / Q_CAP:
        value = Q_CAP
    else:
        value = contrast / max_dev
    return SnrReport(value=value, contrast=contrast, max_deviation=max_dev,
                     deviations=devs)


def snr(device: DeviceParams, noise: NoiseModel = NoiseModel()) -> float:
    return snr_report(device, noise).value


def gate_time(theta: float, contrast_ghz: float) -> float:
    """Phase-accumulation time t = theta / (2 pi contrast) in seconds."""
    if theta == 0:
        return 0.0
    if contrast_ghz <= 0:
        raise ParameterError("contrast must be positive")
    return theta / (2 * math.pi * contrast_ghz * 1e9)


def gate_fidelity(theta: float, t_gate: float, omega_r_ghz: float,
                  quality: float) -> float:
    """F = 1 - (omega_r t / Q)^2 / 4 with angular omega_r, floored at 0.

    ``theta`` names the intended gate; the error model depends only on the
    accumulated resonator phase.
    """
    del theta
    if quality <= 0:
        raise ParameterError("quality factor must be positive")
    delta_theta = 2 * math.pi * omega_r_ghz * 1e9 * t_gate / quality
    return max(0.0, 1.0 - 0.25 * delta_theta**2)


def _charge_slope_hz(device: DeviceParams, bias: BiasPoint) -> float:
    """d(omega_r)/d(q1) in Hz per electron (linear-frequency slope)."""
    report = frequency_derivatives(device, bias, which=("q1",))
    return report.grad["q1"] * 1e9


def charge_sensitivity(device: DeviceParams, bias: BiasPoint,
                       readout: ReadoutParams = ReadoutParams()) -> float:
    """Dynamical charge sensitivity sqrt(kappa/n)/(dω_r/dq)/sqrt(eta), e/rtHz.

    The slope is the linear-frequency derivative (Hz/e); together with the
    angular kappa this reproduces the reference sensitivity scale (the
    2 pi bookkeeping of homodyne phase detection is conventional, see the
    package docs).  Returns inf at charge sweet spots.
    """
    slope = abs(_charge_slope_hz(device, bias))
    if slope < SLOPE_FLOOR:
        return math.inf
    return (math.sqrt(readout.kappa_rad_per_s / readout.n_photons) / slope
            / math.sqrt(readout.eta))


def detection_bandwidth(device: DeviceParams, bias: BiasPoint,
                        readout: ReadoutParams = ReadoutParams(),
                        delta_q: float = 1e-6) -> float:
    """BW = eta (n/kappa) (d omega_r/dq)^2 delta_q^2 in Hz.

    Shares the slope and kappa conventions of charge_sensitivity, so the
    identity S_q^2 BW = delta_q^2 holds exactly at eta = 1.
    """
    if delta_q < 0:
        raise ParameterError("delta_q must be non-negative")
    slope = abs(_charge_slope_hz(device, bias))
    if slope < SLOPE_FLOOR:
        return 0.0
    return (readout.eta * readout.n_photons / readout.kappa_rad_per_s
            * slope**2 * delta_q**2)


@dataclass(frozen=True)
class MeritReport:
    """Summary of the device figures of merit at the measurement config."""

    q_factor: float
    snr: float
    s_q: float  # e/rtHz
    bandwidth: float  # Hz
    t_gate: float  # s
    fidelity: float
    contrast_ghz: float
    kappa_note: str = KAPPA_NOTE


def merit_report(device: DeviceParams, noise: NoiseModel = NoiseModel(),
                 readout: ReadoutParams = ReadoutParams(),
                 theta: float = math.pi / 8) -> MeritReport:
    """Figures of merit at the parity-measurement configuration.

    Q is the worst over the four operating points; charge sensitivity and
    bandwidth are evaluated at the maximum-contrast bias q1 = 0.5 e.
    """
    s = snr_report(device, noise)
    q = min(quality_factor(device, p, noise) for p in parity_operating_points())
    t = gate_time(theta, s.contrast)
    fid = gate_fidelity(theta, t, resonator_frequency(device, BiasPoint(ng2=0.5)), q)
    slope_bias = BiasPoint(ng1=0.25, ng2=0.5)
    return MeritReport(
        q_factor=q, snr=s.value,
        s_q=charge_sensitivity(device, slope_bias, readout),
        bandwidth=detection_bandwidth(device, slope_bias, readout),
        t_gate=t, fidelity=fid, contrast_ghz=s.contrast)
