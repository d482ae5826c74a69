"""Monte Carlo fabrication-yield study over junction disorder.

Each virtual device draws independent multiplicative Gaussian factors for
the six qubit-junction parameters from a counter-based stream keyed by
(seed, sample index), so results are bit-reproducible and independent of
execution order or worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .device import BiasPoint, DeviceParams, JunctionSet
from .errors import JcpmError, ParameterError
from .resonator import compute_load
from .spectral import converged_spectrum


@dataclass(frozen=True)
class YieldCriteria:
    """Usability thresholds for a sampled device."""

    min_omega_q: float = 2.0  # GHz
    min_rel_inductance_modulation: float = 0.05


@dataclass(frozen=True)
class DisorderSpec:
    sigma_rel: float = 0.05
    n_samples: int = 1000
    seed: int = 1234
    criteria: YieldCriteria = YieldCriteria()

    def __post_init__(self) -> None:
        if not 0 <= self.sigma_rel < 0.5:
            raise ParameterError("sigma_rel must lie in [0, 0.5)")
        if self.n_samples < 1:
            raise ParameterError("n_samples must be at least 1")


@dataclass(frozen=True)
class SampleRecord:
    index: int
    factors: tuple[float, ...]  # multiplicative draws for the six parameters
    omega_q: float  # GHz, worst of the two parity biases (nan on error)
    modulation: float  # |dL|/L between parity states (nan on error)
    omega_q_ok: bool
    modulation_ok: bool
    passed: bool
    error: str | None = None


@dataclass(frozen=True)
class YieldReport:
    n_pass: int
    n_fail: int
    n_error: int
    yield_fraction: float
    wilson_95: tuple[float, float]
    samples: tuple[SampleRecord, ...]

    @property
    def n_samples(self) -> int:
        return self.n_pass + self.n_fail + self.n_error


def wilson_interval(successes: int, total: int, z: float = 1.959963984540054
                    ) -> tuple[float, float]:
    """Wilson score 95% confidence interval for a binomial proportion."""
    if total == 0:
        return (0.0, 1.0)
    p = successes / total
    denom = 1 + z**2 / total
    centre = (p + z**2 / (2 * total)) / denom
    half = z * math.sqrt(p * (1 - p) / total + z**2 / (4 * total**2)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


def _draw_factors(rng: np.random.Generator, sigma: float) -> tuple[float, ...]:
    factors = 1.0 + sigma * rng.standard_normal(6)
    for i in range(6):
        while factors[i] <= 0:
            factors[i] = 1.0 + sigma * rng.standard_normal()
    return tuple(float(f) for f in factors)


def _apply_factors(base: DeviceParams, factors: tuple[float, ...]) -> DeviceParams:
    j = base.junctions
    junctions = JunctionSet(
        EJ1=j.EJ1 * factors[0], EJ2=j.EJ2 * factors[1],
        EJalpha=j.EJalpha * factors[2],
        C1=j.C1 * factors[3], C2=j.C2 * factors[4],
        Calpha=j.Calpha * factors[5])
    return replace(base, junctions=junctions)


def sample_device(base: DeviceParams, spec: DisorderSpec,
                  sample_index: int) -> DeviceParams:
    """Virtual device with junction parameters perturbed by (1 + sigma z).

    The stream is keyed by (seed, sample_index); negative factors are
    rejected and redrawn one at a time, preserving determinism.
    """
    rng = np.random.default_rng((spec.seed, sample_index))
    return _apply_factors(base, _draw_factors(rng, spec.sigma_rel))


_PARITY_BIASES = (BiasPoint(ng1=0.0, ng2=0.5), BiasPoint(ng1=0.5, ng2=0.5))


@lru_cache(maxsize=4096)
def _parity_response(sampled: DeviceParams) -> tuple[float, float]:
    """(worst parity splitting, relative inductance modulation)."""
    splittings = []
    inductances = []
    for bias in _PARITY_BIASES:
        spec = converged_spectrum(sampled, bias, k=2)
        splittings.append(spec.splitting)
        load = compute_load(sampled, bias, ncut=spec.ncut_used)
        inductances.append(load.l_eff)
    l_a, l_b = inductances
    return min(splittings), abs(l_a - l_b) / (0.5 * (l_a + l_b))


def evaluate_device(sampled: DeviceParams,
                    criteria: YieldCriteria = YieldCriteria(),
                    index: int = 0,
                    factors: tuple[float, ...] = ()) -> SampleRecord:
    """Qubit splitting and parity inductance modulation at the nominal
    measurement configuration; convergence failures count as errors."""
    try:
        omega_q, modulation = _parity_response(sampled)
    except JcpmError as exc:
        return SampleRecord(index=index, factors=factors, omega_q=math.nan,
                            modulation=math.nan, omega_q_ok=False,
                            modulation_ok=False, passed=False, error=str(exc))
    omega_ok = omega_q > criteria.min_omega_q
    mod_ok = modulation > criteria.min_rel_inductance_modulation
    return SampleRecord(index=index, factors=factors, omega_q=omega_q,
                        modulation=modulation, omega_q_ok=omega_ok,
                        modulation_ok=mod_ok, passed=omega_ok and mod_ok)


def _run_sample(args: tuple[DeviceParams, DisorderSpec, int]) -> SampleRecord:
    base, spec, index = args
    rng = np.random.default_rng((spec.seed, index))
    factors = _draw_factors(rng, spec.sigma_rel)
    sampled = _apply_factors(base, factors)
    return evaluate_device(sampled, spec.criteria, index=index, factors=factors)


def yield_estimate(base: DeviceParams, spec: DisorderSpec,
                   workers: int = 1) -> YieldReport:
    """Run the ensemble and aggregate pass/fail statistics.

    Samples are independent; the record list is assembled in sample order,
    so the report does not depend on the worker count.
    """
    jobs = [(base, spec, i) for i in range(spec.n_samples)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_sample, jobs))
    else:
        records = [_run_sample(job) for job in jobs]
    records.sort(key=lambda r: r.index)
    n_pass = sum(r.passed for r in records)
    n_error = sum(r.error is not None for r in records)
    n_fail = len(records) - n_pass - n_error
    return YieldReport(
        n_pass=n_pass, n_fail=n_fail, n_error=n_error,
        yield_fraction=n_pass / len(records),
        wilson_95=wilson_interval(n_pass, len(records)),
        samples=tuple(records))
