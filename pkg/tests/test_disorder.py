import math

import numpy as np
import pytest

from jcpm import (DisorderSpec, JunctionSet, YieldCriteria,
                  evaluate_device, sample_device, yield_estimate)
from jcpm.disorder import wilson_interval
from jcpm.errors import ParameterError


def test_zero_sigma_returns_base(device):
    spec = DisorderSpec(sigma_rel=0.0, n_samples=5, seed=3)
    assert sample_device(device, spec, 0) == device


def test_sample_determinism_independent_of_order(device):
    spec = DisorderSpec(sigma_rel=0.05, n_samples=10, seed=99)
    forward = [sample_device(device, spec, i) for i in range(5)]
    backward = [sample_device(device, spec, i) for i in reversed(range(5))]
    assert forward == list(reversed(backward))
    again = [sample_device(device, spec, i) for i in range(5)]
    assert forward == again


def test_sampled_devices_distinct(device):
    spec = DisorderSpec(sigma_rel=0.05, n_samples=10, seed=5)
    a = sample_device(device, spec, 0)
    b = sample_device(device, spec, 1)
    assert a != b


def test_sample_mean_law_of_large_numbers(device):
    spec = DisorderSpec(sigma_rel=0.05, n_samples=10_000, seed=17)
    draws = np.array([sample_device(device, spec, i).junctions.EJ1
                      for i in range(10_000)])
    assert abs(draws.mean() / device.junctions.EJ1 - 1.0) < 0.01


def test_all_factors_positive_after_resampling(device):
    spec = DisorderSpec(sigma_rel=0.45, n_samples=200, seed=8)
    for i in range(200):
        j = sample_device(device, spec, i).junctions
        assert min(j.EJ1, j.EJ2, j.EJalpha, j.C1, j.C2, j.Calpha) > 0


def test_spec_validation():
    with pytest.raises(ParameterError):
        DisorderSpec(sigma_rel=0.6)
    with pytest.raises(ParameterError):
        DisorderSpec(n_samples=0)


def test_nominal_device_passes(device):
    record = evaluate_device(device)
    assert record.passed
    assert record.omega_q > 2.0
    assert record.modulation > 0.05


def test_no_alpha_junction_fails_modulation(device):
    junctions = JunctionSet(EJ1=200.0, EJ2=200.0, EJalpha=0.0,
                            C1=3.19e-16, C2=3.19e-16, Calpha=3.19e-16)
    dev = type(device)(junctions=junctions, squid=device.squid,
                       line=device.line, gates=device.gates)
    record = evaluate_device(dev)
    assert not record.modulation_ok
    assert not record.passed
    assert record.modulation < 0.05


def test_low_splitting_fails_regardless_of_modulation(device):
    record = evaluate_device(device, YieldCriteria(min_omega_q=1e6))
    assert record.modulation_ok
    assert not record.omega_q_ok
    assert not record.passed


def test_yield_zero_sigma_is_unity(device):
    spec = DisorderSpec(sigma_rel=0.0, n_samples=12, seed=1)
    report = yield_estimate(device, spec)
    assert report.yield_fraction == 1.0
    assert report.n_error == 0
    assert report.n_samples == 12


def test_yield_reproducible_across_worker_counts(device):
    spec = DisorderSpec(sigma_rel=0.08, n_samples=12, seed=21)
    serial = yield_estimate(device, spec, workers=1)
    parallel = yield_estimate(device, spec, workers=4)
    assert serial.samples == parallel.samples
    assert serial.yield_fraction == parallel.yield_fraction


def test_yield_monotone_in_sigma(device):
    n = 40
    fractions = [yield_estimate(device, DisorderSpec(sigma_rel=s, n_samples=n,
                                                     seed=12)).yield_fraction
                 for s in (0.0, 0.05, 0.10)]
    # statistical ordering with a CI allowance at this sample size
    slack = 0.15
    assert fractions[0] >= fractions[1] - slack
    assert fractions[1] >= fractions[2] - slack


def test_wilson_interval_reference():
    # independent arithmetic: p=0.75, n=80, z=1.96
    lo, hi = wilson_interval(60, 80)
    z = 1.959963984540054
    p, n = 0.75, 80
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    assert lo == pytest.approx(centre - half, rel=1e-12)
    assert hi == pytest.approx(centre + half, rel=1e-12)
    assert wilson_interval(0, 0) == (0.0, 1.0)
