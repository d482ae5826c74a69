"""Simulation library for a Josephson charge-parity meter: a charge-modulated
flux qubit terminating a quarter-wave superconducting resonator."""

__version__ = "0.1.0"

from .device import (BiasPoint, DeviceParams, GateParams, JunctionSet,
                     LineParams, SquidParams, charging_energy_ec,
                     quarter_wave_frequency)
from .hamiltonian import (ChargingMatrix, HilbertSpace, QubitHamiltonian,
                          build_charging_matrix, build_hamiltonian,
                          coupling_operators)
from .spectral import SpectrumResult, converged_spectrum, eigensolve
from .qubit import (CouplingReport, MatrixElements, jc_coupling,
                    matrix_elements, potential_grid, qubit_splitting)
from .resonator import (LoadResult, TerminationCurve, born_oppenheimer_curve,
                        compute_load, frequency_pull, loaded_frequency,
                        resonator_frequency, zero_point_phase)
from .metrics import (MeritReport, NoiseModel, ReadoutParams,
                      charge_sensitivity, detection_bandwidth,
                      derivative_engine, gate_fidelity, gate_time,
                      merit_report, parity_contrast, quality_factor, snr)
from .disorder import (DisorderSpec, YieldCriteria, YieldReport,
                       evaluate_device, sample_device, yield_estimate)

__all__ = [name for name in dir() if not name.startswith("_")]
