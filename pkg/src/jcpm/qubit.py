"""Qubit-level observables: splitting, coupling matrix elements, the
junction potential landscape and the residual qubit-resonator coupling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .device import BiasPoint, DeviceParams
from .errors import ParameterError
from .hamiltonian import HilbertSpace, coupling_operators
from .resonator import LoadResult, cached_load
from .spectral import DEFAULT_TOL, converged_spectrum

DEGENERACY_FLOOR = 1e-9  # GHz


def qubit_splitting(device: DeviceParams, bias: BiasPoint,
                    tol: float = DEFAULT_TOL) -> float:
    """Level splitting E1 - E0 of the bare qubit in GHz.

    A splitting below 1e-9 GHz indicates a (numerically) degenerate ground
    space; the value is still returned, callers decide how to flag it.
    """
    return converged_spectrum(device, bias, k=2, tol=tol).splitting


@dataclass(frozen=True)
class MatrixElements:
    """sc/cc coupling matrix elements among the lowest k eigenstates."""

    sc: np.ndarray  # k x k complex
    cc: np.ndarray  # k x k complex
    eigenvalues: np.ndarray
    ncut_used: int


def matrix_elements(device: DeviceParams, bias: BiasPoint, k: int = 4,
                    tol: float = DEFAULT_TOL) -> MatrixElements:
    """<i|SC|j> and <i|CC|j> for the lowest k eigenstates.

    Eigenvector phases are fixed by the solver, so the elements are
    reproducible across runs.
    """
    if k < 2:
        raise ParameterError("matrix elements need k >= 2")
    spec = converged_spectrum(device, bias, k=k, tol=tol)
    space = HilbertSpace(ncut=spec.ncut_used)
    sc_op, cc_op = coupling_operators(device, space)
    v = spec.eigenvectors
    sc = v.conj().T @ sc_op @ v
    cc = v.conj().T @ cc_op @ v
    sc.setflags(write=False)
    cc.setflags(write=False)
    return MatrixElements(sc=sc, cc=cc, eigenvalues=spec.eigenvalues,
                          ncut_used=spec.ncut_used)


@dataclass(frozen=True)
class CouplingReport:
    """Jaynes-Cummings coupling of the lowest transition to the resonator."""

    omega_q: float  # GHz
    g_01: float  # GHz
    delta: float  # GHz, omega_q - omega_r
    g_over_delta: float  # inf marker when |delta| < 1e-6 GHz


def jc_coupling(device: DeviceParams, bias: BiasPoint,
                load: LoadResult | None = None) -> CouplingReport:
    """g_01 = (EJ1 + EJ2) psi_J |<0|SC|1>| versus the detuning to the
    loaded resonator."""
    if load is None:
        load = cached_load(device, bias)
    elems = matrix_elements(device, bias, k=2)
    j = device.junctions
    g01 = (j.EJ1 + j.EJ2) * load.psi_j * abs(elems.sc[0, 1])
    omega_q = float(elems.eigenvalues[1] - elems.eigenvalues[0])
    delta = omega_q - load.omega_r
    ratio = math.inf if abs(delta) < 1e-6 else g01 / delta
    return CouplingReport(omega_q=omega_q, g_01=g01, delta=delta,
                          g_over_delta=ratio)


def junction_potential(device: DeviceParams, bias: BiasPoint,
                       phi1: np.ndarray, phi2: np.ndarray) -> np.ndarray:
    """U = -EJ1 cos(phi1) - EJ2 cos(phi2) - EJa cos(phi2 - phi1 + phi_q), GHz."""
    j = device.junctions
    return (-j.EJ1 * np.cos(phi1) - j.EJ2 * np.cos(phi2)
            - j.EJalpha * np.cos(phi2 - phi1 + bias.qubit_phase))


@dataclass(frozen=True)
class PotentialGrid:
    """Sampled junction potential with refined local minima."""

    phi1: np.ndarray  # 1D axis
    phi2: np.ndarray  # 1D axis
    values: np.ndarray  # 2D, values[i, j] = U(phi1[i], phi2[j])
    minima: tuple[tuple[float, float, float], ...]  # (phi1, phi2, U)


def _refine_minimum(device: DeviceParams, bias: BiasPoint,
                    p1: float, p2: float) -> tuple[float, float, float]:
    """Newton refinement using the analytic gradient and Hessian of U."""
    j = device.junctions
    phq = bias.qubit_phase
    x = np.array([p1, p2])
    for _ in range(60):
        d = x[1] - x[0] + phq
        grad = np.array([
            j.EJ1 * math.sin(x[0]) - j.EJalpha * math.sin(d),
            j.EJ2 * math.sin(x[1]) + j.EJalpha * math.sin(d),
        ])
        hess = np.array([
            [j.EJ1 * math.cos(x[0]) + j.EJalpha * math.cos(d),
             -j.EJalpha * math.cos(d)],
            [-j.EJalpha * math.cos(d),
             j.EJ2 * math.cos(x[1]) + j.EJalpha * math.cos(d)],
        ])
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            break
        x = x - step
        if np.abs(step).max() < 1e-12:
            break
    u = float(junction_potential(device, bias, x[0], x[1]))
    return float(x[0]), float(x[1]), u


def potential_grid(device: DeviceParams, bias: BiasPoint,
                   n_points: int = 201,
                   span: tuple[float, float] = (-2 * math.pi, 2 * math.pi)
                   ) -> PotentialGrid:
    """Potential landscape on [span]^2 plus its refined local minima.

    Minima are located by comparing every interior grid point against its
    eight neighbours, then polished by Newton iteration; duplicates within
    1e-6 rad are merged.  The list is ordered by energy, ties broken by
    lowest phi1 + phi2, then phi1.
    """
    axis = np.linspace(span[0], span[1], n_points)
    p1, p2 = np.meshgrid(axis, axis, indexing="ij")
    values = junction_potential(device, bias, p1, p2)

    interior = values[1:-1, 1:-1]
    is_min = np.ones_like(interior, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == dj == 0:
                continue
            neighbour = values[1 + di:n_points - 1 + di,
                               1 + dj:n_points - 1 + dj]
            is_min &= interior <= neighbour
    candidates = np.argwhere(is_min) + 1

    minima: list[tuple[float, float, float]] = []
    for i, jdx in candidates:
        m = _refine_minimum(device, bias, axis[i], axis[jdx])
        if not (span[0] <= m[0] <= span[1] and span[0] <= m[1] <= span[1]):
            continue
        if any(abs(m[0] - q[0]) < 1e-6 and abs(m[1] - q[1]) < 1e-6
               for q in minima):
            continue
        minima.append(m)
    minima.sort(key=lambda m: (m[2], m[0] + m[1], m[0]))
    values.setflags(write=False)
    return PotentialGrid(phi1=axis, phi2=axis, values=values,
                         minima=tuple(minima))
