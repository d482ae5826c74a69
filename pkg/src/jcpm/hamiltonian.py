"""Two-island flux-qubit Hamiltonian in the truncated Cooper-pair charge basis.

Basis states are |n1, n2> with n_i in [-ncut, ncut]; the flattened index is
row-major in n1 then n2, i.e. idx = (n1 + ncut) * (2 ncut + 1) + (n2 + ncut).
The kinetic (charging) part is diagonal; each Josephson cosine is a sparse
integer charge shift:

    cos(phi_1 - psi)            -> (e^{-i psi} S1+ + h.c.) / 2
    cos(phi_2 - psi)            -> (e^{-i psi} S2+ + h.c.) / 2
    cos(phi_2 - phi_1 + phi_q)  -> (e^{+i phi_q} S1- S2+ + h.c.) / 2

with S+|n> = |n+1>.  Hamiltonian potential carries the opposite sign of the
circuit Lagrangian potential.  Within this basis a constant termination
phase psi is a pure gauge: the spectrum of ``build_hamiltonian`` is psi
independent, which the test suite checks explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .device import ELECTRON_CHARGE, PLANCK_H, BiasPoint, DeviceParams
from .errors import ParameterError

HERMITICITY_RTOL = 1e-12


@dataclass(frozen=True)
class HilbertSpace:
    """Charge-basis truncation: n in [-ncut, ncut] on each island.

    ncut = 1 (the smallest space holding one charge shift) is allowed for
    hand-checkable matrices; production truncations start at 10.
    """

    ncut: int

    def __post_init__(self) -> None:
        if self.ncut < 1:
            raise ParameterError(f"ncut must be >= 1, got {self.ncut}")

    @property
    def dim(self) -> int:
        return (2 * self.ncut + 1) ** 2

    def index(self, n1: int, n2: int) -> int:
        d = 2 * self.ncut + 1
        return (n1 + self.ncut) * d + (n2 + self.ncut)

    def charge_numbers(self) -> tuple[np.ndarray, np.ndarray]:
        """(n1, n2) values for every basis state, in enumeration order."""
        n = np.arange(-self.ncut, self.ncut + 1, dtype=float)
        d = 2 * self.ncut + 1
        return np.repeat(n, d), np.tile(n, d)


@dataclass(frozen=True)
class ChargingMatrix:
    """Island capacitance matrix and its energy-scaled inverse.

    ``cap`` is [[C1+Ca+CG, -Ca], [-Ca, C2+Ca+CG]] in farad; ``ekin`` is
    (2e)^2 cap^-1 / (2h) in GHz, so the charging Hamiltonian reads
    sum_ij ekin[i,j] (n_i + ng_i)(n_j + ng_j).
    """

    cap: np.ndarray
    ekin: np.ndarray


def build_charging_matrix(device: DeviceParams) -> ChargingMatrix:
    """Assemble and invert the 2x2 island capacitance matrix.

    Works for arbitrary (asymmetric) junction sets; raises ParameterError
    if the matrix is singular or not positive definite.
    """
    j = device.junctions
    cg = device.gates.CG
    cap = np.array([
        [j.C1 + j.Calpha + cg, -j.Calpha],
        [-j.Calpha, j.C2 + j.Calpha + cg],
    ])
    det = cap[0, 0] * cap[1, 1] - cap[0, 1] * cap[1, 0]
    if det <= 0 or cap[0, 0] <= 0:
        raise ParameterError("capacitance matrix is not positive definite")
    inv = np.array([[cap[1, 1], -cap[0, 1]], [-cap[1, 0], cap[0, 0]]]) / det
    ekin = (2 * ELECTRON_CHARGE) ** 2 * inv / (2 * PLANCK_H) / 1e9
    cap.setflags(write=False)
    ekin.setflags(write=False)
    return ChargingMatrix(cap=cap, ekin=ekin)


@dataclass(frozen=True)
class QubitHamiltonian:
    """Dense Hermitian matrix (GHz) plus the context it was built in."""

    matrix: np.ndarray
    space: HilbertSpace
    bias: BiasPoint
    psi: float


_REAL_PHASE_TOL = 1e-12


@dataclass(frozen=True)
class HamiltonianBlocks:
    """Decomposition H(psi) = diag + e^{-i psi} A + e^{+i psi} A^dag + B + B^dag.

    ``diag`` is the charging diagonal, ``A = shift_up`` (real) collects the
    two outer-junction up-shifts (the only psi-dependent part) and
    ``B = alpha_scale * alpha_pattern`` the alpha-junction cross shift.
    Enables frozen-state energies E(psi) = <v|H(psi)|v> in O(1) after one
    matrix-vector reduction.
    """

    diag: np.ndarray
    shift_up: np.ndarray  # A, real
    alpha_pattern: np.ndarray  # kron(S-, S+), real
    alpha_scale: complex  # -EJalpha/2 e^{i phi_q}
    space: HilbertSpace
    bias: BiasPoint

    def assemble(self, psi: float) -> np.ndarray:
        """Dense matrix; real symmetric whenever all phases are 0 mod pi."""
        phase = complex(math.cos(psi), -math.sin(psi))  # e^{-i psi}
        if (abs(phase.imag) < _REAL_PHASE_TOL
                and abs(self.alpha_scale.imag)
                < _REAL_PHASE_TOL * (abs(self.alpha_scale) + 1.0)):
            h = np.diag(self.diag)
            sym = phase.real * self.shift_up + self.alpha_scale.real * self.alpha_pattern
            h += sym + sym.T
            return h
        h = np.diag(self.diag).astype(complex)
        h += phase * self.shift_up
        h += np.conj(phase) * self.shift_up.T
        b = self.alpha_scale * self.alpha_pattern
        h += b
        h += b.conj().T
        return h

    def frozen_state_coeffs(self, state: np.ndarray) -> tuple[float, complex]:
        """(psi-independent part, up-shift expectation a) for a fixed state.

        <v|H(psi)|v> = c0 + 2 Re(e^{-i psi} a).  For an eigenstate of
        H(psi=0), a is real up to numerical noise.
        """
        v = np.asarray(state)
        c0 = float(np.real(v.conj() @ (self.diag * v)))
        c0 += 2.0 * float(np.real(
            self.alpha_scale * (v.conj() @ (self.alpha_pattern @ v))))
        a = complex(v.conj() @ (self.shift_up @ v))
        return c0, a


@lru_cache(maxsize=16)
def _shift_patterns(ncut: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(kron(S+, I), kron(I, S+), kron(S-, S+)); S+|n> = |n+1>."""
    d = 2 * ncut + 1
    s_up = np.eye(d, k=-1)
    ident = np.eye(d)
    up1 = np.kron(s_up, ident)
    up2 = np.kron(ident, s_up)
    cross = np.kron(s_up.T, s_up)
    for m in (up1, up2, cross):
        m.setflags(write=False)
    return up1, up2, cross


def build_blocks(device: DeviceParams, bias: BiasPoint,
                 space: HilbertSpace) -> HamiltonianBlocks:
    """Charging diagonal and shift blocks for the given device and bias."""
    cm = build_charging_matrix(device)
    n1, n2 = space.charge_numbers()
    x1 = n1 + bias.ng1
    x2 = n2 + bias.ng2
    diag = (cm.ekin[0, 0] * x1**2 + cm.ekin[1, 1] * x2**2
            + 2.0 * cm.ekin[0, 1] * x1 * x2)

    j = device.junctions
    up1, up2, cross = _shift_patterns(space.ncut)
    shift_up = -0.5 * j.EJ1 * up1 - 0.5 * j.EJ2 * up2
    alpha_scale = complex(-0.5 * j.EJalpha * np.exp(1j * bias.qubit_phase))
    diag.setflags(write=False)
    shift_up.setflags(write=False)
    return HamiltonianBlocks(diag=diag, shift_up=shift_up, alpha_pattern=cross,
                             alpha_scale=alpha_scale, space=space, bias=bias)


def assemble_hamiltonian(ekin: np.ndarray, ej: tuple[float, float, float],
                         bias: BiasPoint, space: HilbertSpace,
                         psi: float = 0.0) -> np.ndarray:
    """Low-level assembly from an explicit charging matrix (GHz) and energies.

    ``ej`` is (EJ1, EJ2, EJalpha).  Exposed separately so synthetic charging
    matrices can be tested against hand-enumerated matrices.
    """
    n1, n2 = space.charge_numbers()
    x1 = n1 + bias.ng1
    x2 = n2 + bias.ng2
    diag = ekin[0, 0] * x1**2 + ekin[1, 1] * x2**2 + 2.0 * ekin[0, 1] * x1 * x2
    up1, up2, cross = _shift_patterns(space.ncut)
    h = np.diag(diag).astype(complex)
    a = -0.5 * ej[0] * up1 - 0.5 * ej[1] * up2
    b = -0.5 * ej[2] * np.exp(1j * bias.qubit_phase) * cross
    h += np.exp(-1j * psi) * a + np.exp(1j * psi) * a.T
    h += b + b.conj().T
    return h


def build_hamiltonian(device: DeviceParams, bias: BiasPoint,
                      space: HilbertSpace, psi: float = 0.0) -> QubitHamiltonian:
    """Dense Hermitian flux-qubit Hamiltonian at fixed termination phase psi."""
    blocks = build_blocks(device, bias, space)
    h = blocks.assemble(psi)
    scale = np.abs(h).max()
    if scale > 0:
        herm_err = np.abs(h - h.conj().T).max() / scale
        if herm_err >= HERMITICITY_RTOL:
            raise ParameterError(f"assembled matrix not Hermitian: {herm_err:.2e}")
    h.setflags(write=False)
    return QubitHamiltonian(matrix=h, space=space, bias=bias, psi=psi)


def coupling_operators(device: DeviceParams,
                       space: HilbertSpace) -> tuple[np.ndarray, np.ndarray]:
    """Junction-weighted sine and cosine coupling operators (SC, CC).

    SC = (EJ1 sin phi_1 + EJ2 sin phi_2) / (EJ1 + EJ2) and likewise CC with
    cosines; for equal junctions these are sin(phi_+/2)cos(phi_-/2) and
    cos(phi_+/2)cos(phi_-/2).  Both Hermitian with operator norm <= 1.
    """
    j = device.junctions
    total = j.EJ1 + j.EJ2
    if total <= 0:
        raise ParameterError("coupling operators need EJ1 + EJ2 > 0")
    w1 = j.EJ1 / total
    w2 = j.EJ2 / total
    up1, up2, _ = _shift_patterns(space.ncut)
    cc = 0.5 * (w1 * (up1 + up1.T) + w2 * (up2 + up2.T)).astype(complex)
    sc = (w1 * (up1 - up1.T) + w2 * (up2 - up2.T)) / 2j
    cc.setflags(write=False)
    sc.setflags(write=False)
    return sc, cc
