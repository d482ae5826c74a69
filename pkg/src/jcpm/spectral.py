"""Dense Hermitian eigensolver with truncation-convergence certification."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .device import BiasPoint, DeviceParams
from .errors import ConvergenceError
from .hamiltonian import HilbertSpace, QubitHamiltonian, build_hamiltonian

DEFAULT_NCUT = 10
MAX_NCUT = 24
DEFAULT_TOL = 1e-6
ORTHO_TOL = 1e-10
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class SpectrumResult:
    """Lowest-k eigenpairs with convergence metadata.

    Eigenvalues ascend; eigenvector columns are orthonormal with the phase
    fixed so the largest-magnitude component is real positive.
    ``conv_residual`` is the maximum relative eigenvalue change observed in
    the last ncut -> ncut+2 step (nan when no convergence loop ran).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    k_requested: int
    ncut_used: int
    converged: bool
    conv_residual: float

    @property
    def splitting(self) -> float:
        """E1 - E0 in GHz."""
        return float(self.eigenvalues[1] - self.eigenvalues[0])


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for col in range(out.shape[1]):
        idx = int(np.argmax(np.abs(out[:, col])))
        pivot = out[idx, col]
        if pivot != 0:
            out[:, col] *= np.conj(pivot) / abs(pivot)
    return out


def eigensolve(ham: QubitHamiltonian | np.ndarray, k: int,
               ncut_used: int | None = None) -> SpectrumResult:
    """Lowest k eigenpairs of a dense Hermitian matrix.

    Real-symmetric input (e.g. qubit phase at 0 or pi with psi = 0) is
    detected and solved in real arithmetic.  Orthonormality and residuals
    are verified; violations raise ConvergenceError with diagnostics.
    """
    if isinstance(ham, QubitHamiltonian):
        matrix = ham.matrix
        if ncut_used is None:
            ncut_used = ham.space.ncut
    else:
        matrix = np.asarray(ham)
    if ncut_used is None:
        ncut_used = -1
    dim = matrix.shape[0]
    if not 1 <= k <= dim:
        raise ValueError(f"k = {k} out of range for dim = {dim}")

    # Drop imaginary parts below Hermiticity tolerance (e.g. the 1e-16 residue
    # of exp(1j pi) at the flux sweet spot) so real symmetric solvers apply.
    scale = np.abs(matrix).max()
    work = matrix
    if (np.iscomplexobj(matrix) and scale > 0
            and np.abs(matrix.imag).max() <= 1e-12 * scale):
        work = matrix.real
    try:
        vals, vecs = sla.eigh(work, subset_by_index=(0, k - 1), check_finite=False)
    except sla.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition failed: {exc}") from exc
    vecs = _fix_phases(vecs.astype(complex))

    ortho_err = np.abs(vecs.conj().T @ vecs - np.eye(k)).max()
    if ortho_err >= ORTHO_TOL:
        raise ConvergenceError(f"eigenvector orthonormality violated: {ortho_err:.2e}")
    norm = np.abs(matrix).max()
    if norm > 0:
        residual = np.abs(matrix @ vecs - vecs * vals).max()
        if residual >= RESIDUAL_TOL * norm * dim:
            raise ConvergenceError(
                f"eigenpair residual {residual:.2e} exceeds {RESIDUAL_TOL:.0e}*|H|*dim")

    return SpectrumResult(eigenvalues=vals, eigenvectors=vecs, k_requested=k,
                          ncut_used=ncut_used, converged=True,
                          conv_residual=math.nan)


def _relative_change(new: np.ndarray, old: np.ndarray) -> float:
    scale = np.maximum(np.abs(new), 1.0)  # 1 GHz floor avoids zero crossings
    return float(np.max(np.abs(new - old) / scale))


def converged_spectrum(device: DeviceParams, bias: BiasPoint, k: int = 4,
                       tol: float = DEFAULT_TOL, psi: float = 0.0,
                       start_ncut: int = DEFAULT_NCUT,
                       max_ncut: int = MAX_NCUT) -> SpectrumResult:
    """Grow ncut in steps of two until the lowest k eigenvalues settle.

    A truncation is certified when enlarging it by two changes every
    eigenvalue by less than ``tol`` (relative, with a 1 GHz floor); the
    certified (smaller) truncation's eigenpairs are returned.  Raises
    ConvergenceError when max_ncut is hit first.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    prev: SpectrumResult | None = None
    ncut = start_ncut
    while ncut <= max_ncut:
        space = HilbertSpace(ncut=ncut)
        result = eigensolve(build_hamiltonian(device, bias, space, psi), k,
                            ncut_used=ncut)
        if prev is not None:
            residual = _relative_change(result.eigenvalues, prev.eigenvalues)
            if residual < tol:
                return SpectrumResult(
                    eigenvalues=prev.eigenvalues,
                    eigenvectors=prev.eigenvectors,
                    k_requested=k, ncut_used=prev.ncut_used, converged=True,
                    conv_residual=residual)
        prev = result
        ncut += 2
    raise ConvergenceError(
        f"spectrum not converged to tol={tol:g} for k={k} with ncut <= {max_ncut}")


def resolve_ncut(device: DeviceParams, bias: BiasPoint, k: int = 2,
                 tol: float = DEFAULT_TOL, psi: float = 0.0) -> int:
    """Truncation certified by converged_spectrum, for reuse across a
    derivative cluster or sweep (keeps the energy surface smooth in bias)."""
    return converged_spectrum(device, bias, k=k, tol=tol, psi=psi).ncut_used
