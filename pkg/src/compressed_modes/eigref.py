"""Reference spectra and spectral diagnostics.

Dense eigenpairs of the discretized Hamiltonian serve as the truth against
which compressed modes and compressed plane waves are judged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import GridMismatch, MTooLarge, UnnormalizedInput, ZeroDenominator
from .lattice import HamiltonianOp, PeriodicGrid, minimum_image

__all__ = [
    "EigenPairs",
    "reference_eigenpairs",
    "free_electron_eigenvalues",
    "projected_hamiltonian",
    "projected_spectrum",
    "relative_eigenvalue_error",
    "localization_spread",
]


@dataclass(frozen=True)
class EigenPairs:
    values: np.ndarray
    vectors: np.ndarray  # n x M, weighted-orthonormal columns

    def __len__(self):
        return self.values.size


def reference_eigenpairs(H: HamiltonianOp, M: int) -> EigenPairs:
    """Lowest ``M`` eigenpairs of ``H`` in ascending order.

    Eigenvectors are scaled to unit weighted norm and signed so that their
    largest-magnitude component is positive.
    """
    n = H.n
    if not 1 <= M <= n:
        raise MTooLarge(f"requested {M} eigenpairs from an operator of size {n}")
    A = H.dense()
    A = 0.5 * (A + A.T)
    values, vectors = scipy.linalg.eigh(A, subset_by_index=[0, M - 1])
    vectors = vectors / np.sqrt(H.grid.dx)
    peak = vectors[np.argmax(np.abs(vectors), axis=0), np.arange(M)]
    vectors = vectors * np.where(peak < 0, -1.0, 1.0)
    return EigenPairs(values, vectors)


def free_electron_eigenvalues(L: float, M: int) -> np.ndarray:
    """First ``M`` values of ``2 (pi k / L)**2`` over integer ``k``, ascending."""
    if M < 1:
        raise ValueError("M must be at least 1")
    k = np.arange(M)
    # 0, then each |k| >= 1 twice
    magnitude = (k + 1) // 2
    return 2.0 * (np.pi * magnitude / L) ** 2


def _columns(modes) -> tuple[np.ndarray, PeriodicGrid | None]:
    if hasattr(modes, "family_matrix"):
        return modes.family_matrix(), modes.grid
    if hasattr(modes, "modes") and hasattr(modes, "grid"):
        return np.asarray(modes.modes), modes.grid
    arr = np.asarray(modes, dtype=float)
    return (arr[:, None] if arr.ndim == 1 else arr), None


def projected_hamiltonian(modes, H: HamiltonianOp) -> np.ndarray:
    """Symmetrized matrix ``A_jk = <psi_j, H psi_k>`` for a set of columns.

    ``modes`` may be a ``ModeSet``, a ``BcpwSet`` (its full shifted family is
    used) or a plain ``n x N`` array on the grid of ``H``.
    """
    Psi, grid = _columns(modes)
    if grid is not None and (grid.n != H.grid.n or not np.isclose(grid.L, H.grid.L)):
        raise GridMismatch("modes and Hamiltonian live on different grids")
    if Psi.shape[0] != H.n:
        raise GridMismatch(f"modes have {Psi.shape[0]} rows, operator has {H.n}")
    A = H.grid.dx * Psi.T @ H.apply(Psi)
    return 0.5 * (A + A.T)


def projected_spectrum(modes, H: HamiltonianOp) -> np.ndarray:
    return np.linalg.eigvalsh(projected_hamiltonian(modes, H))


def relative_eigenvalue_error(sigma, lam, M: int) -> float:
    """``sum_i (sigma_i - lam_i)**2 / sum_i lam_i**2`` over the first ``M`` values."""
    sigma = np.asarray(sigma, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if sigma.size < M or lam.size < M:
        raise ValueError(f"need at least {M} values in both spectra")
    denom = float(np.sum(lam[:M] ** 2))
    if denom == 0.0:
        raise ZeroDenominator("reference eigenvalues vanish on the requested window")
    return float(np.sum((sigma[:M] - lam[:M]) ** 2) / denom)


def localization_spread(mode: np.ndarray, grid: PeriodicGrid, norm_tol: float = 1e-6) -> float:
    """Second moment of ``mode**2`` about its best cyclic center.

    Distances use the minimum-image convention, and the center is searched
    over the grid nodes.
    """
    mode = np.asarray(mode, dtype=float)
    if mode.shape != (grid.n,):
        raise GridMismatch(f"mode has shape {mode.shape}, grid has {grid.n} nodes")
    weight = grid.dx * mode**2
    if abs(weight.sum() - 1.0) > norm_tol:
        raise UnnormalizedInput(f"mode has weighted norm^2 {weight.sum():.6g}, expected 1")
    x = grid.nodes
    d = minimum_image(x[None, :] - x[:, None], grid.L)
    return float(np.min((d**2) @ weight))
