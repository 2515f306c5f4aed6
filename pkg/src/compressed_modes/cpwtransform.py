"""Fast analysis and synthesis in the compressed plane wave family.

Both directions cost one FFT of the field plus one length-``N0`` FFT per
level. The forward map folds ``conj(psi_m) f_m`` onto the ``N0`` residue
classes and the inverse map unfolds per-class sums back onto the full
spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cpwbuilder import BcpwSet, to_coeffs, to_samples
from .errors import EmptyWindow, GridMismatch, KTooLarge, ShapeMismatch
from .lattice import PeriodicGrid

__all__ = [
    "CpwCoeffs",
    "Window",
    "cpw_forward",
    "cpw_inverse",
    "windowed_forward",
    "windowed_inverse",
    "active_members",
    "topk_error",
    "fourier_basis",
    "fourier_topk_error",
]


@dataclass
class CpwCoeffs:
    """Coefficients ``f^n_j`` stored as a ``levels x N0`` array.

    ``mask`` marks which entries were computed; a windowed forward transform
    leaves entries for members that miss the window unset (zero, masked out).
    """

    values: np.ndarray
    L: float
    w: float
    mask: np.ndarray | None = None

    @property
    def N0(self) -> int:
        return self.values.shape[1]

    @property
    def levels(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Window:
    """Cyclic run of ``length`` nodes starting at node ``start``."""

    start: int
    length: int

    def indices(self, n: int) -> np.ndarray:
        if not 1 <= self.length <= n:
            raise EmptyWindow(f"window length {self.length} outside 1..{n}")
        return (self.start + np.arange(self.length)) % n

    @classmethod
    def covering(cls, mask: np.ndarray) -> "Window":
        """Smallest cyclic window containing every ``True`` entry of ``mask``."""
        idx = np.nonzero(mask)[0]
        if idx.size == 0:
            raise EmptyWindow("mask selects no nodes")
        n = mask.size
        # the largest cyclic gap between selected nodes lies outside the window
        gaps = np.diff(np.concatenate([idx, [idx[0] + n]]))
        g = int(np.argmax(gaps))
        start = idx[(g + 1) % idx.size]
        return cls(int(start), int(n - gaps[g] + 1))


def _check_field(f: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.n,):
        raise GridMismatch(f"field has shape {f.shape}, basis grid has {grid.n} nodes")
    return f


def cpw_forward(f: np.ndarray, basis: BcpwSet) -> CpwCoeffs:
    """Coefficients ``<f, b^n_j>`` for every level and shift."""
    f = _check_field(f, basis.grid)
    F = to_coeffs(f, basis.grid)
    zeta = basis.lattice.fold(basis.coeffs.conj() * F[None, :])  # levels x N0
    values = (basis.N0 * np.fft.ifft(zeta, axis=1)).real
    return CpwCoeffs(values, basis.grid.L, basis.w)


def cpw_inverse(c: CpwCoeffs, basis: BcpwSet) -> np.ndarray:
    """Synthesis ``sum_{n,j} f^n_j psi^n(x - j w)``."""
    values = np.asarray(c.values if isinstance(c, CpwCoeffs) else c, dtype=float)
    if values.shape != (basis.levels, basis.N0):
        raise ShapeMismatch(f"coefficients have shape {values.shape}, basis needs {(basis.levels, basis.N0)}")
    per_class = np.fft.fft(values, axis=1)  # levels x N0
    residue = basis.lattice.residue
    spectrum = np.sum(basis.coeffs * per_class[:, residue], axis=0)
    return to_samples(spectrum, basis.grid)


def active_members(basis: BcpwSet, win: Window) -> np.ndarray:
    """``levels x N0`` mask of members with a sample above threshold inside ``win``."""
    idx = win.indices(basis.grid.n)
    return basis.support_masks()[:, :, idx].any(axis=2)


def windowed_inverse(c: CpwCoeffs, basis: BcpwSet, win: Window) -> np.ndarray:
    """Samples of the synthesis on the window nodes, from active members only."""
    values = np.asarray(c.values if isinstance(c, CpwCoeffs) else c, dtype=float)
    if values.shape != (basis.levels, basis.N0):
        raise ShapeMismatch(f"coefficients have shape {values.shape}, basis needs {(basis.levels, basis.N0)}")
    idx = win.indices(basis.grid.n)
    active = active_members(basis, win)
    fam = basis.family()
    return values[active] @ fam[active][:, idx]


def windowed_forward(f_window: np.ndarray, basis: BcpwSet, win: Window) -> CpwCoeffs:
    """Coefficients of a field supported in ``win`` against the members that touch it.

    ``f_window`` holds the samples on the window nodes in window order.
    Entries for members that miss the window are zero and masked out.
    """
    idx = win.indices(basis.grid.n)
    f_window = np.asarray(f_window, dtype=float)
    if f_window.shape != idx.shape:
        raise ShapeMismatch(f"window field has shape {f_window.shape}, window has {idx.size} nodes")
    active = active_members(basis, win)
    fam = basis.family()
    values = np.zeros((basis.levels, basis.N0))
    values[active] = basis.grid.dx * fam[active][:, idx] @ f_window
    return CpwCoeffs(values, basis.grid.L, basis.w, mask=active)


def fourier_basis(grid: PeriodicGrid) -> np.ndarray:
    """Real orthonormal Fourier modes as columns (weighted norm), lowest ``|m|`` first."""
    n, L = grid.n, grid.L
    x = grid.nodes
    cols = [np.full(n, 1.0 / np.sqrt(L))]
    for m in range(1, n // 2):
        G = 2 * np.pi * m / L
        cols.append(np.sqrt(2.0 / L) * np.cos(G * x))
        cols.append(np.sqrt(2.0 / L) * np.sin(G * x))
    cols.append(np.cos(np.pi * n * x / L) / np.sqrt(L))
    return np.array(cols).T


def _keep_topk(coef: np.ndarray, K: int) -> np.ndarray:
    # stable sort keeps the lower flat index first among equal magnitudes
    order = np.argsort(-np.abs(coef), kind="stable")
    kept = np.zeros_like(coef)
    kept[order[:K]] = coef[order[:K]]
    return kept


def topk_error(f: np.ndarray, basis, K: int, grid: PeriodicGrid | None = None) -> float:
    """Weighted L2 error after keeping the ``K`` largest-magnitude coefficients.

    ``basis`` is a :class:`BcpwSet` or the string ``"fourier"``; the Fourier
    case needs ``grid``. Ties are broken toward lower (level, shift) index.
    """
    if isinstance(basis, str):
        if basis != "fourier":
            raise ValueError(f"unknown basis {basis!r}")
        if grid is None:
            raise ValueError("the Fourier basis needs a grid")
        return fourier_topk_error(f, grid, K)
    f = _check_field(f, basis.grid)
    if K < 1:
        raise ValueError("K must be at least 1")
    if K > basis.size:
        raise KTooLarge(f"K={K} exceeds the family size {basis.size}")
    c = cpw_forward(f, basis).values
    kept = _keep_topk(c.ravel(), K).reshape(c.shape)
    r = f - cpw_inverse(CpwCoeffs(kept, basis.grid.L, basis.w), basis)
    return float(np.sqrt(basis.grid.dx * np.sum(r**2)))


def fourier_topk_error(f: np.ndarray, grid: PeriodicGrid, K: int) -> float:
    """Top-``K`` error in the real orthonormal Fourier basis on ``grid``."""
    f = _check_field(f, grid)
    if K < 1:
        raise ValueError("K must be at least 1")
    if K > grid.n:
        raise KTooLarge(f"K={K} exceeds the basis size {grid.n}")
    Phi = fourier_basis(grid)
    c = grid.dx * Phi.T @ f
    kept = _keep_topk(c, K)
    r = f - Phi @ kept
    return float(np.sqrt(grid.dx * np.sum(r**2)))
