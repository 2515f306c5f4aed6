"""Periodic 1D grids, model potentials and the discretized Hamiltonian.

All inner products in the package are weighted by the grid spacing,
``<u, v> = dx * sum(u * v)``, so discrete quantities approximate their
continuum integrals and stay comparable across resolutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import (
    LengthMismatch,
    NonPositiveLength,
    OddOrTinyNodeCount,
    TabulatedLengthMismatch,
)

__all__ = [
    "PeriodicGrid",
    "PotentialSpec",
    "HamiltonianOp",
    "build_grid",
    "eval_potential",
    "assemble_hamiltonian",
    "apply_hamiltonian",
    "load_tabulated",
    "minimum_image",
    "inner",
]


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform sampling ``x_i = i * L / n`` of the ring ``[0, L)``."""

    L: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.L) or self.L <= 0:
            raise NonPositiveLength(f"domain length must be positive, got {self.L}")
        if int(self.n) != self.n or self.n < 4 or self.n % 2:
            raise OddOrTinyNodeCount(f"node count must be even and >= 4, got {self.n}")

    @property
    def dx(self) -> float:
        return self.L / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n) * self.dx

    @property
    def wavenumbers(self) -> np.ndarray:
        """Signed wavenumbers ``G_m = 2 pi m / L`` in FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @property
    def frequencies(self) -> np.ndarray:
        """Signed integer frequency indices ``m`` in FFT order."""
        return np.rint(np.fft.fftfreq(self.n, d=1.0 / self.n)).astype(int)


def build_grid(L: float, n: int) -> PeriodicGrid:
    return PeriodicGrid(float(L), int(n))


def inner(u: np.ndarray, v: np.ndarray, grid: PeriodicGrid) -> float:
    """Weighted inner product ``dx * sum(u * v)``."""
    return grid.dx * float(np.dot(u, v))


def minimum_image(d: np.ndarray, L: float) -> np.ndarray:
    """Wrap displacements into ``[-L/2, L/2)``."""
    return np.mod(np.asarray(d, dtype=float) + 0.5 * L, L) - 0.5 * L


POTENTIAL_KINDS = ("free", "kronig_penney", "impurity_kronig_penney", "tabulated")


@dataclass(frozen=True)
class PotentialSpec:
    """Description of a model potential.

    Gaussian wells ``-V0 * exp(-(x - x_j)**2 / (2 delta**2))`` sit at
    ``centers`` (default ``10 * j`` for ``j = 1..Nel``); distances use the
    minimum-image convention so the field is periodic. The impurity variant
    multiplies the well at ``impurity_site`` (1-based, default: middle well)
    by ``impurity_factor``.
    """

    kind: str = "free"
    V0: float = 1.0
    delta: float = 3.0
    Nel: int = 5
    centers: Optional[Sequence[float]] = None
    impurity_site: Optional[int] = None
    impurity_factor: float = 2.0
    samples: Optional[Sequence[float]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in POTENTIAL_KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}; expected one of {POTENTIAL_KINDS}")
        if self.kind == "tabulated" and self.samples is None:
            raise ValueError("tabulated potential needs samples")
        if self.kind != "free" and self.kind != "tabulated":
            if self.delta <= 0:
                raise ValueError("well width delta must be positive")
            if len(self.well_centers()) != self.Nel:
                raise ValueError("number of centers must equal Nel")
        if self.kind == "impurity_kronig_penney" and not 1 <= self.site() <= self.Nel:
            raise ValueError(f"impurity site {self.site()} outside 1..{self.Nel}")

    def well_centers(self) -> np.ndarray:
        if self.centers is not None:
            return np.asarray(self.centers, dtype=float)
        return 10.0 * np.arange(1, self.Nel + 1)

    def site(self) -> int:
        return self.impurity_site if self.impurity_site is not None else (self.Nel + 1) // 2

    @classmethod
    def free(cls) -> "PotentialSpec":
        return cls(kind="free")

    @classmethod
    def kronig_penney(cls, V0=1.0, delta=3.0, Nel=5, centers=None) -> "PotentialSpec":
        return cls(kind="kronig_penney", V0=V0, delta=delta, Nel=Nel, centers=centers)

    @classmethod
    def impurity_kronig_penney(
        cls, V0=1.0, delta=3.0, Nel=5, centers=None, impurity_site=None, impurity_factor=2.0
    ) -> "PotentialSpec":
        return cls(
            kind="impurity_kronig_penney",
            V0=V0,
            delta=delta,
            Nel=Nel,
            centers=centers,
            impurity_site=impurity_site,
            impurity_factor=impurity_factor,
        )

    @classmethod
    def tabulated(cls, samples) -> "PotentialSpec":
        return cls(kind="tabulated", samples=tuple(float(s) for s in samples))


def load_tabulated(path) -> PotentialSpec:
    """Read a one-column decimal text file into a tabulated potential."""
    values = np.loadtxt(Path(path), dtype=float, ndmin=1)
    if values.ndim != 1:
        raise ValueError(f"{path}: expected a single column of numbers")
    return PotentialSpec.tabulated(values)


def eval_potential(spec: PotentialSpec, grid: PeriodicGrid) -> np.ndarray:
    """Sample ``V(x_i)`` on the grid nodes."""
    if spec.kind == "free":
        return np.zeros(grid.n)
    if spec.kind == "tabulated":
        values = np.asarray(spec.samples, dtype=float)
        if values.shape != (grid.n,):
            raise TabulatedLengthMismatch(
                f"tabulated potential has {values.size} samples, grid has {grid.n} nodes"
            )
        return values.copy()

    depth = np.full(spec.Nel, float(spec.V0))
    if spec.kind == "impurity_kronig_penney":
        depth[spec.site() - 1] *= spec.impurity_factor
    d = minimum_image(grid.nodes[:, None] - spec.well_centers()[None, :], grid.L)
    return -np.exp(-(d**2) / (2 * spec.delta**2)) @ depth


class HamiltonianOp:
    """Discretized ``-1/2 d^2/dx^2 + V`` on a periodic grid.

    ``stencil="fd"`` uses the 3-point central difference and keeps a sparse
    matrix; ``stencil="spectral"`` multiplies by ``G**2 / 2`` in Fourier space.
    Instances are treated as immutable once built.
    """

    def __init__(self, grid: PeriodicGrid, potential: np.ndarray, stencil: str = "fd"):
        potential = np.asarray(potential, dtype=float)
        if potential.shape != (grid.n,):
            raise LengthMismatch(f"potential has shape {potential.shape}, grid has {grid.n} nodes")
        if stencil not in ("fd", "spectral"):
            raise ValueError(f"unknown kinetic stencil {stencil!r}")
        self.grid = grid
        self.potential = potential
        self.potential.setflags(write=False)
        self.stencil = stencil
        self._kinetic_symbol = self._symbol()
        self.matrix = self._sparse() if stencil == "fd" else None

    def _symbol(self) -> np.ndarray:
        G = self.grid.wavenumbers
        if self.stencil == "spectral":
            return 0.5 * G**2
        dx = self.grid.dx
        return (1.0 - np.cos(G * dx)) / dx**2

    def _sparse(self) -> sp.csr_matrix:
        n, dx = self.grid.n, self.grid.dx
        off = np.full(n, -0.5 / dx**2)
        K = sp.diags([off[:-1], np.full(n, 1.0 / dx**2), off[:-1]], [-1, 0, 1], format="lil")
        K[0, n - 1] = -0.5 / dx**2
        K[n - 1, 0] = -0.5 / dx**2
        return (K + sp.diags(self.potential)).tocsr()

    @property
    def kinetic_symbol(self) -> np.ndarray:
        """Fourier multiplier of the kinetic part, in FFT order."""
        return self._kinetic_symbol

    @property
    def n(self) -> int:
        return self.grid.n

    def apply(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape[0] != self.n:
            raise LengthMismatch(f"field has {u.shape[0]} rows, grid has {self.n} nodes")
        if self.stencil == "fd":
            return self.matrix @ u
        sym = self._kinetic_symbol if u.ndim == 1 else self._kinetic_symbol[:, None]
        kin = np.fft.ifft(sym * np.fft.fft(u, axis=0), axis=0).real
        V = self.potential if u.ndim == 1 else self.potential[:, None]
        return kin + V * u

    __matmul__ = apply

    def dense(self) -> np.ndarray:
        if self.stencil == "fd":
            return self.matrix.toarray()
        return self.apply(np.eye(self.n))

    def min_potential(self) -> float:
        return float(self.potential.min())


def assemble_hamiltonian(grid: PeriodicGrid, potential: np.ndarray, stencil: str = "fd") -> HamiltonianOp:
    return HamiltonianOp(grid, potential, stencil)


def apply_hamiltonian(H: HamiltonianOp, u: np.ndarray) -> np.ndarray:
    return H.apply(u)
