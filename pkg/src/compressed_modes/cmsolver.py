"""Compressed modes via split Bregman iteration with orthogonality splitting.

The discrete problem is

    min_Psi  (1/mu) |Psi|_1 + sum_j <psi_j, H psi_j>   s.t.  dx * Psi^T Psi = I

with weighted norms (see :mod:`compressed_modes.lattice`). It is split into
``Q = Psi`` (handled by soft thresholding) and ``P = Psi`` (handled by the
closest orthonormal matrix), joined by Bregman variables ``b`` and ``B``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    IndefiniteSystem,
    InnerSolverStall,
    MaxIterExceeded,
    NegativeThreshold,
    RankDeficient,
    SupportExceedsDomain,
    SweepDivergence,
    ZeroModeCollapse,
)
from .lattice import HamiltonianOp, PeriodicGrid

log = logging.getLogger(__name__)

__all__ = [
    "ModeSet",
    "SocState",
    "SolveOptions",
    "ClosedFormMode",
    "shrink",
    "orthonormal_projection",
    "banded_orthonormalize",
    "banded_residual",
    "psi_update",
    "solve_cm",
    "closed_form_psi1",
    "closed_form_multiplier",
    "mu_from_unweighted",
    "canonicalize_signs",
    "default_penalties",
    "circular_centroid",
    "support_measure",
]


@dataclass
class ModeSet:
    """``N`` weighted-orthonormal modes stored as columns of an ``n x N`` array."""

    grid: PeriodicGrid
    modes: np.ndarray
    mu: float
    objective: float
    converged: bool = True
    iterations: int = 0
    state: Optional["SocState"] = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.modes.shape[1]

    def gram(self) -> np.ndarray:
        return self.grid.dx * self.modes.T @ self.modes

    def orthonormality_residual(self) -> float:
        return float(np.max(np.abs(self.gram() - np.eye(self.N))))

    def rayleigh_quotients(self, H: HamiltonianOp) -> np.ndarray:
        return self.grid.dx * np.sum(self.modes * H.apply(self.modes), axis=0)


@dataclass
class SocState:
    """Complete iterate of the splitting scheme, enough to resume a solve."""

    Psi: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    b: np.ndarray
    B: np.ndarray
    lambda_pen: float
    r_pen: float
    iter: int = 0
    res_q: list = field(default_factory=list)
    res_p: list = field(default_factory=list)
    objective: list = field(default_factory=list)

    def copy(self) -> "SocState":
        return SocState(
            self.Psi.copy(), self.P.copy(), self.Q.copy(), self.b.copy(), self.B.copy(),
            self.lambda_pen, self.r_pen, self.iter,
            list(self.res_q), list(self.res_p), list(self.objective),
        )

    def permute(self, order: np.ndarray) -> None:
        for name in ("Psi", "P", "Q", "b", "B"):
            setattr(self, name, getattr(self, name)[:, order])


@dataclass(frozen=True)
class SolveOptions:
    """Knobs for :func:`solve_cm`.

    ``penalty="auto"`` picks ``lambda_pen`` and ``r_pen`` from the problem's
    energy scale (see :func:`default_penalties`); ``penalty="proportional"``
    uses ``lambda = mu N / 20`` and ``r = mu N / 5``. Explicit
    ``lambda_pen``/``r_pen`` values override both.
    """

    max_iter: int = 20000
    tol_split: float = 1e-6
    tol_obj: float = 1e-9
    patience: int = 5
    seed: int = 0
    ortho: str = "full"  # "full" | "banded"
    band: int = 1
    banded_warmup: int = 300
    banded_tol: float = 1e-8
    inner: str = "direct"  # "direct" | "gauss_seidel" | "cg"
    inner_sweeps: int = 5
    inner_tol: float = 1e-10
    inner_max_iter: int = 500
    penalty: str = "auto"
    lambda_pen: Optional[float] = None
    r_pen: Optional[float] = None
    strict: bool = False

    def __post_init__(self):
        if self.ortho not in ("full", "banded"):
            raise ValueError(f"unknown orthogonalization {self.ortho!r}")
        if self.ortho == "banded" and self.band < 1:
            raise ValueError("band width must be at least 1")
        if self.inner not in ("direct", "gauss_seidel", "cg"):
            raise ValueError(f"unknown inner solver {self.inner!r}")
        if self.penalty not in ("auto", "proportional"):
            raise ValueError(f"unknown penalty rule {self.penalty!r}")
        for name in ("tol_split", "tol_obj", "inner_tol", "banded_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


# ---------------------------------------------------------------------------
# elementary maps


def shrink(u, delta: float) -> np.ndarray:
    """Soft thresholding ``sign(u) * max(|u| - delta, 0)``."""
    if delta < 0:
        raise NegativeThreshold(f"threshold must be non-negative, got {delta}")
    u = np.asarray(u, dtype=float)
    return np.sign(u) * np.maximum(np.abs(u) - delta, 0.0)


def orthonormal_projection(A: np.ndarray, dx: float = 1.0) -> np.ndarray:
    """Closest matrix to ``A`` (Frobenius) with ``dx * P^T P = I``.

    Computed as ``A U diag(s)^-1/2 U^T`` from the SVD of the weighted Gram
    matrix ``dx * A^T A``.
    """
    A = np.asarray(A, dtype=float)
    gram = dx * A.T @ A
    U, s, _ = np.linalg.svd(0.5 * (gram + gram.T))
    if s.size == 0 or s[-1] < 1e-12 * s[0] or s[0] == 0:
        raise RankDeficient("columns are (numerically) linearly dependent")
    return A @ (U / np.sqrt(s)) @ U.T


def _band_pairs(N: int, p: int) -> np.ndarray:
    j = np.arange(N)
    dist = np.abs(j[:, None] - j[None, :])
    dist = np.minimum(dist, N - dist)
    return dist <= p


def banded_residual(A: np.ndarray, p: int, dx: float = 1.0) -> float:
    """Largest deviation from orthonormality among pairs within cyclic distance ``p``."""
    N = A.shape[1]
    err = np.abs(dx * A.T @ A - np.eye(N))
    return float(np.max(err[_band_pairs(N, p)]))


def banded_orthonormalize(
    A: np.ndarray, p: int, dx: float = 1.0, tol: float = 1e-8, max_iter: int = 50
) -> np.ndarray:
    """Nearest array to ``A`` whose columns are orthonormal within cyclic index distance ``p``.

    Stationarity of ``||P - A||**2`` under the banded constraints gives
    ``A = P (I + Lam)`` with ``Lam`` symmetric and banded, so ``P = A X`` with
    ``X = (I + Lam)^{-1}``. ``Lam`` is found by Newton's method on the banded
    entries of ``X^T S X - I`` where ``S`` is the weighted Gram matrix of ``A``.
    When ``A``'s off-band overlaps vanish and the full polar factor has the
    same band structure, this agrees with :func:`orthonormal_projection`.
    Columns are expected to be ordered by position along the ring.
    """
    if p < 1:
        raise ValueError("band width must be at least 1")
    A = np.array(A, dtype=float)
    N = A.shape[1]
    if 2 * p + 1 >= N:
        return orthonormal_projection(A, dx)
    mask = _band_pairs(N, p)
    S = dx * A.T @ A
    first = float(np.max(np.abs(S - np.eye(N))[mask]))
    if first <= tol:
        return A
    rows, cols = np.nonzero(np.triu(mask))
    I = np.eye(N)
    Lam = 0.5 * np.where(mask, S - I, 0.0)
    res = np.inf
    for _ in range(max_iter):
        X = np.linalg.inv(I + Lam)
        Y = X @ S @ X
        F = (Y - I)[rows, cols]
        res = float(np.max(np.abs(F)))
        if not np.isfinite(res):
            break
        if res <= 1e-3 * tol:
            break
        # d(X S X) = -X dLam Y - Y dLam X with dLam = E_ab + E_ba
        J = np.empty((rows.size, rows.size))
        for c, (a, b) in enumerate(zip(rows, cols)):
            D = np.outer(X[:, a], Y[b]) + np.outer(Y[:, a], X[b])
            if a != b:
                D += np.outer(X[:, b], Y[a]) + np.outer(Y[:, b], X[a])
            J[:, c] = -D[rows, cols]
        step = np.linalg.solve(J, -F)
        dL = np.zeros((N, N))
        dL[rows, cols] = step
        Lam = Lam + dL + np.triu(dL, 1).T
    if not np.isfinite(res) or res > tol:
        raise SweepDivergence(f"banded residual {res:.3g} after {max_iter} Newton steps (start {first:.3g})")
    return A @ np.linalg.inv(I + Lam)


def circular_centroid(modes: np.ndarray, L: float) -> np.ndarray:
    """Position on the ring of the weight ``psi**2`` of each column."""
    modes = np.asarray(modes, dtype=float)
    if modes.ndim == 1:
        modes = modes[:, None]
    n = modes.shape[0]
    phase = np.exp(2j * np.pi * np.arange(n) / n)
    z = phase @ (modes**2)
    return np.mod(np.angle(z) * L / (2 * np.pi), L)


def support_measure(mode: np.ndarray, dx: float, threshold: float = 1e-6) -> float:
    return float(np.count_nonzero(np.abs(mode) > threshold) * dx)


# ---------------------------------------------------------------------------
# the psi subproblem


class _LinearSystem:
    """``(2H + (lambda + r) I) X = R`` for a fixed operator and shift."""

    def __init__(self, H: HamiltonianOp, shift: float, opts: SolveOptions):
        if shift <= max(0.0, -2.0 * H.min_potential()):
            raise IndefiniteSystem(
                f"lambda + r = {shift:.4g} does not dominate -2 min V = {-2 * H.min_potential():.4g}"
            )
        self.H = H
        self.shift = shift
        self.method = opts.inner
        self.opts = opts
        if self.method == "gauss_seidel" and H.stencil != "fd":
            raise ValueError("Gauss-Seidel sweeps need the finite-difference stencil")
        if self.method == "direct":
            if H.stencil == "fd":
                self._lu = spla.splu((2 * H.matrix + shift * sp.identity(H.n)).tocsc())
            elif np.ptp(H.potential) == 0.0:
                self._symbol = 2 * H.kinetic_symbol + 2 * H.potential[0] + shift
            else:
                self._chol = scipy.linalg.cho_factor(2 * H.dense() + shift * np.eye(H.n))
        if H.stencil == "fd":
            dx = H.grid.dx
            self._diag = 2.0 / dx**2 + 2.0 * H.potential + shift
            self._off = -1.0 / dx**2

    def matvec(self, X):
        return 2.0 * self.H.apply(X) + self.shift * X

    def solve(self, R, X0=None):
        if self.method == "direct":
            if hasattr(self, "_lu"):
                return self._lu.solve(R)
            if hasattr(self, "_symbol"):
                return np.fft.ifft(np.fft.fft(R, axis=0) / self._symbol[:, None], axis=0).real
            return scipy.linalg.cho_solve(self._chol, R)
        X = np.zeros_like(R) if X0 is None else X0.copy()
        if self.method == "gauss_seidel":
            return self._gauss_seidel(R, X)
        return self._cg(R, X)

    def _gauss_seidel(self, R, X):
        # red-black ordering; the even node count keeps the coloring valid across the wrap
        diag = self._diag[:, None]
        for _ in range(self.opts.inner_sweeps):
            for start in (0, 1):
                nb = np.roll(X, 1, axis=0) + np.roll(X, -1, axis=0)
                X[start::2] = (R[start::2] - self._off * nb[start::2]) / diag[start::2]
        return X

    def _cg(self, R, X):
        tol = self.opts.inner_tol
        rnorm0 = np.linalg.norm(R, axis=0)
        rnorm0[rnorm0 == 0] = 1.0
        Rk = R - self.matvec(X)
        D = Rk.copy()
        rr = np.sum(Rk * Rk, axis=0)
        for _ in range(self.opts.inner_max_iter):
            if np.all(np.sqrt(rr) <= tol * rnorm0):
                return X
            AD = self.matvec(D)
            dAd = np.sum(D * AD, axis=0)
            alpha = np.divide(rr, dAd, out=np.zeros_like(rr), where=dAd > 0)
            X += alpha * D
            Rk -= alpha * AD
            rr_new = np.sum(Rk * Rk, axis=0)
            beta = np.divide(rr_new, rr, out=np.zeros_like(rr), where=rr > 0)
            D = Rk + beta * D
            rr = rr_new
        if np.all(np.sqrt(rr) <= tol * rnorm0):
            return X
        raise InnerSolverStall(
            f"CG residual {np.max(np.sqrt(rr) / rnorm0):.3g} after {self.opts.inner_max_iter} iterations"
        )


def psi_update(H: HamiltonianOp, state: SocState, opts: SolveOptions = SolveOptions(), system=None) -> np.ndarray:
    """Solve ``(2H + (lambda + r) I) Psi = r (P - B) + lambda (Q - b)`` columnwise."""
    if system is None:
        system = _LinearSystem(H, state.lambda_pen + state.r_pen, opts)
    rhs = state.r_pen * (state.P - state.B) + state.lambda_pen * (state.Q - state.b)
    return system.solve(rhs, state.Psi)


# ---------------------------------------------------------------------------
# driver


def mu_from_unweighted(mu: float, dx: float) -> float:
    """Sparsity parameter for weighted norms equivalent to ``mu`` under unweighted sums.

    With ``psi = v / sqrt(dx)`` the unweighted objective ``|v|_1 / mu + v^T H v``
    becomes ``|psi|_1 / (mu sqrt(dx)) + <psi, H psi>``.
    """
    return mu * np.sqrt(dx)


def closed_form_multiplier(mu: float) -> float:
    """Multiplier of the single free-electron mode, ``(3 pi)^(2/5) mu^(-4/5)``."""
    return (3 * np.pi) ** 0.4 * mu ** (-0.8)


def default_penalties(H: HamiltonianOp, N: int, mu: float, rule: str = "auto") -> tuple[float, float]:
    """Penalty pair ``(lambda, r)`` for the splitting scheme.

    The ``auto`` rule ties both penalties to an energy scale: the largest of
    the single-mode localization energy at this ``mu``, the ``N``-th
    free-electron level on the ring, and the spread of the potential.
    """
    if rule == "proportional":
        return mu * N / 20.0, mu * N / 5.0
    L = H.grid.L
    scale = max(
        closed_form_multiplier(mu),
        2.0 * (np.pi * (N // 2) / L) ** 2,
        float(np.ptp(H.potential)),
    )
    return 4.0 * scale, 16.0 * scale


def _objective(H: HamiltonianOp, X: np.ndarray, mu: float) -> float:
    dx = H.grid.dx
    return float(dx * (np.abs(X).sum() / mu + np.sum(X * H.apply(X))))


def _initial_state(H, N, mu, opts, init, lam, r) -> SocState:
    dx = H.grid.dx
    if init is None:
        rng = np.random.default_rng(opts.seed)
        init = rng.standard_normal((H.n, N))
    init = np.asarray(init, dtype=float)
    if init.shape != (H.n, N):
        raise ValueError(f"initial guess has shape {init.shape}, expected {(H.n, N)}")
    Psi = orthonormal_projection(init, dx)
    zeros = np.zeros_like(Psi)
    return SocState(Psi, Psi.copy(), Psi.copy(), zeros, zeros.copy(), lam, r)


def solve_cm(
    H: HamiltonianOp,
    N: int,
    mu: float,
    opts: SolveOptions = SolveOptions(),
    init: Optional[np.ndarray] = None,
    state: Optional[SocState] = None,
) -> ModeSet:
    """Compute the first ``N`` compressed modes of ``H`` at sparsity ``mu``.

    Iterates the psi solve, shrinkage of ``Psi + b``, orthonormal projection
    of ``Psi + B`` and the two Bregman updates until both split residuals
    (weighted RMS per mode) fall below ``tol_split`` and the relative
    objective change stays below ``tol_obj`` for ``patience`` iterations.

    ``init`` seeds the iteration with a given ``n x N`` array (projected to be
    orthonormal); ``state`` resumes a previous solve. The returned modes are
    the orthonormal iterate ``P``, sorted by Rayleigh quotient and with signs
    canonicalized. A run that hits ``max_iter`` returns its last iterate with
    ``converged=False`` unless ``opts.strict`` is set.
    """
    n = H.n
    if not 1 <= N <= n:
        raise ValueError(f"mode count must be in 1..{n}, got {N}")
    if mu <= 0:
        raise ValueError("mu must be positive")

    if state is None:
        lam, r = default_penalties(H, N, mu, opts.penalty)
        lam = opts.lambda_pen if opts.lambda_pen is not None else lam
        r = opts.r_pen if opts.r_pen is not None else r
        state = _initial_state(H, N, mu, opts, init, lam, r)
    else:
        state = state.copy()
        lam, r = state.lambda_pen, state.r_pen
    system = _LinearSystem(H, lam + r, opts)
    dx = H.grid.dx
    thresh = 1.0 / (lam * mu)
    norm = np.sqrt(dx / N)
    banded = opts.ortho == "banded" and 2 * opts.band + 1 < N
    sorted_for_band = False
    quiet = 0
    converged = False

    start = state.iter
    for k in range(start, start + opts.max_iter):
        state.Psi = psi_update(H, state, opts, system)
        state.Q = shrink(state.Psi + state.b, thresh)
        target = state.Psi + state.B
        if banded and k >= opts.banded_warmup:
            if not sorted_for_band:
                order = np.argsort(circular_centroid(state.Psi, H.grid.L), kind="stable")
                state.permute(order)
                target = state.Psi + state.B
                sorted_for_band = True
            state.P = banded_orthonormalize(target, opts.band, dx, tol=opts.banded_tol)
        else:
            state.P = orthonormal_projection(target, dx)
        state.b += state.Psi - state.Q
        state.B += state.Psi - state.P
        state.iter = k + 1

        res_q = norm * np.linalg.norm(state.Psi - state.Q)
        res_p = norm * np.linalg.norm(state.Psi - state.P)
        obj = _objective(H, state.P, mu)
        prev = state.objective[-1] if state.objective else np.inf
        state.res_q.append(res_q)
        state.res_p.append(res_p)
        state.objective.append(obj)

        small_change = abs(obj - prev) <= opts.tol_obj * max(abs(obj), 1e-300)
        quiet = quiet + 1 if small_change else 0
        if max(res_q, res_p) <= opts.tol_split and quiet >= opts.patience:
            if banded and not sorted_for_band:
                continue
            converged = True
            break

    if not np.all(np.isfinite(state.P)):
        raise RuntimeError("iteration diverged to non-finite values")
    if np.any(np.all(state.Q == 0.0, axis=0)):
        raise ZeroModeCollapse("shrinkage zeroed an entire mode; mu is too small for this grid")
    if not converged:
        msg = (
            f"no convergence after {opts.max_iter} iterations "
            f"(split residual {max(state.res_q[-1], state.res_p[-1]):.3g})"
        )
        if opts.strict:
            raise MaxIterExceeded(msg)
        log.warning(msg)

    modes = state.P.copy()
    rq = dx * np.sum(modes * H.apply(modes), axis=0)
    order = np.argsort(rq, kind="stable")
    out = ModeSet(
        grid=H.grid,
        modes=modes[:, order],
        mu=mu,
        objective=_objective(H, modes, mu),
        converged=converged,
        iterations=state.iter,
        state=state,
    )
    return canonicalize_signs(out)


def canonicalize_signs(modes: ModeSet) -> ModeSet:
    """Flip columns whose negative mass outweighs their positive mass."""
    X = np.asarray(modes.modes, dtype=float)
    pos = np.sum(np.maximum(X, 0.0), axis=0)
    neg = np.sum(np.maximum(-X, 0.0), axis=0)
    flip = np.where(neg > pos, -1.0, 1.0)
    return replace(modes, modes=X * flip)


# ---------------------------------------------------------------------------
# analytic single-mode solution


@dataclass(frozen=True)
class ClosedFormMode:
    """``(1 + cos(sqrt(lam) (x - L/2))) / (lam mu)`` on ``|x - L/2| <= pi / sqrt(lam)``."""

    mu: float
    L: float

    @property
    def multiplier(self) -> float:
        return closed_form_multiplier(self.mu)

    @property
    def half_width(self) -> float:
        return np.pi / np.sqrt(self.multiplier)

    def __call__(self, x) -> np.ndarray:
        lam = self.multiplier
        y = np.asarray(x, dtype=float) - 0.5 * self.L
        inside = np.abs(y) <= self.half_width
        return np.where(inside, (1.0 + np.cos(np.sqrt(lam) * y)) / (lam * self.mu), 0.0)

    def sample(self, grid: PeriodicGrid) -> np.ndarray:
        return self(grid.nodes)


def closed_form_psi1(mu: float, L: float) -> ClosedFormMode:
    if mu <= 0 or L <= 0:
        raise ValueError("mu and L must be positive")
    mode = ClosedFormMode(float(mu), float(L))
    if mode.half_width >= 0.5 * L:
        raise SupportExceedsDomain(
            f"support half-width {mode.half_width:.4g} does not fit in a domain of length {L}"
        )
    return mode
