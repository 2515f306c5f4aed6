"""Basic compressed plane waves (BCPWs) for the free Laplacian.

A BCPW ``psi^n`` minimizes ``(1/mu)|psi|_1 + <psi, -1/2 psi''>`` subject to
orthonormality against its own shifts by multiples of ``w`` and against all
shifts of the lower levels. The shifted copies ``b^n_j(x) = psi^n(x - j w)``
form the compressed plane wave family.

Coefficients use the orthonormal Fourier convention

    psi(x_i) = L^{-1/2} sum_m psi_m exp(i G_m x_i),   G_m = 2 pi m / L,

so ``<f, g> = sum_m f_m conj(g_m)`` exactly on the grid. A shift by ``j w``
multiplies ``psi_m`` by ``exp(-2 pi i m j / N0)``, which depends on ``m`` only
through its residue class ``m mod N0``. The shift constraints therefore
decouple class by class: within each class the restricted coefficient vector
must have squared norm ``1/N0`` and be orthogonal to the lower levels'
restrictions. The Lagrange multipliers of the quadratic subproblem reduce to
one scalar per class, found from a monotone secular equation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cmsolver import shrink
from .errors import (
    IncompatibleScale,
    InfeasibleInput,
    LevelMissing,
    NewtonDivergence,
    PoleCrossing,
)
from .lattice import PeriodicGrid, build_grid, minimum_image

log = logging.getLogger(__name__)

__all__ = [
    "BcpwOptions",
    "BcpwSet",
    "GammaSystem",
    "ShiftLattice",
    "to_coeffs",
    "to_samples",
    "solve_gamma_system",
    "solve_bcpw",
    "build_bcpw_set",
    "spectral_weight",
    "occupation",
    "verify_scaling",
    "shift_orthogonality_residual",
    "default_lambda",
    "level_objective",
    "step_profile",
]


def to_coeffs(f: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    """Orthonormal Fourier coefficients of real samples (works along axis 0)."""
    return np.sqrt(grid.L) / grid.n * np.fft.fft(f, axis=0)


def to_samples(c: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    return (grid.n / np.sqrt(grid.L) * np.fft.ifft(c, axis=0)).real


class ShiftLattice:
    """Residue-class bookkeeping for shifts by ``w`` on a periodic grid."""

    def __init__(self, grid: PeriodicGrid, w: float):
        if w <= 0:
            raise ValueError("shift period must be positive")
        N0 = int(round(grid.L / w))
        if N0 < 1 or abs(N0 * w - grid.L) > 1e-9 * grid.L:
            raise ValueError(f"shift period {w} does not divide the domain length {grid.L}")
        self.grid = grid
        self.w = grid.L / N0
        self.N0 = N0
        self.m = grid.frequencies
        self.G = grid.wavenumbers
        # the Nyquist mode cannot be shifted by a fraction of a cell and stay real
        self.valid = self.m != -(grid.n // 2)
        self.residue = np.mod(self.m, N0)
        self.classes = [np.nonzero(self.valid & (self.residue == k))[0] for k in range(N0)]

    def phase(self, j) -> np.ndarray:
        """Fourier multiplier of a shift by ``j * w``."""
        return np.exp(-2j * np.pi * np.outer(np.atleast_1d(j), self.m) / self.N0)

    def fold(self, v: np.ndarray) -> np.ndarray:
        """Sum an array over each residue class (last axis)."""
        out = np.zeros(v.shape[:-1] + (self.N0,), dtype=v.dtype)
        for k, idx in enumerate(self.classes):
            out[..., k] = v[..., idx].sum(axis=-1)
        return out


@dataclass
class GammaSystem:
    """Multipliers of the shift constraints and the constraint values at the solution."""

    gamma: np.ndarray  # gamma_j, j = 0..N0//2
    class_shift: np.ndarray  # per residue class
    residuals: np.ndarray  # c_j, j = 0..N0//2
    newton_iterations: int = 0
    hard_classes: tuple = ()


class _ClassProblem:
    """Per-class data of the constrained quadratic subproblem for one level.

    For class ``k`` the admissible coefficients are ``W_k y`` with ``W_k`` an
    orthonormal basis of the complement of the lower levels, rotated so that
    the diagonal part ``G**2/2 + lambda/2`` becomes ``diag(d_k)``.
    """

    def __init__(self, lattice: ShiftLattice, lam: float, previous: Sequence[np.ndarray]):
        self.lattice = lattice
        self.lam = lam
        N0 = lattice.N0
        D = 0.5 * lattice.G**2 + 0.5 * lam
        sizes = []
        blocks = []
        for idx in lattice.classes:
            if previous:
                Pk = np.array([p[idx] for p in previous]).T
                q, _ = np.linalg.qr(Pk, mode="complete")
                Z = q[:, Pk.shape[1]:]
            else:
                Z = np.eye(idx.size, dtype=complex)
            if Z.shape[1] == 0:
                raise ValueError("grid too coarse: a residue class has no room for another level")
            M = Z.conj().T @ (D[idx, None] * Z)
            d, V = np.linalg.eigh(0.5 * (M + M.conj().T))
            blocks.append((Z @ V, d))
            sizes.append((idx.size, d.size))
        cmax = max(s[0] for s in sizes)
        dmax = max(s[1] for s in sizes)
        self.W = np.zeros((N0, cmax, dmax), dtype=complex)
        self.d = np.full((N0, dmax), np.inf)
        self.idx = np.zeros((N0, cmax), dtype=int)
        self.mask = np.zeros((N0, cmax), dtype=bool)
        for k, ((W, d), idx) in enumerate(zip(blocks, lattice.classes)):
            self.W[k, : idx.size, : d.size] = W
            self.d[k, : d.size] = d
            self.idx[k, : idx.size] = idx
            self.mask[k, : idx.size] = True

    def gather(self, a: np.ndarray) -> np.ndarray:
        return np.where(self.mask, a[self.idx], 0.0)

    def scatter(self, v: np.ndarray, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=complex)
        out[self.idx[self.mask]] = v[self.mask]
        return out


def _secular(q2: np.ndarray, d: np.ndarray, target: float, tol: float, max_iter: int):
    """Solve ``sum_v q2_v / (2 (d_v + s))**2 = target`` for ``s > -min(d)``, per row.

    Safeguarded Newton on ``1/sqrt(norm2) - 1/sqrt(target)``, which is close
    to linear in ``s``. Rows whose lowest level carries no weight and cannot
    reach the target are returned flagged as hard cases with ``s = -min(d)``.
    """
    finite = np.isfinite(d)
    dz = np.where(finite, d, 0.0)
    dmin = np.min(np.where(finite, d, np.inf), axis=1)
    scale = 1.0 + np.abs(dmin)
    low_group = finite & (d - dmin[:, None] <= 1e-12 * scale[:, None])
    q0 = np.sum(np.where(low_group, q2, 0.0), axis=1)
    total = np.sum(q2, axis=1)

    def norm2(s):
        den = 2.0 * (dz + s[:, None])
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(finite & (q2 > 0), q2 / den**2, 0.0)
            dt = np.where(finite & (q2 > 0), -4.0 * q2 / den**3, 0.0)
        return t.sum(axis=1), dt.sum(axis=1)

    # weight reachable at s = -dmin when the lowest level carries nothing
    with np.errstate(divide="ignore", invalid="ignore"):
        rest = np.where(low_group | ~finite | (q2 == 0), 0.0, q2 / (2.0 * (dz - dmin[:, None])) ** 2)
    hard = (q0 <= 1e-300 * np.maximum(total, 1e-300)) & (rest.sum(axis=1) <= target)

    lo = -dmin.copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        single = np.where(finite, np.sqrt(q2) / (2.0 * np.sqrt(target)) - dz, -np.inf)
    lo = np.maximum(lo, np.max(single, axis=1))
    hi = -dmin + np.sqrt(total / target) / 2.0 + 1e-300
    hi = np.maximum(hi, lo)
    s = lo.copy()
    # nudge off a pole
    s = np.where(s <= -dmin, -dmin + 1e-15 * scale, s)
    done = hard.copy()
    its = 0
    for its in range(1, max_iter + 1):
        n2, dn2 = norm2(s)
        err = n2 - target
        ok = np.abs(err) <= tol * target
        # bracket collapsed to rounding level: s is as good as it gets
        ok |= (hi - lo) <= 4 * np.finfo(float).eps * np.maximum(np.abs(s), scale)
        done |= ok
        if np.all(done):
            break
        below = err > 0  # norm too large: root lies to the right
        lo = np.where(below & ~done, np.maximum(lo, s), lo)
        hi = np.where(~below & ~done, np.minimum(hi, s), hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            phi = 1.0 / np.sqrt(n2) - 1.0 / np.sqrt(target)
            dphi = -0.5 * n2 ** (-1.5) * dn2
            step = s - phi / dphi
        bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
        step = np.where(bad, 0.5 * (lo + hi), step)
        s = np.where(done, s, step)
    else:
        raise NewtonDivergence(f"secular equation unsolved after {max_iter} iterations")
    s = np.where(hard, -dmin, s)
    return s, hard, its


def _solve_classes(problem: _ClassProblem, a: np.ndarray, tol: float, max_iter: int):
    lat = problem.lattice
    lam = problem.lam
    target = 1.0 / lat.N0
    at = np.einsum("kcd,kc->kd", problem.W.conj(), problem.gather(a))
    q2 = (lam * np.abs(at)) ** 2
    q2[~np.isfinite(problem.d)] = 0.0
    s, hard, its = _secular(q2, problem.d, target, tol, max_iter)
    den = 2.0 * (np.where(np.isfinite(problem.d), problem.d, 1.0) + s[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.where(q2 > 0, lam * at / den, 0.0)
    live = (q2 > 0) & ~hard[:, None]
    if np.any(live & ~np.isfinite(y)):
        raise PoleCrossing("a denominator reached zero at the multiplier solution")
    for k in np.nonzero(hard)[0]:
        finite = np.isfinite(problem.d[k])
        dmin = problem.d[k][finite].min()
        group = finite & (problem.d[k] - dmin <= 1e-12 * (1 + abs(dmin)))
        y[k, group] = 0.0
        rest = target - np.sum(np.abs(y[k]) ** 2)
        y[k, np.nonzero(group)[0][0]] = np.sqrt(max(rest, 0.0))
    psi = problem.scatter(np.einsum("kcd,kd->kc", problem.W, y), lat.grid.n)
    return psi, s, tuple(int(k) for k in np.nonzero(hard)[0]), its


def _gamma_from_shifts(s: np.ndarray, N0: int) -> np.ndarray:
    k = np.arange(N0)
    j = np.arange(N0 // 2 + 1)
    return (np.cos(2 * np.pi * np.outer(j, k) / N0) @ s) / N0


def _constraint_values(lattice: ShiftLattice, psi: np.ndarray) -> np.ndarray:
    j = np.arange(lattice.N0 // 2 + 1)
    c = np.cos(2 * np.pi * np.outer(j, lattice.m) / lattice.N0) @ (np.abs(psi) ** 2)
    c[0] -= 1.0
    return c


def solve_gamma_system(
    uG: np.ndarray,
    bG: np.ndarray,
    lambda_pen: float,
    w: float,
    grid: PeriodicGrid,
    previous: Sequence[np.ndarray] = (),
    tol: float = 1e-14,
    max_iter: int = 200,
    _problem: Optional[_ClassProblem] = None,
):
    """Minimize ``sum G^2/2 |psi_G|^2 + lambda/2 |psi_G - (u_G - b_G)|^2`` under the shift constraints.

    Returns the coefficient vector and a :class:`GammaSystem` with the
    multipliers ``gamma_j`` (``j = 0..N0//2``) and constraint residuals.
    ``previous`` holds coefficient vectors of lower levels that the result
    must be orthogonal to at every shift.
    """
    lattice = _problem.lattice if _problem is not None else ShiftLattice(grid, w)
    a = np.asarray(uG, dtype=complex) - np.asarray(bG, dtype=complex)
    if a.shape != (grid.n,):
        raise ValueError(f"coefficient vectors must have length {grid.n}")
    a = np.where(lattice.valid, a, 0.0)
    if not np.any(np.abs(a) > 0):
        raise InfeasibleInput("u - b vanishes; normalization cannot be reached")
    problem = _problem if _problem is not None else _ClassProblem(lattice, lambda_pen, list(previous))
    psi, s, hard, its = _solve_classes(problem, a, tol, max_iter)
    system = GammaSystem(
        gamma=_gamma_from_shifts(s, lattice.N0),
        class_shift=s,
        residuals=_constraint_values(lattice, psi),
        newton_iterations=its,
        hard_classes=hard,
    )
    return psi, system


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BcpwOptions:
    max_iter: int = 3000
    tol: float = 1e-8
    lambda_pen: Optional[float] = None
    lambda_scale: float = 100.0
    newton_tol: float = 1e-14
    newton_max_iter: int = 200
    support_threshold: float = 1e-8
    # the split residual can plateau while the objective has settled
    check_every: int = 100
    obj_tol: float = 1e-8
    stall_tol: float = 1e-5


def level_objective(coeffs: np.ndarray, grid: PeriodicGrid, mu: float) -> float:
    """``(1/mu) |psi|_1 + <psi, -1/2 psi''>`` evaluated spectrally."""
    samples = to_samples(coeffs, grid)
    kinetic = 0.5 * np.sum(grid.wavenumbers**2 * np.abs(coeffs) ** 2)
    return float(grid.dx * np.sum(np.abs(samples)) / mu + kinetic)


def default_lambda(w: float, scale: float = 100.0) -> float:
    """Penalty ``scale * (pi / w)**2``; covariant under ``x -> s x``."""
    return scale * (np.pi / w) ** 2


@dataclass
class BcpwSet:
    """Levels ``psi^1..psi^n`` centered at ``L/2`` with their Fourier coefficients."""

    grid: PeriodicGrid
    w: float
    mu: float
    lambda_pen: float
    coeffs: np.ndarray  # levels x n, complex
    modes: np.ndarray  # levels x n, real samples
    iterations: list = field(default_factory=list)
    converged: list = field(default_factory=list)
    objectives: list = field(default_factory=list)
    support_threshold: float = 1e-8
    _family: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def N0(self) -> int:
        return int(round(self.grid.L / self.w))

    @property
    def levels(self) -> int:
        return self.modes.shape[0]

    @property
    def lattice(self) -> ShiftLattice:
        return ShiftLattice(self.grid, self.w)

    @property
    def size(self) -> int:
        return self.levels * self.N0

    def level(self, n: int) -> np.ndarray:
        if not 1 <= n <= self.levels:
            raise LevelMissing(f"level {n} not built (have 1..{self.levels})")
        return self.modes[n - 1]

    def member(self, n: int, j: int) -> np.ndarray:
        """Samples of ``psi^n(x - j w)``."""
        if not 1 <= n <= self.levels:
            raise LevelMissing(f"level {n} not built (have 1..{self.levels})")
        return to_samples(self.coeffs[n - 1] * self.lattice.phase(j % self.N0)[0], self.grid)

    def family(self) -> np.ndarray:
        """All members as a ``levels x N0 x n`` array (cached)."""
        if self._family is None:
            lat = self.lattice
            phases = lat.phase(np.arange(self.N0))  # N0 x n
            spec = self.coeffs[:, None, :] * phases[None, :, :]
            self._family = to_samples(np.moveaxis(spec, -1, 0), self.grid)
            self._family = np.moveaxis(self._family, 0, -1)
        return self._family

    def family_matrix(self) -> np.ndarray:
        """Members as columns of an ``n x (levels * N0)`` array, level-major."""
        return self.family().reshape(self.size, self.grid.n).T

    def support_masks(self) -> np.ndarray:
        """``levels x N0 x n`` booleans marking samples above the support threshold."""
        fam = self.family()
        return np.abs(fam) > self.support_threshold


def _initial_guess(grid: PeriodicGrid, w: float, level: int) -> np.ndarray:
    y = minimum_image(grid.nodes - 0.5 * grid.L, grid.L)
    parity = (level - 1) % 2
    return np.exp(-(y**2) / (2 * w**2)) * (y / w) ** parity


def _canonical_sign(psi: np.ndarray) -> float:
    pos = np.sum(np.maximum(psi, 0.0))
    neg = np.sum(np.maximum(-psi, 0.0))
    if neg > pos * (1 + 1e-9):
        return -1.0
    if abs(neg - pos) <= 1e-9 * (pos + neg):
        # odd profile: put the positive lobe on the right of the center
        y = minimum_image(np.arange(psi.size) - psi.size / 2, psi.size)
        return -1.0 if np.dot(y, psi) < 0 else 1.0
    return 1.0


def solve_bcpw(
    grid: PeriodicGrid,
    level: int,
    previous: Sequence[np.ndarray],
    mu: float,
    w: float,
    opts: BcpwOptions = BcpwOptions(),
    init: Optional[np.ndarray] = None,
):
    """Build level ``level`` given the coefficient vectors of levels ``1..level-1``.

    Runs the Bregman loop: exact constrained quadratic solve in Fourier space,
    shrinkage in real space, Bregman update; stops once the split residual
    ``||psi - u||`` drops below ``opts.tol``. Returns ``(coeffs, samples, info)``.
    """
    if len(previous) != level - 1:
        raise ValueError(f"level {level} needs {level - 1} previous levels, got {len(previous)}")
    if mu <= 0:
        raise ValueError("mu must be positive")
    lattice = ShiftLattice(grid, w)
    lam = opts.lambda_pen if opts.lambda_pen is not None else default_lambda(lattice.w, opts.lambda_scale)
    problem = _ClassProblem(lattice, lam, list(previous))
    thresh = 1.0 / (lam * mu)

    u = _initial_guess(grid, lattice.w, level) if init is None else np.asarray(init, dtype=float)
    b = np.zeros(grid.n)
    converged = False
    res = np.inf
    last_obj = np.inf
    for it in range(1, opts.max_iter + 1):
        a = to_coeffs(u - b, grid)
        psi_c, _ = solve_gamma_system(
            a, 0.0 * a, lam, lattice.w, grid,
            tol=opts.newton_tol, max_iter=opts.newton_max_iter, _problem=problem,
        )
        psi = to_samples(psi_c, grid)
        u = shrink(psi + b, thresh)
        b += psi - u
        res = np.sqrt(grid.dx * np.sum((psi - u) ** 2))
        if res <= opts.tol:
            converged = True
            break
        if it % opts.check_every == 0:
            obj = level_objective(psi_c, grid, mu)
            if res <= opts.stall_tol and abs(obj - last_obj) <= opts.obj_tol * abs(obj):
                converged = True
                break
            last_obj = obj
    if not converged:
        log.warning("level %d: split residual %.3g after %d iterations", level, res, opts.max_iter)
    sign = _canonical_sign(psi)
    info = {
        "iterations": it,
        "residual": float(res),
        "converged": converged,
        "lambda_pen": lam,
        "objective": level_objective(psi_c, grid, mu),
    }
    return sign * psi_c, sign * psi, info


def build_bcpw_set(
    grid: PeriodicGrid, mu: float, w: float, levels: int = 6, opts: BcpwOptions = BcpwOptions()
) -> BcpwSet:
    """Build levels ``1..levels`` sequentially."""
    lattice = ShiftLattice(grid, w)
    coeffs, modes, its, conv, objs = [], [], [], [], []
    lam = None
    for level in range(1, levels + 1):
        c, f, info = solve_bcpw(grid, level, coeffs, mu, lattice.w, opts)
        coeffs.append(c)
        modes.append(f)
        its.append(info["iterations"])
        conv.append(info["converged"])
        objs.append(info["objective"])
        lam = info["lambda_pen"]
    return BcpwSet(
        grid=grid,
        w=lattice.w,
        mu=mu,
        lambda_pen=lam,
        coeffs=np.array(coeffs),
        modes=np.array(modes),
        iterations=its,
        converged=conv,
        objectives=objs,
        support_threshold=opts.support_threshold,
    )


# ---------------------------------------------------------------------------
# diagnostics


def spectral_weight(bcpw: BcpwSet, level: int) -> np.ndarray:
    """``|psi^n_G|**2`` in FFT order; sums to one for a normalized level."""
    if not 1 <= level <= bcpw.levels:
        raise LevelMissing(f"level {level} not built (have 1..{bcpw.levels})")
    return np.abs(bcpw.coeffs[level - 1]) ** 2


def occupation(bcpw: BcpwSet, levels: Optional[int] = None) -> np.ndarray:
    """Cumulative spectral weight of the first ``levels`` levels, scaled by ``N0``.

    A complete family gives exactly one at every frequency; the value never
    exceeds one for an orthonormal family.
    """
    levels = bcpw.levels if levels is None else levels
    return bcpw.N0 * sum(spectral_weight(bcpw, n) for n in range(1, levels + 1))


def step_profile(
    bcpw: BcpwSet,
    band: tuple = (0.9, 1.1),
    outside: float = 0.1,
    transition: float = 0.25,
) -> dict:
    """Summarize how closely the cumulative occupation approximates a step.

    The plateau is the longest run ``|m| = 0, 1, ...`` whose occupation lies
    in ``band`` at both ``+m`` and ``-m``. After a transition zone of
    ``transition`` times the plateau width, every remaining frequency must
    sit at or below ``outside``. Also reports the weighted mean ``|G|`` of
    each level.
    """
    occ = occupation(bcpw)
    m = np.abs(bcpw.grid.frequencies)
    mmax = int(m.max())
    per_abs = np.array([occ[m == k].max(initial=0.0) for k in range(mmax + 1)])
    per_abs_min = np.array([occ[m == k].min(initial=np.inf) for k in range(mmax + 1)])
    inside = (per_abs_min >= band[0]) & (per_abs <= band[1])
    width = int(np.argmin(inside)) if not inside.all() else mmax + 1
    plateau = m < width
    coverage = float(occ[plateau].sum() / occ.sum())
    edge = width + int(np.ceil(transition * width))
    tail = m >= edge
    max_tail = float(occ[tail].max()) if np.any(tail) else 0.0
    G = np.abs(bcpw.grid.wavenumbers)
    mean_G = [float(np.sum(spectral_weight(bcpw, n) * G)) for n in range(1, bcpw.levels + 1)]
    return {
        "plateau_width": width,
        "coverage": coverage,
        "transition_end": edge,
        "max_outside": max_tail,
        "mean_abs_G": mean_G,
        "passes": bool(
            width > 0
            and coverage >= 0.8
            and max_tail <= outside
            and all(b > a for a, b in zip(mean_G, mean_G[1:]))
        ),
    }


def shift_orthogonality_residual(bcpw: BcpwSet) -> np.ndarray:
    """``r[n, i, j] = <psi^n, psi^i(. - j w)> - delta_ni delta_j0`` for all built pairs.

    Evaluated from the real-space samples.
    """
    fam = bcpw.family()  # levels x N0 x n
    base = bcpw.modes  # levels x n
    r = bcpw.grid.dx * np.einsum("ax,bjx->abj", base, fam)
    r[np.arange(bcpw.levels), np.arange(bcpw.levels), 0] -= 1.0
    return r


def verify_scaling(bcpw: BcpwSet, s: float, opts: Optional[BcpwOptions] = None) -> float:
    """Check ``psi_{mu,w}(x) = s^{1/2} psi_{s^{5/2} mu, s w}(s x)`` by an independent solve.

    The companion set is built on ``[0, s L]`` with the same node count, so
    node ``i`` of the scaled grid sits at ``s x_i``. Returns the largest
    relative L2 mismatch over the levels.
    """
    if not np.isfinite(s) or s <= 0:
        raise IncompatibleScale(f"scale factor must be positive, got {s}")
    if s == 1:
        return 0.0
    if opts is None:
        opts = BcpwOptions(lambda_pen=bcpw.lambda_pen / s**2)
    grid = build_grid(s * bcpw.grid.L, bcpw.grid.n)
    scaled = build_bcpw_set(grid, s**2.5 * bcpw.mu, s * bcpw.w, bcpw.levels, opts)
    mapped = np.sqrt(s) * scaled.modes
    err = np.sqrt(bcpw.grid.dx * np.sum((mapped - bcpw.modes) ** 2, axis=1))
    ref = np.sqrt(bcpw.grid.dx * np.sum(bcpw.modes**2, axis=1))
    return float(np.max(err / ref))
