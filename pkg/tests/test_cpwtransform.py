import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compressed_modes.cpwtransform import (
    CpwCoeffs,
    Window,
    active_members,
    cpw_forward,
    cpw_inverse,
    fourier_basis,
    fourier_topk_error,
    topk_error,
    windowed_forward,
    windowed_inverse,
)
from compressed_modes.errors import EmptyWindow, GridMismatch, KTooLarge, ShapeMismatch
from compressed_modes.lattice import build_grid


def direct_forward(f, basis):
    """``<f, b^n_j>`` by weighted quadrature against explicitly shifted members."""
    g = basis.grid
    step = g.n // basis.N0
    out = np.empty((basis.levels, basis.N0))
    for n in range(basis.levels):
        for j in range(basis.N0):
            out[n, j] = g.dx * np.dot(f, np.roll(basis.modes[n], j * step))
    return out


def naive_inverse(c, basis):
    step = basis.grid.n // basis.N0
    out = np.zeros(basis.grid.n)
    for n in range(basis.levels):
        for j in range(basis.N0):
            out += c[n, j] * np.roll(basis.modes[n], j * step)
    return out


def coeffs(values, basis):
    return CpwCoeffs(values, basis.grid.L, basis.w)


def test_forward_matches_direct_quadrature(small_bcpw, rng):
    f = rng.standard_normal(small_bcpw.grid.n)
    assert np.allclose(cpw_forward(f, small_bcpw).values, direct_forward(f, small_bcpw), atol=1e-10)


def test_inverse_matches_naive_synthesis(small_bcpw, rng):
    c = rng.standard_normal((small_bcpw.levels, small_bcpw.N0))
    assert np.allclose(cpw_inverse(coeffs(c, small_bcpw), small_bcpw), naive_inverse(c, small_bcpw), atol=1e-10)


def test_member_has_one_hot_coefficients(small_bcpw):
    c = cpw_forward(small_bcpw.member(2, 3), small_bcpw).values
    expected = np.zeros_like(c)
    expected[1, 3] = 1.0
    assert np.allclose(c, expected, atol=1e-10)


def test_one_hot_synthesizes_member(small_bcpw):
    c = np.zeros((small_bcpw.levels, small_bcpw.N0))
    c[2, 5] = 1.0
    assert np.allclose(cpw_inverse(coeffs(c, small_bcpw), small_bcpw), small_bcpw.member(3, 5), atol=1e-10)


def test_zero_field(small_bcpw):
    assert not np.any(cpw_forward(np.zeros(small_bcpw.grid.n), small_bcpw).values)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_coefficient_round_trip(small_bcpw, seed):
    c = np.random.default_rng(seed).standard_normal((small_bcpw.levels, small_bcpw.N0))
    back = cpw_forward(cpw_inverse(coeffs(c, small_bcpw), small_bcpw), small_bcpw).values
    assert np.allclose(back, c, atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), alpha=st.floats(-10, 10), beta=st.floats(-10, 10))
def test_forward_is_linear(small_bcpw, seed, alpha, beta):
    r = np.random.default_rng(seed)
    f, h = r.standard_normal((2, small_bcpw.grid.n))
    lhs = cpw_forward(alpha * f + beta * h, small_bcpw).values
    rhs = alpha * cpw_forward(f, small_bcpw).values + beta * cpw_forward(h, small_bcpw).values
    assert np.allclose(lhs, rhs, atol=1e-12 * (1 + abs(alpha) + abs(beta)) * 10)


def test_shift_covariance(small_bcpw, rng):
    f = rng.standard_normal(small_bcpw.grid.n)
    step = small_bcpw.grid.n // small_bcpw.N0
    c = cpw_forward(f, small_bcpw).values
    moved = cpw_forward(np.roll(f, step), small_bcpw).values
    assert np.allclose(moved, np.roll(c, 1, axis=1), atol=1e-10)


def test_parseval_in_span(small_bcpw, rng):
    c = rng.standard_normal((small_bcpw.levels, small_bcpw.N0))
    f = cpw_inverse(coeffs(c, small_bcpw), small_bcpw)
    assert np.sum(c**2) == pytest.approx(small_bcpw.grid.dx * f @ f, rel=1e-8)


def test_parseval_is_projection(small_bcpw, rng):
    f = rng.standard_normal(small_bcpw.grid.n)
    c = cpw_forward(f, small_bcpw).values
    F = small_bcpw.family_matrix()
    proj = F @ (small_bcpw.grid.dx * F.T @ f)
    assert np.sum(c**2) == pytest.approx(small_bcpw.grid.dx * proj @ proj, rel=1e-10)
    assert np.sum(c**2) <= small_bcpw.grid.dx * f @ f


def test_shape_and_grid_checks(small_bcpw):
    with pytest.raises(GridMismatch):
        cpw_forward(np.zeros(10), small_bcpw)
    with pytest.raises(ShapeMismatch):
        cpw_inverse(CpwCoeffs(np.zeros((2, 3)), 40.0, 5.0), small_bcpw)


# windows -------------------------------------------------------------------------


def test_window_indices_wrap():
    assert np.array_equal(Window(6, 4).indices(8), [6, 7, 0, 1])
    for bad in (Window(0, 0), Window(0, 9)):
        with pytest.raises(EmptyWindow):
            bad.indices(8)


def test_window_covering_wraps():
    mask = np.zeros(10, dtype=bool)
    mask[[8, 9, 0, 1]] = True
    assert Window.covering(mask) == Window(8, 4)
    with pytest.raises(EmptyWindow):
        Window.covering(np.zeros(5, dtype=bool))


def test_whole_domain_window(small_bcpw, rng):
    c = rng.standard_normal((small_bcpw.levels, small_bcpw.N0))
    win = Window(0, small_bcpw.grid.n)
    assert np.allclose(windowed_inverse(coeffs(c, small_bcpw), small_bcpw, win),
                       cpw_inverse(coeffs(c, small_bcpw), small_bcpw), atol=1e-10)


@pytest.mark.parametrize("start, length", [(10, 30), (100, 60), (0, 1)])
def test_windowed_inverse_matches_restriction(small_bcpw, rng, start, length):
    c = rng.standard_normal((small_bcpw.levels, small_bcpw.N0))
    win = Window(start, length)
    full = cpw_inverse(coeffs(c, small_bcpw), small_bcpw)
    assert np.allclose(windowed_inverse(coeffs(c, small_bcpw), small_bcpw, win),
                       full[win.indices(small_bcpw.grid.n)], atol=1e-8)


def test_window_missing_active_members_gives_zero(small_bcpw):
    # only the first member of level 1 carries weight; pick a window it does not reach
    c = np.zeros((small_bcpw.levels, small_bcpw.N0))
    c[0, 0] = 1.0
    masks = small_bcpw.support_masks()[0, 0]
    outside = np.nonzero(~masks)[0]
    win = Window(int(outside[0]), 1)
    assert not active_members(small_bcpw, win)[0, 0]
    assert np.all(windowed_inverse(coeffs(c, small_bcpw), small_bcpw, win) == 0.0)


def test_windowed_forward_of_member(small_bcpw):
    member = small_bcpw.member(1, 2)
    win = Window.covering(np.abs(member) > 0)
    part = windowed_forward(member[win.indices(small_bcpw.grid.n)], small_bcpw, win)
    expected = np.zeros_like(part.values)
    expected[0, 2] = 1.0
    assert np.allclose(part.values[part.mask], expected[part.mask], atol=1e-10)


def test_windowed_forward_zero_field(small_bcpw):
    win = Window(5, 20)
    assert not np.any(windowed_forward(np.zeros(20), small_bcpw, win).values)


@pytest.mark.parametrize("start, length", [(0, 40), (90, 50)])
def test_windowed_forward_matches_zero_extension(small_bcpw, rng, start, length):
    n = small_bcpw.grid.n
    win = Window(start, length)
    idx = win.indices(n)
    fw = rng.standard_normal(length)
    full = np.zeros(n)
    full[idx] = fw
    part = windowed_forward(fw, small_bcpw, win)
    ref = cpw_forward(full, small_bcpw).values
    assert np.allclose(part.values[part.mask], ref[part.mask], atol=1e-10)
    # members that miss the window see none of the field
    assert np.allclose(ref[~part.mask], 0.0, atol=1e-7)


def test_windowed_forward_shape_check(small_bcpw):
    with pytest.raises(ShapeMismatch):
        windowed_forward(np.zeros(3), small_bcpw, Window(0, 4))


# top-K ---------------------------------------------------------------------------


def test_fourier_basis_is_orthonormal():
    g = build_grid(10, 32)
    Phi = fourier_basis(g)
    assert Phi.shape == (32, 32)
    assert np.allclose(g.dx * Phi.T @ Phi, np.eye(32), atol=1e-12)


def test_full_k_reproduces_span(small_bcpw, rng):
    c = rng.standard_normal((small_bcpw.levels, small_bcpw.N0))
    f = cpw_inverse(coeffs(c, small_bcpw), small_bcpw)
    assert topk_error(f, small_bcpw, small_bcpw.size) <= 1e-8
    g = small_bcpw.grid
    assert fourier_topk_error(rng.standard_normal(g.n), g, g.n) <= 1e-8


def test_topk_nonincreasing(small_bcpw, rng):
    f = rng.standard_normal(small_bcpw.grid.n)
    errs = [topk_error(f, small_bcpw, K) for K in range(1, small_bcpw.size + 1, 3)]
    assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
    ferrs = [topk_error(f, "fourier", K, grid=small_bcpw.grid) for K in range(1, 128, 9)]
    assert all(b <= a + 1e-12 for a, b in zip(ferrs, ferrs[1:]))


def test_topk_errors(small_bcpw):
    f = np.zeros(small_bcpw.grid.n)
    with pytest.raises(KTooLarge):
        topk_error(f, small_bcpw, small_bcpw.size + 1)
    with pytest.raises(KTooLarge):
        fourier_topk_error(f, small_bcpw.grid, small_bcpw.grid.n + 1)
    with pytest.raises(ValueError):
        topk_error(f, small_bcpw, 0)
    with pytest.raises(ValueError):
        topk_error(f, "wavelet", 3, grid=small_bcpw.grid)


def test_topk_ties_keep_lower_index(small_bcpw):
    # equal weights on two members: K=1 keeps the lower (level, shift) one
    c = np.zeros((small_bcpw.levels, small_bcpw.N0))
    c[1, 4] = c[0, 6] = 1.0
    f = cpw_inverse(coeffs(c, small_bcpw), small_bcpw)
    residual = topk_error(f, small_bcpw, 1)
    assert residual == pytest.approx(1.0, abs=1e-8)
    kept_first = f - small_bcpw.member(1, 6)
    dx = small_bcpw.grid.dx
    assert np.sqrt(dx * kept_first @ kept_first) == pytest.approx(residual, abs=1e-8)
