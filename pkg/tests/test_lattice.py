import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compressed_modes.errors import (
    LengthMismatch,
    NonPositiveLength,
    OddOrTinyNodeCount,
    TabulatedLengthMismatch,
)
from compressed_modes.lattice import (
    PotentialSpec,
    apply_hamiltonian,
    assemble_hamiltonian,
    build_grid,
    eval_potential,
    inner,
    load_tabulated,
    minimum_image,
)


def test_grid_spacing():
    assert build_grid(50, 128).dx == 0.390625


def test_grid_nodes():
    g = build_grid(100, 512)
    assert g.nodes[0] == 0.0
    assert g.nodes[511] == pytest.approx(100 - 100 / 512, abs=1e-13)


@pytest.mark.parametrize("L, n, err", [(50, 127, OddOrTinyNodeCount), (50, 2, OddOrTinyNodeCount),
                                        (0, 128, NonPositiveLength), (-1, 128, NonPositiveLength)])
def test_grid_rejects(L, n, err):
    with pytest.raises(err):
        build_grid(L, n)


def test_free_potential_is_zero():
    assert not np.any(eval_potential(PotentialSpec.free(), build_grid(50, 128)))


def test_kronig_penney_at_well_center():
    # wells at 10, 20, 30, 40, 50 (= 0); from x = 10 the minimum-image distances are 0, 10, 20, 20, 10
    g = build_grid(50, 1000)
    V = eval_potential(PotentialSpec.kronig_penney(), g)
    expected = -(1 + 2 * math.exp(-100 / 18) + 2 * math.exp(-400 / 18))
    assert V[200] == pytest.approx(expected, abs=1e-12)
    assert V[200] == pytest.approx(-1.007732, abs=1e-6)


def test_impurity_doubles_the_site_term():
    g = build_grid(50, 1000)
    V = eval_potential(PotentialSpec.impurity_kronig_penney(impurity_site=3, impurity_factor=2.0), g)
    expected = -(2 + 2 * math.exp(-100 / 18) + 2 * math.exp(-400 / 18))
    assert V[600] == pytest.approx(expected, abs=1e-12)


def test_tabulated_length_mismatch(tmp_path):
    path = tmp_path / "v.txt"
    np.savetxt(path, np.zeros(10))
    spec = load_tabulated(path)
    with pytest.raises(TabulatedLengthMismatch):
        eval_potential(spec, build_grid(50, 128))


def test_tabulated_round_trip(tmp_path, rng):
    values = rng.standard_normal(64)
    path = tmp_path / "v.txt"
    np.savetxt(path, values, fmt="%.17g")
    out = eval_potential(load_tabulated(path), build_grid(10, 64))
    assert np.array_equal(out, values)


def test_constant_potential_shifts_spectrum():
    g = build_grid(20, 64)
    H0 = assemble_hamiltonian(g, np.zeros(64))
    Hc = assemble_hamiltonian(g, np.full(64, 0.7))
    assert np.allclose(np.linalg.eigvalsh(Hc.dense()), np.linalg.eigvalsh(H0.dense()) + 0.7, atol=1e-12)


@pytest.mark.parametrize("m", [0, 1, 5, 31])
def test_fd_symbol_on_plane_wave(m):
    g = build_grid(20, 64)
    H = assemble_hamiltonian(g, np.zeros(64))
    G = 2 * np.pi * m / g.L
    wave = np.cos(G * g.nodes)
    expected = (1 - np.cos(G * g.dx)) / g.dx**2
    assert np.allclose(H.apply(wave), expected * wave, atol=1e-10)


def test_spectral_symbol_on_plane_wave():
    g = build_grid(20, 64)
    H = assemble_hamiltonian(g, np.zeros(64), stencil="spectral")
    G = 2 * np.pi * 3 / g.L
    wave = np.sin(G * g.nodes)
    assert np.allclose(H.apply(wave), 0.5 * G**2 * wave, atol=1e-12)


def test_potential_length_mismatch():
    with pytest.raises(LengthMismatch):
        assemble_hamiltonian(build_grid(20, 64), np.zeros(63))
    H = assemble_hamiltonian(build_grid(20, 64), np.zeros(64))
    with pytest.raises(LengthMismatch):
        apply_hamiltonian(H, np.zeros(10))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), stencil=st.sampled_from(["fd", "spectral"]))
def test_hamiltonian_is_symmetric(seed, stencil):
    r = np.random.default_rng(seed)
    g = build_grid(30, 64)
    H = assemble_hamiltonian(g, eval_potential(PotentialSpec.kronig_penney(Nel=3), g), stencil)
    u, v = r.standard_normal((2, 64))
    assert inner(u, H.apply(v), g) == pytest.approx(inner(H.apply(u), v, g), rel=1e-10, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(d=st.floats(-1e3, 1e3), k=st.integers(-5, 5))
def test_minimum_image_is_periodic(d, k):
    L = 50.0
    a = minimum_image(d, L)
    b = minimum_image(d + k * L, L)
    assert -L / 2 <= a < L / 2
    assert a == pytest.approx(b, abs=1e-9)


def test_potential_invariant_under_relabeling():
    g = build_grid(50, 200)
    spec = PotentialSpec.kronig_penney(centers=(10, 20, 30, 40, 50))
    shifted = PotentialSpec.kronig_penney(centers=(60, 70, 80, 90, 100))
    assert np.allclose(eval_potential(spec, g), eval_potential(shifted, g), atol=1e-12)
