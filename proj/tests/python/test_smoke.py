import math

import numpy as np
import pytest

import phasespace as ps


@pytest.fixture(scope="module")
def grid():
    return ps.Grid(-8.0, 8.0, 128)


def test_grid_axes(grid):
    assert grid.n == 128
    assert grid.q[0] == -8.0
    assert grid.p.shape == (128,)
    assert grid.dp == pytest.approx(2 * math.pi / 16.0)
    with pytest.raises(ValueError):
        ps.Grid(-8.0, 8.0, 100)


def test_fock_one_wigner(grid):
    w = ps.wigner("fock:n=1", grid)
    v = w.values
    assert v.shape == (128, 128)
    assert w.kind == ps.Kind.Wigner
    assert w.integral() == pytest.approx(1.0, abs=1e-10)
    assert v[64, 64] == pytest.approx(-1.0 / math.pi, abs=1e-10)
    dq, dp, prod = ps.uncertainty(w)
    assert prod == pytest.approx(1.5, abs=1e-8)


def test_marginals_match_wavefunction(grid):
    psi = ps.wavefunction("coherent:re=1,im=0.5", grid)
    w = ps.wigner(psi)
    pos, mom = ps.marginals(w)
    assert np.max(np.abs(pos - np.abs(psi.psi) ** 2)) < 1e-10
    assert np.sum(mom) * grid.dp == pytest.approx(1.0, abs=1e-8)


def test_husimi_is_nonnegative(grid):
    w = ps.wigner("cat:alpha=2,theta=1.5707963267948966", grid)
    q = ps.husimi(w)
    assert q.kind == ps.Kind.Husimi
    assert q.values.min() > -1e-12
    assert w.values.min() < -0.05


def test_thermal_density_statistics():
    g = ps.Grid(-12.0, 12.0, 128)
    rho = ps.density("thermal:nbar=1", g)
    assert rho.trace().real == pytest.approx(1.0, abs=1e-8)
    assert ps.mandel_q(rho) == pytest.approx(1.0, abs=1e-4)
    w = ps.wigner(rho)
    assert ps.overlap(w, w) == pytest.approx(1.0 / 3.0, abs=1e-6)


def test_harmonic_evolution_is_rotation(grid):
    w = ps.wigner("coherent:re=1,im=0", ps.Grid(-10.0, 10.0, 64))
    quarter = ps.moyal_evolve(w, [0.0, 0.0, 0.5], math.pi / 2 / 400, 400)
    rot = ps.apply_symplectic(w, 0.0, 1.0, -1.0, 0.0)
    assert np.max(np.abs(quarter.values - rot.values)) < 1e-5


def test_tomography_round_trip(grid):
    w = ps.wigner("squeezed:re=0.5,im=0,s=2", grid)
    hist = ps.radon_project(w, ps.uniform_angles(64))
    assert hist.pr.shape[0] == 64
    rec = ps.inverse_radon(hist, grid)
    assert rec.integral() == pytest.approx(1.0, abs=1e-2)
    assert np.sqrt(np.mean((rec.values - w.values) ** 2)) < 1e-2


def test_leaking_state_raises():
    with pytest.raises(ps.NumericError):
        ps.wavefunction("fock:n=60", ps.Grid(-4.0, 4.0, 64))
    with pytest.raises(ValueError):
        ps.StateSpec("fock:n=-1")


def test_file_round_trip(tmp_path, grid):
    w = ps.wigner("fock:n=2", grid)
    for name in ("w.psq", "w.csv"):
        path = str(tmp_path / name)
        ps.save_grid(path, w)
        back = ps.load_grid(path)
        assert back.grid == grid
        assert np.array_equal(back.values, w.values)
    bad = tmp_path / "bad.psq"
    bad.write_bytes(b"PSQ1\x00")
    with pytest.raises(ps.IoError):
        ps.load_grid(str(bad))


def test_array_constructor(grid):
    v = np.zeros((grid.n, grid.n))
    v[64, 64] = 1.0 / (grid.dq * grid.dp)
    f = ps.PhaseSpaceFunction(grid, v)
    assert f.integral() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        ps.PhaseSpaceFunction(grid, np.zeros((4, 4)))
