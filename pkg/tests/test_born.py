"""Quadratic-density pipeline: velocity extraction, gauge and conjugate
symmetries, phase reconstruction, and continuity-only transport."""

import numpy as np
import pytest

from stochflow.analytic import FreePacket
from stochflow.born import (
    born_pipeline,
    conjugate_velocity_from_wavefunction,
    density_from_wavefunction,
    evolve_density_continuity,
    madelung_wavefunction,
    normalize_wavefunction,
    velocity_from_wavefunction,
)
from stochflow.fields import GridSpec, ScalarField, integrate
from stochflow.schrodinger import SchrodingerProblem


@pytest.fixture(scope="module")
def packet_setup():
    grid = GridSpec(dim=1, length=24.0, n=256)
    pk = FreePacket(b=1.0, x0=11.0, s=1.0, k0=2 * np.pi * 4 / 24.0)
    return grid, pk


def test_velocity_extraction_matches_analytic(packet_setup):
    grid, pk = packet_setup
    t = 0.4
    psi = ScalarField(grid, pk.psi(grid.axis, t))
    dec = velocity_from_wavefunction(psi, pk.b)
    m = dec.mask
    assert dec.coverage > 0.5
    # compare away from the node floor, where the 1/|psi| amplification of
    # round-off in the spectral derivative is negligible
    safe = np.abs(psi.values) > 1e-4 * np.abs(psi.values).max()
    assert np.max(np.abs(dec.current.values[safe] - pk.current_velocity(grid.axis, t)[safe])) < 1e-9
    assert np.max(np.abs(dec.osmotic.values[safe] - pk.osmotic_velocity(grid.axis, t)[safe])) < 1e-9
    # masked-out points carry zero velocity by policy
    assert np.all(dec.complex_velocity.values[~m] == 0)


def test_conjugate_extraction_mirrors_forward(packet_setup):
    grid, pk = packet_setup
    t = 0.4
    psi = ScalarField(grid, pk.psi(grid.axis, t))
    fwd = velocity_from_wavefunction(psi, pk.b)
    bwd = conjugate_velocity_from_wavefunction(psi.conj(), pk.b)
    safe = np.abs(psi.values) > 1e-4 * np.abs(psi.values).max()
    # U = V*: identical current velocity, opposite osmotic sign convention
    assert np.max(np.abs(
        bwd.complex_velocity.values[safe] - np.conj(fwd.complex_velocity.values[safe])
    )) < 1e-10
    assert np.max(np.abs(bwd.current.values[safe] - fwd.current.values[safe])) < 1e-10
    assert np.max(np.abs(bwd.osmotic.values[safe] + fwd.osmotic.values[safe])) < 1e-10


def test_normalization_gauge_branch(packet_setup):
    # h F / sqrt(|h|^2 q) has unit norm and the same density for any h != 0
    grid, pk = packet_setup
    raw = ScalarField(grid, 2.3 * pk.psi(grid.axis, 0.0))
    base, q = normalize_wavefunction(raw)
    assert q == pytest.approx(2.3**2, rel=1e-10)
    assert float(np.real(integrate(base.abs2()))) == pytest.approx(1.0, abs=1e-12)
    for h in (1.0, -2.0, 0.5 + 1.2j):
        gauged, _ = normalize_wavefunction(raw, h)
        assert np.max(np.abs(gauged.abs2().values - base.abs2().values)) < 1e-12


def test_madelung_roundtrip(packet_setup):
    # at t = 0 the packet's current velocity is the constant b^2 k0, whose
    # circulation is the exact integer winding k0 L / 2 pi = 4
    grid, pk = packet_setup
    x = grid.axis
    rho = ScalarField(grid, pk.density(x, 0.0))
    v = ScalarField(grid, pk.current_velocity(x, 0.0).astype(np.complex128))
    rebuilt = madelung_wavefunction(rho, v, pk.b)
    # density is reproduced exactly, the current velocity spectrally
    assert np.max(np.abs(rebuilt.abs2().values - rho.values)) < 1e-13
    dec = velocity_from_wavefunction(rebuilt, pk.b)
    safe = np.abs(rebuilt.values) > 1e-6 * np.abs(rebuilt.values).max()
    assert np.max(np.abs(dec.current.values[safe] - v.values[safe].real)) < 1e-8
    assert dec.current.values[safe].mean() == pytest.approx(pk.b**2 * pk.k0, rel=1e-8)


def test_madelung_rejects_fractional_winding(packet_setup):
    grid, pk = packet_setup
    rho = ScalarField(grid, np.full(grid.n, 1.0 / grid.length))
    bad_v = ScalarField(grid, np.full(grid.n, 0.37))  # not a whole mode
    with pytest.raises(ValueError):
        madelung_wavefunction(rho, bad_v, 1.0)


def test_continuity_transport_uniform_advection():
    # constant velocity translates the profile: rho(x, t) = rho0(x - ct)
    grid = GridSpec(dim=1, length=2 * np.pi, n=128)
    x = grid.axis
    c, T, dt = 0.8, 1.0, 1e-3
    n_steps = round(T / dt)
    rho0 = ScalarField(grid, 1 + 0.5 * np.cos(x))
    v = np.full((n_steps + 1, grid.n), c)
    history = evolve_density_continuity(rho0, v, dt)
    exact = 1 + 0.5 * np.cos(x - c * T)
    assert np.max(np.abs(history[-1] - exact)) < 1e-6
    mass = history.sum(axis=1) * grid.dx
    assert np.max(np.abs(mass - mass[0])) < 1e-12


def test_born_pipeline_free_packet_small(packet_setup):
    grid, pk = packet_setup
    psi0 = ScalarField(grid, pk.psi(grid.axis, 0.0))
    prob = SchrodingerProblem(grid=grid, b=pk.b, psi0=psi0)
    rep = born_pipeline(prob, 0.25, 1 / 1024)
    assert rep.sup_relative_error < 1e-4
    assert rep.mass_drift < 1e-10
    assert rep.norm_drift < 1e-10
    assert rep.q_initial == pytest.approx(1.0, abs=1e-9)
    assert rep.fp_forward.l_inf < 1e-3
    assert rep.fp_conjugate.l_inf < 1e-3
    assert rep.osmotic.l_inf < 1e-3
    assert rep.min_coverage > 0.5
    # the discrepancy series starts at zero and stays bounded
    assert rep.discrepancy_series[0, 1] < 1e-14
    assert rep.discrepancy_series.shape[1] == 3


def test_born_pipeline_requires_enough_snapshots(packet_setup):
    grid, pk = packet_setup
    psi0 = ScalarField(grid, pk.psi(grid.axis, 0.0))
    prob = SchrodingerProblem(grid=grid, b=pk.b, psi0=psi0)
    with pytest.raises(ValueError):
        born_pipeline(prob, 1e-3, 1e-3)  # a single step cannot be analysed


def test_density_from_wavefunction_is_squared_modulus(packet_setup):
    grid, pk = packet_setup
    psi = ScalarField(grid, pk.psi(grid.axis, 0.2))
    rho = density_from_wavefunction(psi)
    assert np.max(np.abs(rho.values - np.abs(psi.values) ** 2)) < 1e-15
    assert rho.is_real()
