"""Propagation, potential traces and ensemble aggregation."""

import numpy as np
import pytest

from chiralsep.hamiltonian import CouplingMatrix, LevelIndex
from chiralsep.propagate import (
    MismatchedGridError,
    PotentialTrace,
    StepTooLargeError,
    components,
    default_dt,
    ensemble_average,
    ensemble_potential_trace,
    node_potential,
    potential_trace,
    prepare_initial,
    propagate,
)
from chiralsep.rotbasis import RotState


def two_level(omega, delta):
    basis = (LevelIndex(1, RotState(0, 0, 0)), LevelIndex(2, RotState(1, 0, 0)))
    return CouplingMatrix(
        basis=basis,
        fin=np.array([1]),
        ini=np.array([0]),
        omega=np.array([omega], dtype=complex),
        delta=np.array([delta], dtype=float),
    )


def triangle(omegas, deltas):
    basis = tuple(LevelIndex(v, RotState(0, 0, 0)) for v in (1, 2, 3))
    return CouplingMatrix(
        basis=basis,
        fin=np.array([1, 2, 2]),
        ini=np.array([0, 1, 0]),
        omega=np.asarray(omegas, dtype=complex),
        delta=np.asarray(deltas, dtype=float),
    )


def test_resonant_rabi_oscillation():
    omega = 0.8
    h = two_level(omega, 0.0)
    times, traj = propagate(h, np.array([1.0, 0.0]), t_end=3.0, n_out=301)
    p = np.abs(traj[:, 1]) ** 2
    assert np.max(np.abs(p - np.sin(2 * np.pi * omega * times) ** 2)) < 1e-12
    # full transfer at t = 1/(4 omega) under the 2*pi*f*t phase convention
    _, traj = propagate(h, np.array([1.0, 0.0]), t_end=1 / (4 * omega), n_out=2)
    assert abs(traj[-1, 1]) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_detuned_rabi_oscillation():
    omega, delta = 0.6, 0.9
    h = two_level(omega, delta)
    times, traj = propagate(h, np.array([1.0, 0.0]), t_end=5.0, n_out=501)
    omega_r = np.hypot(omega, delta / 2)
    expected = (omega / omega_r) ** 2 * np.sin(2 * np.pi * omega_r * times) ** 2
    assert np.max(np.abs(np.abs(traj[:, 1]) ** 2 - expected)) < 1e-12


def test_midpoint_matches_static():
    h = triangle([0.5, 0.3, 0.2j], [0.4, -0.1, 0.3])
    psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    times, a = propagate(h, psi0, t_end=4.0, n_out=81, method="static")
    _, b = propagate(h, psi0, t_end=4.0, n_out=81, method="midpoint", dt=2e-4)
    assert np.max(np.abs(a - b)) < 1e-7
    norms = np.linalg.norm(b, axis=1)
    assert np.max(np.abs(norms - 1.0)) < 1e-9


def test_midpoint_step_guard():
    h = two_level(1.0, 5.0)
    with pytest.raises(StepTooLargeError):
        propagate(h, np.array([1.0, 0.0]), t_end=1.0, method="midpoint", dt=0.05)
    with pytest.raises(ValueError):
        propagate(h, np.array([1.0, 0.0]), t_end=1.0, method="nonsense")


def test_node_potential_existence():
    # detunings closing around the triangle admit a node potential
    h = triangle([0.5, 0.3, 0.2], [0.4, -0.1, 0.3])
    f = node_potential(h)
    assert f is not None
    assert np.allclose(f[h.fin] - f[h.ini], h.delta, atol=1e-12)
    # non-closing loop detunings do not
    h2 = triangle([0.5, 0.3, 0.2], [0.4, -0.1, 0.7])
    assert node_potential(h2) is None
    with pytest.raises(ValueError):
        propagate(h2, np.array([1.0, 0, 0]), t_end=1.0, method="static")


def test_default_dt_resolves_fastest_scale():
    h = two_level(0.2, 3.0)
    assert default_dt(h) == pytest.approx(1 / 60.0)


def test_components_partition():
    basis = tuple(LevelIndex(v, RotState(0, 0, 0)) for v in (1, 2, 3))
    h = CouplingMatrix(basis=basis, fin=np.array([1]), ini=np.array([0]),
                       omega=np.array([1.0 + 0j]), delta=np.array([0.0]))
    comps = components(h)
    assert sorted(len(c) for c in comps) == [1, 2]


def test_potential_trace_matches_direct_expectation():
    h = triangle([0.5, 0.3, 0.2j], [0.4, -0.1, 0.3])
    psi0 = np.array([1.0, 1.0, 0.0], dtype=complex) / np.sqrt(2)
    times, traj = propagate(h, psi0, t_end=2.0, n_out=41)
    tr = potential_trace(h, times, traj, omega_ref=0.5)
    k = 17
    direct = np.vdot(traj[k], h.evaluate(times[k]) @ traj[k]).real / 0.5
    assert tr.values[k] == pytest.approx(direct, abs=1e-14)
    assert tr.time_average == pytest.approx(np.mean(tr.values), abs=1e-15)


def test_ensemble_trace_equals_weighted_pure_states():
    h = triangle([0.5, 0.3, 0.2j], [0.4, -0.1, 0.3])
    members = [
        (0.25, np.array([1.0, 0.0, 0.0], dtype=complex)),
        (0.75, np.array([0.0, 1.0, 1.0], dtype=complex) / np.sqrt(2)),
    ]
    times = np.linspace(0.0, 3.0, 61)
    fast = ensemble_potential_trace(h, members, times)
    slow = []
    for w, psi0 in members:
        _, traj = propagate(h, psi0, times[-1], n_out=len(times))
        slow.append((w, potential_trace(h, times, traj)))
    ref = ensemble_average(slow)
    assert np.max(np.abs(fast.values - ref.values)) < 1e-12


def test_ensemble_trace_midpoint_fallback():
    # loop detunings that close no node potential force the generic stepper
    h = triangle([0.5, 0.3, 0.2], [0.4, -0.1, 0.7])
    members = [(1.0, np.array([1.0, 0.0, 0.0], dtype=complex))]
    times = np.linspace(0.0, 1.0, 21)
    tr = ensemble_potential_trace(h, members, times)
    _, traj = propagate(h, members[0][1], 1.0, n_out=21, method="midpoint")
    ref = potential_trace(h, times, traj)
    assert np.max(np.abs(tr.values - ref.values)) < 1e-10


def test_prepare_initial_modes():
    h = triangle([0.5, 0.3, 0.2], [0.0, 0.0, 0.0])
    thermal = {RotState(0, 0, 0): 1.0}
    diab = prepare_initial("diabatic", h, thermal)
    assert len(diab) == 1 and diab[0][1][0] == 1.0
    amps = np.array([1.0, 1.0, 0.0]) / np.sqrt(2)
    part = prepare_initial("partially-dressed", h, thermal, vib_amplitudes=amps)
    assert np.allclose(part[0][1], [amps[0], amps[1], 0.0])
    adia = prepare_initial("adiabatic", h, thermal)
    vals, vecs = np.linalg.eigh(h.evaluate(0.0))
    overlaps = np.abs(vecs.conj().T @ adia[0][1])
    assert np.max(overlaps) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        prepare_initial("partially-dressed", h, thermal)
    with pytest.raises(ValueError):
        prepare_initial("sudden", h, thermal)


def test_ensemble_average_grid_check():
    a = PotentialTrace.from_values(np.linspace(0, 1, 5), np.zeros(5))
    b = PotentialTrace.from_values(np.linspace(0, 2, 5), np.zeros(5))
    with pytest.raises(MismatchedGridError):
        ensemble_average([(0.5, a), (0.5, b)])
    with pytest.raises(ValueError):
        ensemble_average([])
