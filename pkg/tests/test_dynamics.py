import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fwlab.basis import BasisSpec
from fwlab.dynamics import (
    classical_spin_oracle,
    default_steps,
    fit_slope,
    hbar_scaling_study,
    propagate,
    rotation_z,
    spin_expectation,
    step_error_ratio,
    uniform_grid,
)
from fwlab.hamiltonians import ParticleParams, rotating_frame_fw_hamiltonian
from fwlab.numeric import NumericalPolicyError
from fwlab.operator_core import Operator, StateVector
from fwlab.scenarios import RotationWaveform, build
from fwlab.verify import random_dirac_type, random_state
from oracles import single_exponential

SINGLE = BasisSpec("single_mode")


def test_rest_state_phase():
    beta = SINGLE.spinor(SINGLE.algebra.beta) * 1.0
    psi0 = StateVector(np.array([1, 0, 0, 0], complex), SINGLE.tag)
    tr = propagate(beta, psi0, uniform_grid(3.0, 30), hbar=0.5)
    for t, s in zip(tr.times, tr.states):
        assert abs(s.amplitudes[0] - np.exp(-1j * t / 0.5)) < 1e-13
    assert tr.norm_defects().max() < 1e-14


@settings(max_examples=15)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.2, 2.0))
def test_constant_h_matches_single_exponential(seed, hbar):
    rng = np.random.default_rng(seed)
    h, _ = random_dirac_type(rng, 3)
    psi0 = random_state(rng, h.dim, h.basis_tag)
    tr = propagate(h, psi0, uniform_grid(2.0, 17), hbar=hbar)
    ref = single_exponential(h.entries, psi0.amplitudes, 2.0, hbar)
    assert np.linalg.norm(tr.states[-1].amplitudes - ref) <= 1e-10


def test_norm_drift_over_a_thousand_steps():
    rng = np.random.default_rng(11)
    h, _ = random_dirac_type(rng, 4)
    k = h.entries
    psi0 = random_state(rng, h.dim, h.basis_tag)
    h_t = lambda t: Operator(k * (1 + 0.3 * np.sin(t)), h.basis_tag, True)  # noqa: E731
    tr = propagate(h_t, psi0, uniform_grid(10.0, 1000))
    nd = tr.norm_defects()
    assert nd.max() <= 1e-9
    assert np.abs(np.diff(nd)).max() <= 1e-12


def test_second_order_convergence():
    rng = np.random.default_rng(12)
    h, beta = random_dirac_type(rng, 2)
    g = (beta @ h @ beta).entries
    h_t = lambda t: Operator(h.entries + 0.5 * np.sin(2 * t) * g, h.basis_tag, True)  # noqa: E731
    psi0 = random_state(rng, h.dim, h.basis_tag)
    e1, e2, ratio = step_error_ratio(h_t, psi0, 2.0, 40)
    assert 3.5 <= ratio <= 4.5
    propagate(h_t, psi0, uniform_grid(2.0, 40), check_convergence=True)
    with pytest.raises(NumericalPolicyError):
        propagate(h_t, psi0, uniform_grid(2.0, 2), check_convergence=True)


def test_energy_conservation_static():
    rng = np.random.default_rng(13)
    h, _ = random_dirac_type(rng, 4)
    psi0 = random_state(rng, h.dim, h.basis_tag)
    tr = propagate(h, psi0, uniform_grid(20.0, 200))
    e = np.array([np.vdot(s.amplitudes, h.entries @ s.amplitudes).real for s in tr.states])
    assert np.abs(e - e[0]).max() <= 1e-10 * abs(e[0])


def test_non_hermitian_and_bad_grids_rejected():
    rng = np.random.default_rng(14)
    psi0 = random_state(rng, 4, SINGLE.tag)
    with pytest.raises(NumericalPolicyError):
        propagate(lambda t: Operator(np.triu(np.ones((4, 4))), SINGLE.tag), psi0, uniform_grid(1, 2))
    with pytest.raises(ValueError):
        propagate(SINGLE.identity(), psi0, [0.0, 0.1, 0.3])
    with pytest.raises(ValueError):
        uniform_grid(1.0, 0)


def test_spin_expectation_examples():
    up = StateVector(np.array([1, 0, 0, 0], complex), SINGLE.tag)
    np.testing.assert_allclose(spin_expectation(up, SINGLE), [0, 0, 1])
    x = StateVector(np.array([1, 1, 0, 0], complex) / np.sqrt(2), SINGLE.tag)
    np.testing.assert_allclose(spin_expectation(x, SINGLE), [1, 0, 0], atol=1e-15)


@given(st.integers(0, 2 ** 32 - 1))
def test_spin_expectation_bounded(seed):
    b = BasisSpec("line_grid", N=4)
    psi = random_state(np.random.default_rng(seed), b.dim, b.tag)
    assert np.linalg.norm(spin_expectation(psi, b)) <= 1 + 1e-10


def test_default_steps_resolves_fastest_phase():
    h = SINGLE.spinor(SINGLE.algebra.beta) * 3.0
    n = default_steps(h, 10.0)
    assert 3.0 * 10.0 / n <= 0.1


def test_classical_oracle_examples():
    t = uniform_grid(5.0, 200)
    s = classical_spin_oracle(lambda tt: np.zeros(3), [0, 1, 0], t)
    assert np.abs(s - [0, 1, 0]).max() == 0
    w = 0.8
    s = classical_spin_oracle(lambda tt: [0, 0, w], [1, 0, 0], t)
    np.testing.assert_allclose(s, np.c_[np.cos(w * t), np.sin(w * t), 0 * t], atol=1e-8)
    wave = RotationWaveform(omega0=0.4, nu=1.3)
    s = classical_spin_oracle(lambda tt: -wave.vector(tt), [1, 0, 0], t)
    ang = -np.array([wave.angle(tt) for tt in t])
    np.testing.assert_allclose(s, np.c_[np.cos(ang), np.sin(ang), 0 * t], atol=1e-8)
    assert np.abs(np.linalg.norm(s, axis=1) - 1).max() <= 1e-10 * t[-1]
    with pytest.raises(ValueError):
        classical_spin_oracle(lambda tt: np.zeros(3), [1, 1, 0], t)


def test_rotating_frame_spin_follows_exact_rotation_polar():
    b = BasisSpec("polar_modes", m_max=4, radial_momentum=0.6, axial_momentum=0.3)
    p = ParticleParams()
    wave = RotationWaveform(omega0=0.5, nu=1.0)
    sc = build("rotating_frame", basis=b, rotation=wave)
    psi0 = sc.initial_fw_state()
    t = uniform_grid(3.0, 1000)
    tr = propagate(lambda s: rotating_frame_fw_hamiltonian(wave, b, p, s), psi0, t, basis=b)
    ref = np.stack([rotation_z(-wave.angle(tt)) @ tr.spin[0] for tt in t])
    assert np.abs(tr.spin - ref).max() <= 1e-6
    oracle = classical_spin_oracle(lambda s: -wave.vector(s), tr.spin[0], t)
    assert np.abs(tr.spin - oracle).max() <= 1e-6


def test_scaling_study_free_particle_is_flagged():
    sc = build("free_particle")
    study = hbar_scaling_study(sc, (1.0, 0.5, 0.25))
    assert set(study.at_floor) == {"eq19", "eq21", "eq16"}
    assert all(np.isnan(v) for v in study.slopes.values())


def test_scaling_study_validates_hbars():
    sc = build("plane_wave")
    with pytest.raises(ValueError):
        hbar_scaling_study(sc, (1.0, 0.5))
    with pytest.raises(ValueError):
        hbar_scaling_study(sc, (1.0, 0.5, 0.3))


def test_fit_slope():
    x = np.array([1, 0.5, 0.25])
    assert fit_slope(x, 3 * x ** 2) == pytest.approx(2.0)
