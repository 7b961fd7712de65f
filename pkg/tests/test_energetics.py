import numpy as np
import pytest
from hypothesis import given, strategies as st

from fwlab.basis import BasisSpec
from fwlab.dynamics import fit_slope
from fwlab.energetics import (
    dirac_energy_operator_em,
    dirac_energy_operator_general,
    eev_direct,
    energy_operator_primed,
    energy_report,
    epsilon_rate,
    fw_energy_difference,
    nonequivalence_gap,
)
from fwlab.fields import PlaneWave, UniformStatic, UniformVectorPotential, sample
from fwlab.hamiltonians import ParticleParams, dirac_hamiltonian, dirac_parts, fw_hamiltonian_analytic
from fwlab.operator_core import Operator, StateVector, even_odd_split, expectation
from fwlab.scenarios import InitialState, RotationWaveform, _line, build, run
from fwlab.transforms import TimedUnitary, eriksen_timed
from fwlab.verify import random_dirac_type, random_state

SINGLE = BasisSpec("single_mode")


def sz_rotation(b, nu):
    sz = np.kron(np.diag(b.algebra.sigma[2].entries).real, np.ones(b.spatial_dim))
    u = lambda t: Operator(np.diag(np.exp(-0.5j * nu * t * sz)), b.tag)  # noqa: E731
    du = lambda t: Operator(np.diag(-0.5j * nu * sz * np.exp(-0.5j * nu * t * sz)), b.tag)  # noqa: E731
    return TimedUnitary(u), TimedUnitary(u, du)


def test_eev_direct_examples():
    b = BasisSpec("single_mode", momentum=(0, 0, 0.75))
    p = ParticleParams()
    hfw = fw_hamiltonian_analytic(sample(UniformStatic(), b, 0), p, b)
    up = StateVector(np.array([1, 0, 0, 0], complex), b.tag)
    assert eev_direct(hfw, up) == pytest.approx(1.25, abs=1e-15)
    B = 0.4
    hb = fw_hamiltonian_analytic(sample(UniformStatic(B0=(0, 0, B)), SINGLE, 0), p, SINGLE)
    up = StateVector(np.array([1, 0, 0, 0], complex), SINGLE.tag)
    assert eev_direct(hb, up) == pytest.approx(1.0 - p.mu0 * B, abs=1e-15)
    rng = np.random.default_rng(1)
    h, _ = random_dirac_type(rng, 3)
    w, v = np.linalg.eigh(h.entries)
    assert eev_direct(h, StateVector(v[:, 4], h.basis_tag)) == pytest.approx(w[4], abs=1e-13)


def test_energy_operator_primed_constant_u():
    rng = np.random.default_rng(2)
    h, beta = random_dirac_type(rng, 2)
    u = TimedUnitary(lambda t: beta)
    assert (energy_operator_primed(h, u, 0.3) - h).norm() < 1e-15


@given(st.integers(0, 2 ** 32 - 1))
def test_energy_operator_primed_restores_basic_expectation(seed):
    rng = np.random.default_rng(seed)
    h, _ = random_dirac_type(rng, 2)
    k = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    w, v = np.linalg.eigh((k + k.conj().T) / 4)
    u = TimedUnitary(lambda t: Operator((v * np.exp(-1j * np.sin(t) * w)) @ v.conj().T, h.basis_tag))
    t = 0.6
    psi = random_state(rng, 8, h.basis_tag)
    ut = u(t)
    h_primed = ut @ h @ ut.dag + (1j * (u.derivative(t) @ ut.dag))
    psi_p = psi.evolved(ut.entries)
    got = eev_direct(energy_operator_primed(h_primed, u, t), psi_p)
    assert got == pytest.approx(eev_direct(h, psi), abs=1e-8)


def test_nonequivalence_gap_examples():
    rng = np.random.default_rng(3)
    h, beta = random_dirac_type(rng, 2)
    psi = random_state(rng, 8, h.basis_tag)
    assert abs(nonequivalence_gap(h, TimedUnitary(lambda t: beta), psi, 0.2)) < 1e-14
    b = BasisSpec("line_grid", N=2)
    h = Operator(h.entries, b.tag, True)
    psi = StateVector(psi.amplitudes, b.tag)
    nu = 0.7
    sz = b.spinor(b.algebra.sigma[2])
    for hbar in (1.0, 0.3):
        fd, exact = sz_rotation(b, nu)
        for u in (fd, exact):
            gap = nonequivalence_gap(h, u, psi, 1.1, hbar=hbar)
            assert gap == pytest.approx(0.5 * hbar * nu * expectation(sz, psi).real, abs=1e-9)


def test_fw_energy_difference_static_is_zero():
    b = BasisSpec("single_mode", momentum=(0.3, 0.2, 0.1))
    d = fw_energy_difference(sample(UniformStatic(E0=(0.1, 0, 0), B0=(0, 0, 0.4)), b, 0),
                             ParticleParams(g=2.4, d_hat=0.2), b)
    assert d.norm() == 0


def test_fw_energy_difference_uniform_a_has_e_dot_term():
    b = BasisSpec("single_mode", momentum=(0.3, 0.2, 0.1))
    cfg = UniformVectorPotential(amplitude=(0.2, 0.1, 0.3), frequency=0.8)
    fs = sample(cfg, b, 0.7)
    assert fs.div_A_dot.norm() == 0
    d2 = fw_energy_difference(fs, ParticleParams(g=2.0), b)
    d3 = fw_energy_difference(fs, ParticleParams(g=2.6), b)
    beta = b.spinor(b.algebra.beta)
    extra = d3 - d2
    assert extra.norm() > 1e-4
    assert (beta @ extra - extra @ beta).norm() < 1e-15


def test_general_energy_operator_static_is_identity_map():
    rng = np.random.default_rng(4)
    h, beta = random_dirac_type(rng, 2)
    split = even_odd_split(h, beta)
    zero = h * 0.0
    out = dirac_energy_operator_general(h, split, zero, ParticleParams(), zero, beta)
    assert (out - h).norm() < 1e-14


def test_em_energy_operator_without_adot():
    b = BasisSpec("single_mode", momentum=(0.3, 0.2, 0.1))
    fs = sample(UniformStatic(B0=(0, 0, 0.3)), b, 0)
    h = dirac_hamiltonian(fs, ParticleParams(), b)
    assert (dirac_energy_operator_em(h, fs, ParticleParams(), b) - h).norm() < 1e-15


def _eq19_eq21(scenario, t=0.3):
    b, p, cfg, beta = scenario.basis, scenario.particle, scenario.fields, scenario.beta
    odd_of = lambda s: dirac_parts(sample(cfg, b, s), p, b)[1]  # noqa: E731
    h = dirac_hamiltonian(sample(cfg, b, t), p, b)
    step = 1e-5
    odot = (odd_of(t + step) - odd_of(t - step)) / (2 * step)
    e19 = dirac_energy_operator_general(h, even_odd_split(h, beta), odot, p,
                                        epsilon_rate(odd_of, t, p.m), beta)
    e21 = dirac_energy_operator_em(h, sample(cfg, b, t), p, b)
    return e19, e21


def test_general_and_em_forms_agree_for_uniform_a():
    e19, e21 = _eq19_eq21(build("uniform_A", particle=ParticleParams()))
    assert (e19 - e21).norm() <= 1e-8
    for op in (e19, e21):
        assert op.hermitian_defect() <= 1e-10 * op.norm()


def test_general_and_em_forms_differ_at_second_order_for_plane_wave():
    hs = (1.0, 0.5, 0.25)
    diffs = [(lambda a, b: (a - b).norm())(*_eq19_eq21(build("plane_wave", particle=ParticleParams(hbar=h))))
             for h in hs]
    assert fit_slope(hs, diffs) == pytest.approx(2.0, abs=0.1)


def test_plane_wave_gap_tracks_first_order_difference():
    """The reported gap approaches <fw_energy_difference> with an O(hbar^2) remainder."""
    errs, gaps = [], []
    for hbar in (0.5, 0.25, 0.125):
        sc = build("plane_wave", particle=ParticleParams(hbar=hbar), t_end=2.0, steps=10,
                   basis=_line(transverse=(0.1, 0.5)), state=InitialState(spin=(0, 0, 1), k0=1, width=1.0))
        res = run(sc)
        u_e = sc.eriksen()
        e, g = [], []
        for rep, psi in zip(res.reports, res.trajectory.states):
            psi_fw = psi.evolved(u_e(rep.t).entries, tol=1e-10)
            d = fw_energy_difference(sample(sc.fields, sc.basis, rep.t), sc.particle, sc.basis)
            e.append(abs(rep.gap - expectation(d, psi_fw).real))
            g.append(abs(rep.gap))
        errs.append(max(e))
        gaps.append(max(g))
    assert errs[-1] <= 0.03 * gaps[-1]
    assert fit_slope((0.5, 0.25, 0.125), errs) > 1.8
    assert fit_slope((0.5, 0.25, 0.125), gaps) == pytest.approx(1.0, abs=0.1)


def test_energy_report_static_scenario_is_constant():
    res = run(build("static_fields", t_end=5.0, steps=20))
    direct = np.array([r.eev_fw_direct for r in res.reports])
    assert np.abs(direct - direct[0]).max() <= 1e-10 * abs(direct[0])
    for r in res.reports:
        assert abs(r.gap) < 1e-9
        assert r.eev_primed_corrected == pytest.approx(r.eev_fw_direct, abs=1e-8)


def test_energy_report_rotating_frame_jz_eigenstate():
    b = BasisSpec("polar_modes", m_max=3, radial_momentum=0.5, axial_momentum=0.2)
    # -omega(t) <J_z> follows omega, so the columns are constant only for a steady rotation
    sc = build("rotating_frame", basis=b, state=InitialState(spin=(0, 0, 1)), t_end=2.0, steps=10,
               rotation=RotationWaveform(omega0=0.2, depth=0.0))
    res = run(sc)
    for col in ("eev_fw_direct", "eev_primed_naive", "eev_primed_corrected", "gap"):
        v = np.array([getattr(r, col) for r in res.reports])
        assert np.abs(v - v[0]).max() <= 1e-8


def test_energy_report_fields_are_consistent():
    sc = build("uniform_A", t_end=1.0, steps=4)
    h_of = sc.dirac_hamiltonian
    u_e = eriksen_timed(h_of, sc.beta)
    psi = sc.initial_dirac_state()
    rep = energy_report(0.0, psi, h_of(0.0), u_e, sc.beta, sc.particle.hbar)
    assert rep.gap == pytest.approx(rep.eev_primed_naive - rep.eev_primed_corrected, abs=1e-15)
    assert abs(rep.eev_primed_corrected - rep.eev_fw_direct) <= 1e-8
    # the i hbar dU_E/dt term is not block diagonal when U_E depends on time
    assert rep.odd_part_norm > 1e-6
    static = run(build("static_fields", t_end=1.0, steps=2))
    assert max(r.odd_part_norm for r in static.reports) <= 1e-10
