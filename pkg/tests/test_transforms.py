import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fwlab.basis import BasisSpec, momentum_operator
from fwlab.fields import PlaneWave, UniformStatic, sample
from fwlab.hamiltonians import ParticleParams, dirac_hamiltonian, dirac_parts, rotating_frame_fw_hamiltonian, \
    rotating_frame_hamiltonian, rotating_frame_parts
from fwlab.numeric import GapClosedError, NumericalPolicyError
from fwlab.operator_core import Operator, even_odd_split, hermitian_function
from fwlab.transforms import (
    TimedUnitary,
    check_eriksen_condition,
    eriksen_operator,
    eriksen_timed,
    exact_fw_condition_defect,
    exact_fw_hamiltonian,
    fw_time_derivative_operator,
    transform_hamiltonian,
    u1_operator,
    unitarity_defect,
)
from fwlab.verify import random_dirac_type
from oracles import free_fw_unitary

SINGLE = BasisSpec("single_mode")


def beta_of(b):
    return b.spinor(b.algebra.beta)


def free(p):
    b = BasisSpec("single_mode", momentum=p)
    return b, dirac_hamiltonian(sample(UniformStatic(), b, 0), ParticleParams(), b)


def test_constant_unitary_is_similarity():
    b, h = free((0.1, 0.2, 0.3))
    u = eriksen_operator(h, beta_of(b))
    out = transform_hamiltonian(h, TimedUnitary(lambda t: u), 0.5)
    assert (out - u @ h @ u.dag).norm() < 1e-12


def test_rotation_about_z_adds_spin_term():
    b = SINGLE
    theta = lambda t: 0.3 * t ** 2  # noqa: E731
    sz = np.diag(b.algebra.sigma[2].entries).real

    def u(t):
        return Operator(np.diag(np.exp(-0.5j * theta(t) * sz)), b.tag)

    h = beta_of(b)
    t = 0.8
    for hbar in (1.0, 0.25):
        out = transform_hamiltonian(h, TimedUnitary(u), t, hbar=hbar)
        expect = h + b.spinor(b.algebra.sigma[2]) * (0.5 * hbar * 0.6 * t)
        assert (out - expect).norm() < 1e-9


@pytest.mark.parametrize("p", [(0, 0, 0.75), (0.3, -0.4, 1.2), (2.0, 1.0, -0.5)])
def test_eriksen_free_particle_closed_form(p):
    b, h = free(p)
    u = eriksen_operator(h, beta_of(b))
    ref = free_fw_unitary(p)
    assert np.abs(u.entries - ref).max() < 1e-14
    eps = np.sqrt(1 + np.dot(p, p))
    assert (u @ h @ u.dag - beta_of(b) * eps).norm() < 1e-13


def test_eriksen_rest_frame_is_identity():
    u = eriksen_operator(beta_of(SINGLE) * 2.0, beta_of(SINGLE))
    assert (u - SINGLE.identity()).norm() < 1e-15


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 8))
def test_eriksen_invariants_random(seed, n):
    rng = np.random.default_rng(seed)
    h, beta = random_dirac_type(rng, n)
    u = eriksen_operator(h, beta)
    hfw = u @ h @ u.dag
    assert unitarity_defect(u) <= 1e-12
    assert check_eriksen_condition(u, beta) <= 1e-12
    assert even_odd_split(hfw, beta).odd.norm() <= 1e-10 * h.norm()
    np.testing.assert_allclose(np.linalg.eigvalsh(hfw.hermitian_part().entries),
                               np.linalg.eigvalsh(h.entries), atol=1e-10 * h.norm())


def test_positive_energy_maps_to_upper_components():
    rng = np.random.default_rng(5)
    h, beta = random_dirac_type(rng, 4)
    w, v = np.linalg.eigh(h.entries)
    lam = hermitian_function(h, np.sign)
    proj = (lam + 1.0) * 0.5
    assert (proj @ h - h @ proj).norm() <= 1e-10 * h.norm()
    u = eriksen_operator(h, beta).entries
    pos = u @ v[:, w > 0]
    lower = pos.reshape(4, 4, -1)[2:]
    assert np.linalg.norm(lower) <= 1e-10


def test_eriksen_condition_examples():
    assert check_eriksen_condition(SINGLE.identity(), beta_of(SINGLE)) == 0.0
    beta = beta_of(SINGLE)
    # odd generator: condition holds although U is not the Eriksen operator of anything given
    g = SINGLE.spinor(SINGLE.algebra.alpha[0]) * 0.4 + SINGLE.spinor(SINGLE.algebra.gamma[1]) * 0.3j
    g = g.hermitian_part()
    w, v = np.linalg.eigh(g.entries)
    u_odd = Operator((v * np.exp(1j * w)) @ v.conj().T, SINGLE.tag)
    assert check_eriksen_condition(u_odd, beta) < 1e-15
    # even phase exp(i eps beta): defect 2|sin eps|, so the condition detects even generators
    eps = 0.3
    u_even = Operator(np.cos(eps) * np.eye(4) + 1j * np.sin(eps) * beta.entries, SINGLE.tag)
    assert check_eriksen_condition(u_even, beta) == pytest.approx(2 * abs(np.sin(eps)), rel=1e-14)


def test_gap_closure_is_reported():
    b = SINGLE
    h = beta_of(b) @ b.spinor(b.algebra.sigma[2]) * 0.5 + b.spinor(b.algebra.sigma[2]) * 0.5
    with pytest.raises(GapClosedError):
        eriksen_operator(h, beta_of(b))


def test_u1_examples():
    b, h = free((0.3, 0.1, 0.6))
    beta = beta_of(b)
    u1 = u1_operator(h, beta, 1.0)
    assert (u1 - eriksen_operator(h, beta)).norm() < 1e-14
    assert even_odd_split(u1 @ h @ u1.dag, beta).odd.norm() < 1e-14
    assert (u1_operator(beta * 1.0, beta, 1.0) - b.identity()).norm() < 1e-15


def test_u1_residual_odd_part_scales_with_hbar():
    ratios = []
    for hbar in (0.1, 0.05):
        b = BasisSpec("single_mode", momentum=(0.3, 0.0, 0.4), hbar=hbar)
        p = ParticleParams(g=2.5, d_hat=0.3, hbar=hbar)
        h = dirac_hamiltonian(sample(UniformStatic(E0=(0.2, 0, 0.1), B0=(0, 0.3, 0.5)), b, 0), p, b)
        beta = beta_of(b)
        u1 = u1_operator(h, beta, p.m)
        resid = even_odd_split(u1 @ h @ u1.dag, beta).odd.norm()
        ratios.append(resid / even_odd_split(h, beta).odd.norm())
    assert ratios[0] / ratios[1] == pytest.approx(2.0, rel=0.05)


def test_exact_fw_condition_examples():
    b, h = free((0.1, 0.2, 0.3))
    s = even_odd_split(h, beta_of(b))
    assert exact_fw_condition_defect(s.even - beta_of(b), s.odd, s.odd * 0.0) < 1e-15
    line = BasisSpec("line_grid", N=8, box_length=2 * np.pi * 4)
    wave = PlaneWave(E0=(0.3, 0, 0), omega=2 * np.pi / line.box_length)
    p = ParticleParams()
    e, o = dirac_parts(sample(wave, line, 0.5), p, line)
    step = 1e-5
    odot = (dirac_parts(sample(wave, line, 0.5 + step), p, line)[1]
            - dirac_parts(sample(wave, line, 0.5 - step), p, line)[1]) / (2 * step)
    assert exact_fw_condition_defect(e, o, odot) > 1e-3


def test_exact_fw_condition_rotating_frame_polar():
    b = BasisSpec("polar_modes", m_max=4, radial_momentum=0.5, axial_momentum=0.2)
    _, even, odd = rotating_frame_parts(0.2, b, ParticleParams(), 0.0)
    assert exact_fw_condition_defect(even, odd, odd * 0.0) <= 1e-10


def test_exact_fw_hamiltonian_free_and_warning():
    b, h = free((0, 0.6, 0.8))
    s = even_odd_split(h, beta_of(b))
    even = s.even - beta_of(b)
    hfw = exact_fw_hamiltonian(even, s.odd, beta_of(b), 1.0, odd_dot=s.odd * 0.0)
    assert (hfw - beta_of(b) * np.sqrt(2.0)).norm() < 1e-14
    with pytest.warns(RuntimeWarning):
        exact_fw_hamiltonian(b.spinor(b.algebra.sigma[0]) * 0.3, s.odd, beta_of(b), 1.0, odd_dot=s.odd * 0.0)


def test_polar_modes_rotating_frame_is_exact():
    b = BasisSpec("polar_modes", m_max=6, radial_momentum=0.7, axial_momentum=0.4)
    p = ParticleParams()
    w = lambda t: 0.1 * (1 + 0.5 * np.sin(1.3 * t))  # noqa: E731
    beta = beta_of(b)
    u_e = eriksen_timed(lambda t: rotating_frame_hamiltonian(w, b, p, t), beta)
    for t in (0.0, 0.9, 2.2):
        h = rotating_frame_hamiltonian(w, b, p, t)
        u = u_e(t)
        got = u @ h @ u.dag
        ref = rotating_frame_fw_hamiltonian(w, b, p, t)
        assert (got - ref).norm() <= 1e-12 * ref.norm()
        assert fw_time_derivative_operator(u_e, t).norm() <= 1e-8


def test_plane_wave_time_derivative_correction_nonzero():
    line = BasisSpec("line_grid", N=8, box_length=2 * np.pi * 4)
    wave = PlaneWave(E0=(0.3, 0, 0), omega=2 * np.pi / line.box_length)
    p = ParticleParams()
    u_e = eriksen_timed(lambda t: dirac_hamiltonian(sample(wave, line, t), p, line), beta_of(line))
    corr = fw_time_derivative_operator(u_e, 0.4)
    assert corr.norm() > 1e-4
    # Hermitian up to the central-difference error of dU/dt
    assert corr.hermitian_defect() <= 1e-7 * corr.norm()


def test_form_disagreement_is_policed():
    rng = np.random.default_rng(9)
    ek, eg = (np.linalg.eigh(5 * (a + a.conj().T)) for a in
              (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(2)))

    def u(t):
        m1 = (ek[1] * np.exp(-1j * t * ek[0])) @ ek[1].conj().T
        m2 = (eg[1] * np.exp(-1j * np.sin(t) * eg[0])) @ eg[1].conj().T
        return Operator(m1 @ m2, SINGLE.tag)

    with pytest.raises(NumericalPolicyError):
        transform_hamiltonian(beta_of(SINGLE), TimedUnitary(u, fd_step=0.05), 0.0)
    with pytest.raises(NumericalPolicyError):
        TimedUnitary(lambda t: beta_of(SINGLE) * 2.0)(0.0)
