"""Energy expectation values across representations.

The FW representation is the basic one: there the Hamiltonian is the energy
operator. In any other representation reached by ``U`` (FW -> primed) the
energy operator is ``H' - i hbar (dU/dt) U^-1``, which differs from ``H'`` when
``U`` depends on time. For the Dirac representation ``U = U_E^-1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import BasisSpec
from .fields import FieldSample
from .hamiltonians import (
    ParticleParams,
    _cross,
    _dot,
    kinetic_functions,
    spinor_vector,
)
from .numeric import DEFAULT_POLICY, NumericalPolicyError, NumericPolicy
from .operator_core import (
    EvenOddSplit,
    Operator,
    StateVector,
    anticommutator,
    commutator,
    even_odd_split,
    expectation,
    spectrum,
)
from .transforms import (
    TimedUnitary,
    eriksen_operator,
    transform_hamiltonian,
    transform_hamiltonian_forms,
)

__all__ = [
    "EnergyReport",
    "eev_direct",
    "energy_operator_primed",
    "nonequivalence_gap",
    "gap_forms",
    "fw_energy_difference",
    "epsilon_operator",
    "epsilon_rate",
    "dirac_energy_operator_general",
    "dirac_energy_operator_em",
    "exact_dirac_energy_operator",
    "exact_fw_energy_difference",
    "energy_report",
]


@dataclass(frozen=True)
class EnergyReport:
    t: float
    eev_fw_direct: float
    eev_primed_naive: float
    eev_primed_corrected: float
    gap: float
    odd_part_norm: float = 0.0


def _real(z: complex, scale: float, what: str) -> float:
    if abs(z.imag) > 1e-10 * max(abs(z.real), 1.0):
        raise NumericalPolicyError(f"{what} has imaginary residue {z.imag:.3e}")
    return float(z.real)


def eev_direct(h: Operator, psi: StateVector) -> float:
    """``<psi|H|psi>``; the energy only when ``H``, ``psi`` are in the FW representation."""
    z = expectation(h, psi)
    return _real(z, abs(z), "energy expectation")


def energy_operator_primed(
    h_primed: Operator, u: TimedUnitary, t: float, hbar: float = 1.0
) -> Operator:
    """``H' - i hbar (dU/dt) U^-1`` for ``U`` mapping the basic representation to the primed one."""
    return (h_primed - (1j * hbar) * (u.derivative(t) @ u(t).dag)).hermitian_part()


def gap_forms(u: TimedUnitary, psi_primed: StateVector, t: float, hbar: float = 1.0):
    """``(i hbar <(dU) U^-1>, -i hbar <U d(U^-1)>)`` in the primed state; equal analytically."""
    ut = u(t)
    direct = expectation((1j * hbar) * (u.derivative(t) @ ut.dag), psi_primed)
    inverse = expectation((-1j * hbar) * (ut @ u.inverse_derivative(t)), psi_primed)
    return direct, inverse


def nonequivalence_gap(
    h: Operator,
    u: TimedUnitary,
    psi: StateVector,
    t: float,
    hbar: float = 1.0,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> float:
    """``<psi'|H'|psi'> - <psi|H|psi>`` with ``psi' = U psi``.

    ``H'`` is built from the ``U d(U^-1)/dt`` form; the result is checked
    against the ``(dU/dt) U^-1`` form of the same difference.
    """
    ut = u(t)
    psi_p = psi.evolved(ut.entries, tol=max(psi.tol, 1e-10))
    h_primed, _ = transform_hamiltonian_forms(h, u, t, hbar)
    # a finite-difference derivative leaves an O(step^2) anti-Hermitian residue in H'
    measured = expectation(h_primed.hermitian_part(), psi_p) - expectation(h, psi)
    direct, inverse = gap_forms(u, psi_p, t, hbar)
    scale = max(abs(direct), 1.0)
    if abs(direct - inverse) > policy.form_agreement_tol * scale:
        raise NumericalPolicyError(
            f"gap forms disagree: {direct} vs {inverse} (derivative step too large)"
        )
    if abs(measured - direct) > policy.form_agreement_tol * scale:
        raise NumericalPolicyError(f"measured gap {measured} != {direct}")
    return _real(measured, abs(measured), "nonequivalence gap")


def fw_energy_difference(fields: FieldSample, p: ParticleParams, basis: BasisSpec) -> Operator:
    """Even part of ``H~_FW - H_FW`` that the Dirac-is-basic assumption would imply."""
    kf = kinetic_functions(fields, p, basis)
    pi = kf.pi
    Sigma = spinor_vector(basis, "sigma")
    beta = basis.spinor(basis.algebra.beta)
    a_dot, e_dot, b_dot = fields.A_dot, fields.E_dot, fields.B_dot
    first = _dot(Sigma, _cross(pi, a_dot)) - _dot(Sigma, _cross(a_dot, pi)) - p.hbar * fields.div_A_dot
    coeff = (p.mu0 * p.m) * kf.inv_eps_eps_m
    second = p.mu_prime * (_dot(pi, e_dot) + _dot(e_dot, pi)) - p.d * (_dot(pi, b_dot) + _dot(b_dot, pi))
    out = 0.25 * anticommutator(coeff, first) + (p.hbar / 8.0) * (
        beta @ anticommutator(kf.inv_eps_eps_m, second)
    )
    return out.as_hermitian(1e-10)


def epsilon_operator(odd: Operator, mass: float, policy: NumericPolicy = DEFAULT_POLICY) -> Operator:
    """``sqrt(m^2 + O^2)``."""
    sp = spectrum((odd @ odd).as_hermitian(1e-10), policy)
    return sp.apply(lambda x: np.sqrt(mass * mass + np.clip(x, 0.0, None)))


def epsilon_rate(
    odd_of_t: Callable[[float], Operator], t: float, mass: float, step: float = DEFAULT_POLICY.fd_step
) -> Operator:
    """Central difference of ``eps(t) = sqrt(m^2 + O(t)^2)``."""
    plus = epsilon_operator(odd_of_t(t + step), mass)
    minus = epsilon_operator(odd_of_t(t - step), mass)
    return ((plus - minus) / (2.0 * step)).hermitian_part()


def dirac_energy_operator_general(
    h_dirac: Operator,
    split: EvenOddSplit,
    odd_dot: Operator,
    p: ParticleParams,
    eps_dot: Operator,
    beta: Operator,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> Operator:
    """Dirac-representation energy operator to first order in ``hbar`` for any ``beta m + E + O``."""
    odd, m = split.odd, p.m
    sp = spectrum((odd @ odd).as_hermitian(1e-10), policy)
    eps = sp.apply(lambda x: np.sqrt(m * m + np.clip(x, 0.0, None)))
    inv = sp.apply(
        lambda x: 1.0 / (np.sqrt(m * m + np.clip(x, 0.0, None))
                         * (np.sqrt(m * m + np.clip(x, 0.0, None)) + m))
    )
    inner = (
        beta @ anticommutator(eps, odd_dot)
        + (2.0 * m) * (beta @ odd_dot)
        - beta @ anticommutator(eps_dot, odd)
        + commutator(odd, odd_dot)
    )
    return (h_dirac + (1j * p.hbar / 8.0) * anticommutator(inv, inner)).as_hermitian(1e-10)


def dirac_energy_operator_em(
    h_dirac: Operator, fields: FieldSample, p: ParticleParams, basis: BasisSpec
) -> Operator:
    """Electromagnetic specialization: only ``dA/dt`` enters at this order."""
    kf = kinetic_functions(fields, p, basis)
    pi, a_dot, m = kf.pi, fields.A_dot, p.m
    gamma = spinor_vector(basis, "gamma")
    Sigma = spinor_vector(basis, "sigma")
    g_adot = _dot(gamma, a_dot)
    g_pi = _dot(gamma, pi)
    first = (
        (-1j) * anticommutator(kf.eps, g_adot)
        - (2j * m) * g_adot
        + _dot(Sigma, _cross(pi, a_dot))
        - _dot(Sigma, _cross(a_dot, pi))
    )
    second = _dot(pi, a_dot) @ g_pi + g_pi @ _dot(a_dot, pi)
    k = p.e * p.hbar / 8.0
    out = h_dirac + k * anticommutator(kf.inv_eps_eps_m, first) + (1j * k) * anticommutator(
        kf.inv_eps2_eps_m, second
    )
    return out.as_hermitian(1e-10)


def exact_dirac_energy_operator(
    h_of_t: Callable[[float], Operator],
    beta: Operator,
    t: float,
    hbar: float,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> Operator:
    """Oracle: ``H_D - i hbar (dU/dt) U^-1`` with ``U = U_E^-1`` (FW -> Dirac), ``dU`` by central difference."""
    u = TimedUnitary(
        lambda s: eriksen_operator(h_of_t(s), beta, policy).dag,
        fd_step=policy.fd_step,
        unitary_tol=max(policy.unitary_tol, 1e-11),
    )
    return energy_operator_primed(h_of_t(t), u, t, hbar)


def exact_fw_energy_difference(
    h_of_t: Callable[[float], Operator],
    beta: Operator,
    t: float,
    hbar: float,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> EvenOddSplit:
    """Oracle for ``H~_FW - H_FW = -i hbar (dU_E/dt) U_E^-1``, split into even and odd parts."""
    u = TimedUnitary(
        lambda s: eriksen_operator(h_of_t(s), beta, policy),
        fd_step=policy.fd_step,
        unitary_tol=max(policy.unitary_tol, 1e-11),
    )
    diff = ((-1j * hbar) * (u.derivative(t) @ u(t).dag)).hermitian_part()
    return even_odd_split(diff, beta, policy)


def energy_report(
    t: float,
    psi_dirac: StateVector,
    h_dirac: Operator,
    u_e: TimedUnitary,
    beta: Operator,
    hbar: float,
    policy: NumericPolicy = DEFAULT_POLICY,
    psi_fw: StateVector | None = None,
) -> EnergyReport:
    """All energy columns at one time sample.

    ``u_e`` is the FW transformation (Dirac -> FW). Two independent routes:
    the FW-direct value averages ``U_E H U_E^-1 + i hbar (dU_E) U_E^-1`` in the
    FW state, the corrected Dirac value averages ``H_D - i hbar (dU) U^-1`` with
    ``U = U_E^+`` differentiated on its own. They agree up to the
    finite-difference error of the two derivatives.
    """
    if psi_fw is None:
        psi_fw = psi_dirac.evolved(u_e(t).entries, tol=max(psi_dirac.tol, 1e-10))
    h_fw = transform_hamiltonian(h_dirac, u_e, t, hbar, policy)
    direct = eev_direct(h_fw, psi_fw)
    naive = eev_direct(h_dirac, psi_dirac)
    to_dirac = TimedUnitary(lambda s: u_e.func(s).dag, fd_step=u_e.fd_step, unitary_tol=u_e.unitary_tol)
    corrected = eev_direct(energy_operator_primed(h_dirac, to_dirac, t, hbar), psi_dirac)
    split = even_odd_split(h_fw, beta, policy)
    odd_norm = split.odd.norm() / max(h_fw.norm(), 1e-300)
    return EnergyReport(t, direct, naive, corrected, naive - corrected, odd_norm)
