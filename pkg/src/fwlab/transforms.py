"""Time-dependent unitary transformations and the exact (Eriksen) FW operator.

Hamiltonian transformation law for a time-dependent ``U``::

    H' = U H U^-1 - i hbar U d(U^-1)/dt = U H U^-1 + i hbar (dU/dt) U^-1

Both forms are evaluated; their disagreement measures the derivative error.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .numeric import DEFAULT_POLICY, GapClosedError, NumericalPolicyError, NumericPolicy
from .operator_core import (
    Operator,
    commutator,
    even_odd_split,
    hermitian_function,
    sign_operator,
    spectrum,
)

__all__ = [
    "TimedUnitary",
    "unitarity_defect",
    "transform_hamiltonian",
    "transform_hamiltonian_forms",
    "eriksen_operator",
    "eriksen_timed",
    "check_eriksen_condition",
    "u1_operator",
    "exact_fw_condition_defect",
    "exact_fw_hamiltonian",
    "fw_time_derivative_operator",
]


def unitarity_defect(u: Operator) -> float:
    """``||U^+ U - I||_F / sqrt(dim)``."""
    a = u.entries
    return float(np.linalg.norm(a.conj().T @ a - np.eye(u.dim)) / np.sqrt(u.dim))


@dataclass(frozen=True)
class TimedUnitary:
    """``t -> U(t)`` with an optional closed-form derivative.

    Without ``analytic_dU`` the derivative is the central difference with step
    ``fd_step``.
    """

    func: Callable[[float], Operator]
    analytic_dU: Optional[Callable[[float], Operator]] = None
    fd_step: float = DEFAULT_POLICY.fd_step
    unitary_tol: float = DEFAULT_POLICY.unitary_tol

    def __call__(self, t: float) -> Operator:
        u = self.func(t)
        d = unitarity_defect(u)
        if d > self.unitary_tol:
            raise NumericalPolicyError(f"U(t={t}) is not unitary (defect {d:.3e})")
        return u

    def derivative(self, t: float) -> Operator:
        if self.analytic_dU is not None:
            return self.analytic_dU(t)
        return self.fd_derivative(t)

    def fd_derivative(self, t: float, step: float | None = None) -> Operator:
        h = self.fd_step if step is None else step
        return (self.func(t + h) - self.func(t - h)) / (2.0 * h)

    def inverse_derivative(self, t: float) -> Operator:
        """``d(U^-1)/dt``; closed form ``-U^+ (dU) U^+`` when ``analytic_dU`` is set."""
        if self.analytic_dU is not None:
            u = self(t)
            return -(u.dag @ self.analytic_dU(t) @ u.dag)
        h = self.fd_step
        return (self.func(t + h).dag - self.func(t - h).dag) / (2.0 * h)

    def with_step(self, fd_step: float) -> "TimedUnitary":
        return TimedUnitary(self.func, self.analytic_dU, fd_step, self.unitary_tol)


def transform_hamiltonian_forms(h: Operator, u: TimedUnitary, t: float, hbar: float = 1.0):
    """Both right-hand sides of the transformation law, in that order."""
    ut = u(t)
    similar = ut @ h @ ut.dag
    form_inverse = similar - (1j * hbar) * (ut @ u.inverse_derivative(t))
    form_direct = similar + (1j * hbar) * (u.derivative(t) @ ut.dag)
    return form_inverse, form_direct


def transform_hamiltonian(
    h: Operator,
    u: TimedUnitary,
    t: float,
    hbar: float = 1.0,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> Operator:
    """``U H U^-1 + i hbar (dU/dt) U^-1``, cross-checked against the ``U d(U^-1)/dt`` form."""
    form_inverse, form_direct = transform_hamiltonian_forms(h, u, t, hbar)
    scale = max(form_direct.norm(), 1.0)
    gap = (form_inverse - form_direct).norm() / scale
    if gap > policy.form_agreement_tol:
        raise NumericalPolicyError(
            f"transformation-law forms disagree by {gap:.3e} (> {policy.form_agreement_tol:.1e}); "
            "time step too large for the derivative"
        )
    return form_direct.hermitian_part()


def eriksen_operator(
    h: Operator, beta: Operator, policy: NumericPolicy = DEFAULT_POLICY
) -> Operator:
    """``(1 + beta lam) / sqrt(2 + beta lam + lam beta)`` with ``lam`` the sign of ``H``."""
    lam = sign_operator(h, policy)
    x = beta @ lam
    denom = (x + x.dag + 2.0).as_hermitian(1e-10)
    sp = spectrum(denom, policy)
    smallest = float(np.min(sp.values))
    if smallest <= policy.eriksen_denominator_tol * 4.0:
        raise GapClosedError(
            f"Eriksen denominator has eigenvalue {smallest:.3e}; FW transformation ill-defined"
        )
    return (x + 1.0) @ sp.apply(lambda v: 1.0 / np.sqrt(v))


def eriksen_timed(
    h_of_t: Callable[[float], Operator],
    beta: Operator,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> TimedUnitary:
    """The instantaneous Eriksen operator of ``H(t)`` as a :class:`TimedUnitary`."""
    return TimedUnitary(
        lambda t: eriksen_operator(h_of_t(t), beta, policy),
        fd_step=policy.fd_step,
        unitary_tol=max(policy.unitary_tol, 1e-11),
    )


def check_eriksen_condition(u: Operator, beta: Operator) -> float:
    """``||beta U - U^+ beta||_F / ||U||_F``."""
    return float((beta @ u - u.dag @ beta).norm() / u.norm())


def u1_operator(
    h: Operator, beta: Operator, mass: float, policy: NumericPolicy = DEFAULT_POLICY
) -> Operator:
    """First FW step ``(eps + m + beta O) / sqrt(2 eps (eps + m))``, ``eps = sqrt(m^2 + O^2)``."""
    odd = even_odd_split(h, beta, policy).odd
    sp = spectrum((odd @ odd).as_hermitian(1e-10), policy)
    m = mass
    eps = sp.apply(lambda x: np.sqrt(m * m + np.clip(x, 0.0, None)))
    norm = sp.apply(
        lambda x: 1.0 / np.sqrt(2.0 * np.sqrt(m * m + np.clip(x, 0.0, None))
                                * (np.sqrt(m * m + np.clip(x, 0.0, None)) + m))
    )
    return (eps + m + beta @ odd) @ norm


def exact_fw_condition_defect(
    even: Operator, odd: Operator, odd_dot: Operator, hbar: float = 1.0
) -> float:
    """``||[E, O] - i hbar dO/dt||_F``: the matrix form of ``[E - i hbar d/dt, O]``."""
    return float((commutator(even, odd) - (1j * hbar) * odd_dot).norm())


def exact_fw_hamiltonian(
    even: Operator,
    odd: Operator,
    beta: Operator,
    mass: float,
    odd_dot: Operator | None = None,
    hbar: float = 1.0,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> Operator:
    """``beta sqrt(m^2 + O^2) + E``; warns when the exactness condition fails."""
    if odd_dot is not None:
        defect = exact_fw_condition_defect(even, odd, odd_dot, hbar)
        scale = max(even.norm() * odd.norm(), 1.0)
        if defect > policy.exactness_tol * scale:
            warnings.warn(
                f"exactness condition violated (defect {defect:.3e}); result is approximate",
                RuntimeWarning,
                stacklevel=2,
            )
    eps = hermitian_function((odd @ odd).as_hermitian(1e-10), lambda x: np.sqrt(mass ** 2 + x), policy)
    return (beta @ eps + even).as_hermitian(1e-10)


def fw_time_derivative_operator(u_e: TimedUnitary, t: float, hbar: float = 1.0) -> Operator:
    """The ``i hbar (dU_E/dt) U_E^-1`` term that the time derivative adds to ``U_E H U_E^-1``."""
    return (1j * hbar) * (u_e.derivative(t) @ u_e(t).dag)
