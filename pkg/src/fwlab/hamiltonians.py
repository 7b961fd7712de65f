"""Dirac, FW, rotating-frame and classical Hamiltonians.

Conventions: c = 1, ``hbar`` is an explicit dial, ``mu0 = e hbar / 2m``,
``mu' = (g - 2) e hbar / 4m`` and the electric dipole moment is ``d = d_hat hbar``
so every moment scales with ``hbar``. Symmetrized products are written out as
anticommutators exactly where the FW Hamiltonian places them.

A uniform static B has no periodic vector potential, so on every basis here it
enters only through the explicit moment couplings (``A = 0``).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from .basis import BasisSpec, angular_momentum_z
from .fields import FieldSample
from .operator_core import Operator, Spectrum, anticommutator, hermitian_function, spectrum
from .numeric import BasisMismatchError

__all__ = [
    "ParticleParams",
    "ClassicalState",
    "kinetic_momentum",
    "dirac_parts",
    "dirac_hamiltonian",
    "KineticFunctions",
    "kinetic_functions",
    "fw_hamiltonian_terms",
    "fw_hamiltonian_analytic",
    "rotating_frame_hamiltonian",
    "rotating_frame_parts",
    "rotating_frame_fw_hamiltonian",
    "classical_hamiltonian",
    "classical_precession_omega",
    "tilde_omega_plane_wave",
]


@dataclass(frozen=True)
class ParticleParams:
    m: float = 1.0
    e: float = 1.0
    g: float = 2.0
    d_hat: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError("mass must be positive")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        for name in ("m", "e", "g", "d_hat", "hbar"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def mu0(self) -> float:
        return self.e * self.hbar / (2.0 * self.m)

    @property
    def mu_prime(self) -> float:
        return (self.g - 2.0) * self.e * self.hbar / (4.0 * self.m)

    @property
    def d(self) -> float:
        return self.d_hat * self.hbar

    def with_hbar(self, hbar: float) -> "ParticleParams":
        return replace(self, hbar=hbar)


@dataclass(frozen=True)
class ClassicalState:
    pi: np.ndarray
    s: np.ndarray
    r: np.ndarray = field(default_factory=lambda: np.zeros(3))


def _check_hbar(basis: BasisSpec, p: ParticleParams) -> None:
    if basis.hbar != p.hbar:
        raise BasisMismatchError(f"basis hbar {basis.hbar} != particle hbar {p.hbar}")


def _dot(a, b) -> Operator:
    return a[0] @ b[0] + a[1] @ b[1] + a[2] @ b[2]


def _cross(a, b):
    """Operator-valued ``a x b`` with ``a`` always on the left."""
    return (
        a[1] @ b[2] - a[2] @ b[1],
        a[2] @ b[0] - a[0] @ b[2],
        a[0] @ b[1] - a[1] @ b[0],
    )


def spinor_vector(basis: BasisSpec, name: str):
    return tuple(basis.spinor(m) for m in getattr(basis.algebra, name))


def kinetic_momentum(fields: FieldSample, p: ParticleParams, basis: BasisSpec):
    """``pi_i = p_i - e A_i`` as three Hermitian operators."""
    _check_hbar(basis, p)
    return tuple(
        (basis.spatial(basis.spatial_momentum(i)) - p.e * fields.A[i]).as_hermitian()
        for i in range(3)
    )


def dirac_parts(fields: FieldSample, p: ParticleParams, basis: BasisSpec):
    """Even and odd parts (``beta m`` excluded) of the Dirac Hamiltonian."""
    pi = kinetic_momentum(fields, p, basis)
    alpha = spinor_vector(basis, "alpha")
    gamma = spinor_vector(basis, "gamma")
    Pi = spinor_vector(basis, "pi")
    even = p.e * fields.phi - p.mu_prime * _dot(Pi, fields.B) - p.d * _dot(Pi, fields.E)
    odd = (
        _dot(alpha, pi)
        + (1j * p.mu_prime) * _dot(gamma, fields.E)
        - (1j * p.d) * _dot(gamma, fields.B)
    )
    return even.as_hermitian(), odd.as_hermitian()


def dirac_hamiltonian(fields: FieldSample, p: ParticleParams, basis: BasisSpec) -> Operator:
    """``beta m + E + O`` with the AMM and EDM couplings."""
    even, odd = dirac_parts(fields, p, basis)
    return (p.m * basis.spinor(basis.algebra.beta) + even + odd).as_hermitian()


@dataclass(frozen=True, eq=False)
class KineticFunctions:
    """Functions of ``eps' = sqrt(m^2 + pi^2)`` that the FW formulas need."""

    pi: tuple[Operator, Operator, Operator]
    eps: Operator
    inv_eps: Operator
    inv_eps_eps_m: Operator  # 1 / (eps (eps + m))
    inv_eps2_eps_m: Operator  # 1 / (eps^2 (eps + m))
    pi2_spectrum: Spectrum  # spatial block of pi^2
    basis: BasisSpec

    def of_pi2(self, f: Callable[[np.ndarray], np.ndarray]) -> Operator:
        """``f(pi^2)`` lifted to the full space."""
        return self.basis.spatial(self.pi2_spectrum.apply(f).entries).as_hermitian()


def kinetic_functions(fields: FieldSample, p: ParticleParams, basis: BasisSpec) -> KineticFunctions:
    pi = kinetic_momentum(fields, p, basis)
    # pi^2 is spinor-trivial: diagonalize the spatial block only.
    n = basis.spatial_dim
    pi2 = _dot(pi, pi).as_hermitian(1e-10)
    block = Operator(pi2.entries[:n, :n], "spatial", True, tol=1e-10)
    sp = spectrum(block)
    m = p.m
    lift = lambda f: basis.spatial(sp.apply(f).entries).as_hermitian()  # noqa: E731
    root = lambda x: np.sqrt(m * m + x)  # noqa: E731
    return KineticFunctions(
        pi=pi,
        eps=lift(root),
        inv_eps=lift(lambda x: 1.0 / root(x)),
        inv_eps_eps_m=lift(lambda x: 1.0 / (root(x) * (root(x) + m))),
        inv_eps2_eps_m=lift(lambda x: 1.0 / (root(x) ** 2 * (root(x) + m))),
        pi2_spectrum=sp,
        basis=basis,
    )


def fw_hamiltonian_terms(
    fields: FieldSample, p: ParticleParams, basis: BasisSpec
) -> dict[str, Operator]:
    """The FW Hamiltonian for AMM + EDM in arbitrary fields, term by term."""
    kf = kinetic_functions(fields, p, basis)
    lift = kf.of_pi2
    m, mu0, mup, d, hbar = p.m, p.mu0, p.mu_prime, p.d, p.hbar
    root = lambda x: np.sqrt(m * m + x)  # noqa: E731
    f_elec = lift(lambda x: (mu0 * m / (root(x) + m) + mup) / root(x))
    f_mag = lift(lambda x: mu0 * m / root(x) + mup)

    pi, E, B = kf.pi, fields.E, fields.B
    beta = basis.spinor(basis.algebra.beta)
    Sigma = spinor_vector(basis, "sigma")
    Pi = spinor_vector(basis, "pi")
    sig_pi = _dot(Sigma, pi)
    Pi_pi = _dot(Pi, pi)

    so_E = _dot(Sigma, _cross(pi, E)) - _dot(Sigma, _cross(E, pi)) - hbar * fields.div_E
    so_B = _dot(Sigma, _cross(pi, B)) - _dot(Sigma, _cross(B, pi))
    amm_inner = (
        _dot(B, pi) @ sig_pi
        + sig_pi @ _dot(pi, B)
        + (2.0 * np.pi * hbar) * (_dot(pi, fields.j) + _dot(fields.j, pi))
    )
    edm_inner = _dot(E, pi) @ Pi_pi + Pi_pi @ _dot(pi, E)
    return {
        "rest": beta @ kf.eps,
        "scalar": p.e * fields.phi,
        "spin_orbit_E": 0.25 * anticommutator(f_elec, so_E),
        "magnetic": -0.5 * anticommutator(f_mag, _dot(Pi, B)),
        "amm_longitudinal": (0.25 * mup) * (beta @ anticommutator(kf.inv_eps_eps_m, amm_inner)),
        "edm_rest": -d * _dot(Pi, E),
        "edm_longitudinal": (0.25 * d) * anticommutator(kf.inv_eps_eps_m, edm_inner),
        "edm_motional": (-0.25 * d) * anticommutator(kf.inv_eps, so_B),
    }


def fw_hamiltonian_analytic(fields: FieldSample, p: ParticleParams, basis: BasisSpec) -> Operator:
    terms = fw_hamiltonian_terms(fields, p, basis)
    total = sum(terms.values(), Operator.zeros(basis.dim, basis.tag))
    return total.as_hermitian(1e-10)


def _omega_value(omega: float | Callable[[float], float], t: float) -> float:
    return float(omega(t)) if callable(omega) else float(omega)


@lru_cache(maxsize=8)
def _rotating_static_parts(basis: BasisSpec) -> tuple[Operator, Operator]:
    """``(J_z, alpha.p)``; both time independent, cached per basis."""
    sz = basis.algebra.sigma[2].entries
    jz = angular_momentum_z(basis) + (0.5 * basis.hbar) * basis.spinor(sz)
    odd = sum(
        np.kron(a.entries, basis.spatial_momentum(i)) for i, a in enumerate(basis.algebra.alpha)
    )
    return jz.as_hermitian(), Operator(odd, basis.tag).as_hermitian()


def rotating_frame_parts(
    omega: float | Callable[[float], float], basis: BasisSpec, p: ParticleParams, t: float
):
    """``(J_z, even, odd)`` for the rotating-frame Dirac Hamiltonian, ``omega`` along z."""
    _check_hbar(basis, p)
    jz, odd = _rotating_static_parts(basis)
    return jz, (-_omega_value(omega, t)) * jz, odd


def rotating_frame_hamiltonian(
    omega: float | Callable[[float], float], basis: BasisSpec, p: ParticleParams, t: float
) -> Operator:
    """``beta m + alpha.p - omega_z(t) (L_z + hbar Sigma_z / 2)``."""
    _, even, odd = rotating_frame_parts(omega, basis, p, t)
    return (p.m * basis.spinor(basis.algebra.beta) + even + odd).as_hermitian()


def rotating_frame_fw_hamiltonian(
    omega: float | Callable[[float], float], basis: BasisSpec, p: ParticleParams, t: float
) -> Operator:
    """``beta sqrt(m^2 + (alpha.p)^2) - omega_z(t) (L_z + hbar Sigma_z / 2)``.

    With commuting momentum components ``(alpha.p)^2 = p^2``, so on grids this is
    ``beta sqrt(m^2 + p^2) - omega J_z``. On ``polar_modes`` the truncated
    ``p_x``, ``p_y`` do not commute and the spinor-valued square is the one that
    makes the transformation exact.
    """
    jz, even, odd = rotating_frame_parts(omega, basis, p, t)
    if basis.kind == "polar_modes":
        eps = hermitian_function((odd @ odd).as_hermitian(1e-10), lambda x: np.sqrt(p.m ** 2 + x))
    else:
        p2 = Operator(basis.spatial_momentum_squared(), "spatial").as_hermitian(1e-10)
        eps = basis.spatial(hermitian_function(p2, lambda x: np.sqrt(p.m ** 2 + x)).entries)
    return (basis.spinor(basis.algebra.beta) @ eps + even).as_hermitian()


# Classical limit ----------------------------------------------------------


def classical_precession_omega(pi, E, B, p: ParticleParams) -> np.ndarray:
    """Spin precession angular velocity (``ds/dt = Omega x s``) incl. AMM and EDM."""
    pi, E, B = (np.asarray(v, dtype=float) for v in (pi, E, B))
    m, mu0, mup, d = p.m, p.mu0, p.mu_prime, p.d
    eps = np.sqrt(m * m + pi @ pi)
    bracket = (
        (mu0 * m / (eps + m) + mup) / eps * np.cross(pi, E)
        - (mu0 * m / eps + mup) * B
        + mup / (eps * (eps + m)) * pi * (pi @ B)
        - d * E
        + d / (eps * (eps + m)) * pi * (pi @ E)
        - d / eps * np.cross(pi, B)
    )
    return (2.0 / p.hbar) * bracket


def classical_hamiltonian(state: ClassicalState, E, B, phi: float, p: ParticleParams) -> float:
    """``sqrt(m^2 + pi^2) + e phi + s . Omega``."""
    pi = np.asarray(state.pi, dtype=float)
    omega = classical_precession_omega(pi, E, B, p)
    return float(np.sqrt(p.m ** 2 + pi @ pi) + p.e * phi + np.asarray(state.s) @ omega)


def tilde_omega_plane_wave(pi, E, B, p: ParticleParams) -> np.ndarray:
    """Precession frequency implied by the Dirac-representation energy operator (d = 0)."""
    pi, E, B = (np.asarray(v, dtype=float) for v in (pi, E, B))
    m, mu0, mup = p.m, p.mu0, p.mu_prime
    eps = np.sqrt(m * m + pi @ pi)
    bracket = (
        mup / eps * np.cross(pi, E)
        - (mu0 * m / eps + mup) * B
        + mup / (eps * (eps + m)) * pi * (pi @ B)
    )
    return (2.0 / p.hbar) * bracket
