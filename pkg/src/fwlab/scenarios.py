"""Named scenarios: basis, particle, fields, initial state and time grid in one place.

Every scenario propagates in the Dirac representation and reports energies in
both representations. The initial state is prepared in the FW representation
(upper spinor with a chosen spin direction times a spatial packet) and mapped
to the Dirac representation with the inverse Eriksen operator, so it is a
positive-energy state.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional

import numpy as np

from .basis import BasisSpec
from .dynamics import Trajectory, hbar_scaling_study, propagate, spin_expectation, uniform_grid
from .energetics import EnergyReport, energy_report
from .fields import FieldConfig, PlaneWave, UniformStatic, UniformVectorPotential, sample
from .hamiltonians import (
    ParticleParams,
    dirac_hamiltonian,
    rotating_frame_fw_hamiltonian,
    rotating_frame_hamiltonian,
)
from .numeric import DEFAULT_POLICY, NumericPolicy
from .operator_core import Operator, StateVector
from .transforms import TimedUnitary, eriksen_operator, eriksen_timed

__all__ = [
    "RotationWaveform",
    "InitialState",
    "Scenario",
    "ScenarioRun",
    "SCENARIOS",
    "build",
    "free_particle",
    "static_fields",
    "uniform_A",
    "plane_wave",
    "rotating_frame",
    "hbar_scaling",
    "run",
]


@dataclass(frozen=True)
class RotationWaveform:
    """``omega(t) = omega0 (1 + depth sin(nu t))`` about z."""

    omega0: float = 0.1
    nu: float = 1.0
    depth: float = 0.5
    kind: str = field(default="rotation", init=False)

    def __call__(self, t: float) -> float:
        return self.omega0 * (1.0 + self.depth * np.sin(self.nu * t))

    def angle(self, t: float) -> float:
        """``int_0^t omega``."""
        if self.nu == 0:
            return self.omega0 * t
        return self.omega0 * (t + self.depth * (1.0 - np.cos(self.nu * t)) / self.nu)

    def vector(self, t: float) -> np.ndarray:
        return np.array([0.0, 0.0, self(t)])


@dataclass(frozen=True)
class InitialState:
    """FW-representation initial state.

    ``spin`` is the Bloch direction of the upper spinor. Spatially the state is
    a Gaussian in the z-momentum mode index centred on ``k0`` with width
    ``width`` (``width = 0`` picks the single mode ``k0``); on ``polar_modes``
    it is the ``m = 0`` state and on ``single_mode`` it is trivial.
    """

    spin: tuple[float, float, float] = (1.0, 0.0, 0.0)
    k0: int = 0
    width: float = 0.0

    def spinor(self) -> np.ndarray:
        s = np.asarray(self.spin, dtype=float)
        n = np.linalg.norm(s)
        if not n > 0:
            raise ValueError("spin direction must be nonzero")
        x, y, z = s / n
        theta, phi = np.arccos(np.clip(z, -1.0, 1.0)), np.arctan2(y, x)
        return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2), 0.0, 0.0])

    def spatial(self, basis: BasisSpec) -> np.ndarray:
        if basis.kind == "single_mode":
            return np.ones(1, dtype=complex)
        if basis.kind == "polar_modes":
            v = np.zeros(basis.spatial_dim, dtype=complex)
            v[basis.m_max] = 1.0
            return v
        n = basis.N
        k = np.round(np.fft.fftfreq(n, 1.0 / n)).astype(int)
        if self.width > 0:
            c = np.exp(-((k - self.k0) ** 2) / (4.0 * self.width ** 2)).astype(complex)
        else:
            if not np.any(k == self.k0):
                raise ValueError(f"mode index {self.k0} not on a grid of {n} points")
            c = (k == self.k0).astype(complex)
        z = np.fft.ifft(c) * np.sqrt(n)  # position amplitudes, in the order of fftfreq
        z = np.roll(z, n // 2)  # grid points start at -L/2
        if basis.kind == "line_grid":
            line = z
        else:
            flat = np.ones(n, dtype=complex) / np.sqrt(n)
            line = np.kron(np.kron(flat, flat), z)
        return line / np.linalg.norm(line)

    def fw_amplitudes(self, basis: BasisSpec) -> np.ndarray:
        return np.kron(self.spinor(), self.spatial(basis))


@dataclass(frozen=True)
class Scenario:
    name: str
    particle: ParticleParams
    basis: BasisSpec
    fields: Optional[FieldConfig] = None
    rotation: Optional[RotationWaveform] = None
    state: InitialState = InitialState()
    t_end: float = 1.0
    steps: int = 20
    sample_time: float = 0.3
    hbars: tuple[float, ...] = ()

    def __post_init__(self):
        if self.basis.hbar != self.particle.hbar:
            object.__setattr__(self, "basis", self.basis.with_hbar(self.particle.hbar))
        if (self.fields is None) == (self.rotation is None):
            raise ValueError("a scenario needs exactly one of fields or rotation")

    def with_hbar(self, hbar: float) -> "Scenario":
        return replace(self, particle=self.particle.with_hbar(hbar), basis=self.basis.with_hbar(hbar))

    @property
    def beta(self) -> Operator:
        return self.basis.spinor(self.basis.algebra.beta)

    def dirac_hamiltonian(self, t: float) -> Operator:
        if self.rotation is not None:
            return rotating_frame_hamiltonian(self.rotation, self.basis, self.particle, t)
        return dirac_hamiltonian(sample(self.fields, self.basis, t), self.particle, self.basis)

    def fw_hamiltonian(self, t: float) -> Operator:
        """Closed-form FW Hamiltonian; only the rotating frame has one that is exact."""
        if self.rotation is None:
            raise ValueError("closed-form FW Hamiltonian only for the rotating frame")
        return rotating_frame_fw_hamiltonian(self.rotation, self.basis, self.particle, t)

    def eriksen(self, policy: NumericPolicy = DEFAULT_POLICY) -> TimedUnitary:
        return eriksen_timed(self.dirac_hamiltonian, self.beta, policy)

    def initial_fw_state(self) -> StateVector:
        return StateVector(self.state.fw_amplitudes(self.basis), self.basis.tag)

    def initial_dirac_state(self, policy: NumericPolicy = DEFAULT_POLICY) -> StateVector:
        u = self.eriksen(policy)(0.0)
        return self.initial_fw_state().evolved(u.dag.entries, tol=1e-10)

    def time_grid(self) -> np.ndarray:
        return uniform_grid(self.t_end, self.steps)


@dataclass(frozen=True, eq=False)
class ScenarioRun:
    scenario: Scenario
    trajectory: Optional[Trajectory] = None
    fw_spin: Optional[np.ndarray] = None
    reports: tuple[EnergyReport, ...] = ()
    norm_defects: Optional[np.ndarray] = None
    study: object = None


def free_particle(momentum=(0.0, 0.0, 0.75), particle: ParticleParams = ParticleParams(),
                  t_end: float = 10.0, steps: int = 100, spin=(1.0, 0.0, 0.0)) -> Scenario:
    return Scenario(
        "free_particle", particle, BasisSpec("single_mode", momentum=momentum),
        fields=UniformStatic(), state=InitialState(spin=spin), t_end=t_end, steps=steps,
    )


def static_fields(
    E0=(0.1, 0.0, 0.0), B0=(0.0, 0.0, 0.5), momentum=(0.3, 0.0, 0.4),
    particle: ParticleParams = ParticleParams(g=2.5, d_hat=0.05),
    t_end: float = 10.0, steps: int = 100, spin=(1.0, 0.0, 0.0),
) -> Scenario:
    return Scenario(
        "static_fields", particle, BasisSpec("single_mode", momentum=momentum),
        fields=UniformStatic(E0=E0, B0=B0), state=InitialState(spin=spin), t_end=t_end, steps=steps,
    )


def _line(n: int = 16, periods: float = 40.0, transverse=(0.1, 0.05)) -> BasisSpec:
    return BasisSpec("line_grid", N=n, box_length=2.0 * np.pi * periods, transverse_momentum=transverse)


def uniform_A(
    amplitude=(0.1, 0.1 / 3.0, 0.05), frequency: float = 0.7,
    particle: ParticleParams = ParticleParams(g=2.5, d_hat=0.1),
    basis: Optional[BasisSpec] = None, t_end: float = 10.0, steps: int = 200,
    state: InitialState = InitialState(k0=1, width=1.0),
) -> Scenario:
    return Scenario(
        "uniform_A", particle, basis or _line(),
        fields=UniformVectorPotential(amplitude=amplitude, frequency=frequency),
        state=state, t_end=t_end, steps=steps,
    )


def plane_wave(
    E0=(0.1, 0.0, 0.0), particle: ParticleParams = ParticleParams(),
    basis: Optional[BasisSpec] = None, t_end: float = 10.0, steps: int = 200,
    state: InitialState = InitialState(k0=1, width=1.0),
) -> Scenario:
    b = basis or _line()
    # the lowest wave the grid resolves: k = 2 pi / L
    wave = PlaneWave(E0=E0, n=(0.0, 0.0, 1.0), omega=2.0 * np.pi / b.box_length)
    return Scenario("plane_wave", particle, b, fields=wave, state=state, t_end=t_end, steps=steps)


def rotating_frame(
    rotation: RotationWaveform = RotationWaveform(), particle: ParticleParams = ParticleParams(),
    basis: Optional[BasisSpec] = None, t_end: float = 4.0, steps: int = 200,
    state: InitialState = InitialState(k0=1),
) -> Scenario:
    # keep omega |J_z| well inside the mass gap on the grid, or the Eriksen
    # denominator degenerates for the fastest orbital modes
    b = basis or BasisSpec("cube_grid", N=4, box_length=2.0 * np.pi)
    return Scenario("rotating_frame", particle, b, rotation=rotation, state=state,
                    t_end=t_end, steps=steps)


def hbar_scaling(
    hbars=(1.0, 0.5, 0.25, 0.125), sample_time: float = 0.3,
    particle: ParticleParams = ParticleParams(g=2.5, d_hat=0.1), basis: Optional[BasisSpec] = None,
    E0=(0.1, 0.0, 0.0),
) -> Scenario:
    sc = plane_wave(E0=E0, particle=particle, basis=basis)
    return replace(sc, name="hbar_scaling", hbars=tuple(map(float, hbars)), sample_time=sample_time)


SCENARIOS = {
    "free_particle": free_particle,
    "static_fields": static_fields,
    "uniform_A": uniform_A,
    "plane_wave": plane_wave,
    "rotating_frame": rotating_frame,
    "hbar_scaling": hbar_scaling,
}


def build(name: str, **kwargs) -> Scenario:
    try:
        return SCENARIOS[name](**kwargs)
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; expected one of {sorted(SCENARIOS)}") from None


def run(scenario: Scenario, policy: NumericPolicy = DEFAULT_POLICY) -> ScenarioRun:
    """Propagate and fill one :class:`EnergyReport` per time sample.

    Spin is reported in the FW representation, where it is the physical spin.
    The ``hbar_scaling`` scenario runs the residual study instead.
    """
    if scenario.name == "hbar_scaling":
        return ScenarioRun(scenario, study=hbar_scaling_study(scenario, scenario.hbars, policy))
    basis, hbar, beta = scenario.basis, scenario.particle.hbar, scenario.beta
    h_of = lru_cache(maxsize=16)(scenario.dirac_hamiltonian)
    u_e = TimedUnitary(
        lru_cache(maxsize=16)(lambda t: eriksen_operator(h_of(t), beta, policy)),
        fd_step=policy.fd_step,
        unitary_tol=max(policy.unitary_tol, 1e-11),
    )
    psi0 = StateVector(u_e(0.0).dag.entries @ scenario.initial_fw_state().amplitudes, basis.tag, tol=1e-10)
    traj = propagate(h_of, psi0, scenario.time_grid(), hbar, basis=basis,
                     policy=policy)
    reports, spins = [], []
    for t, psi in zip(traj.times, traj.states):
        t = float(t)
        psi_fw = psi.evolved(u_e(t).entries, tol=1e-10)
        reports.append(energy_report(t, psi, h_of(t), u_e, beta, hbar, policy, psi_fw=psi_fw))
        spins.append(spin_expectation(psi_fw, basis))
    traj = Trajectory(traj.times, traj.states, traj.spin, tuple(reports))
    return ScenarioRun(scenario, traj, np.stack(spins), tuple(reports), traj.norm_defects())
