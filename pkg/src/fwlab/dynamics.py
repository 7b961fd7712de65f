"""Time propagation, spin tracking and the hbar-scaling study.

Propagation is the exponential midpoint rule

    psi_{k+1} = exp(-i H(t_k + dt/2) dt / hbar) psi_k

with the exponential taken through a Hermitian eigendecomposition, so every
step is unitary to rounding and the global error is O(dt^2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .basis import BasisSpec
from .numeric import DEFAULT_POLICY, NumericalPolicyError, NumericPolicy
from .operator_core import Operator, StateVector

__all__ = [
    "Trajectory",
    "propagate",
    "step_error_ratio",
    "default_steps",
    "uniform_grid",
    "spin_expectation",
    "classical_spin_oracle",
    "rotation_z",
    "ScalingStudy",
    "energy_operator_residuals",
    "fit_slope",
    "hbar_scaling_study",
]

HamiltonianLike = Union[Operator, Callable[[float], Operator]]


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: tuple[StateVector, ...]
    spin: np.ndarray  # (n_times, 3), <Sigma> of the stored states
    energy_reports: tuple = field(default=())

    def __post_init__(self):
        if len(self.states) != len(self.times):
            raise ValueError("one state per time sample required")

    def norm_defects(self) -> np.ndarray:
        return np.array([abs(np.linalg.norm(s.amplitudes) - 1.0) for s in self.states])

    def amplitudes(self) -> np.ndarray:
        return np.stack([s.amplitudes for s in self.states])


def uniform_grid(t_end: float, steps: int, t0: float = 0.0) -> np.ndarray:
    if steps < 1:
        raise ValueError("need at least one step")
    return np.linspace(t0, t_end, steps + 1)


def _check_uniform(t_grid) -> tuple[np.ndarray, float]:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise ValueError("time grid needs at least two points")
    d = np.diff(t)
    dt = (t[-1] - t[0]) / (t.size - 1)
    if not dt > 0 or np.max(np.abs(d - dt)) > 1e-9 * abs(dt):
        raise ValueError("time grid must be uniform and increasing")
    return t, dt


def _step_unitary(h: Operator, dt: float, hbar: float, policy: NumericPolicy) -> np.ndarray:
    scale = max(h.norm(), 1e-300)
    if h.hermitian_defect() > policy.hermitian_tol * scale:
        raise NumericalPolicyError(
            f"H(t) is not Hermitian (defect {h.hermitian_defect() / scale:.3e} relative)"
        )
    a = h.entries
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return (v * np.exp(-1j * w * dt / hbar)) @ v.conj().T


def _evolve_amplitudes(h_of_t: HamiltonianLike, psi0: np.ndarray, t: np.ndarray, dt: float,
                       hbar: float, policy: NumericPolicy) -> list[np.ndarray]:
    out = [psi0]
    if isinstance(h_of_t, Operator):
        step = _step_unitary(h_of_t, dt, hbar, policy)
        for _ in range(t.size - 1):
            out.append(step @ out[-1])
        return out
    for k in range(t.size - 1):
        h = h_of_t(t[k] + 0.5 * dt)
        out.append(_step_unitary(h, dt, hbar, policy) @ out[-1])
    return out


def step_error_ratio(
    h_of_t: HamiltonianLike,
    psi0: StateVector,
    t_end: float,
    steps: int,
    hbar: float = 1.0,
    t0: float = 0.0,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> tuple[float, float, float]:
    """Final-state errors at ``steps`` and ``2 steps`` against an ``8 steps`` reference.

    Returns ``(err_coarse, err_fine, ratio)``; the ratio is ~4 for a
    second-order scheme and ``nan`` when both errors sit at rounding level.
    """
    finals = []
    for n in (steps, 2 * steps, 8 * steps):
        t, dt = _check_uniform(uniform_grid(t_end, n, t0))
        finals.append(_evolve_amplitudes(h_of_t, psi0.amplitudes, t, dt, hbar, policy)[-1])
    e1 = float(np.linalg.norm(finals[0] - finals[2]))
    e2 = float(np.linalg.norm(finals[1] - finals[2]))
    floor = 1e-12
    ratio = float("nan") if e1 < floor and e2 < floor else e1 / max(e2, 1e-300)
    return e1, e2, ratio


def default_steps(h: Operator, t_end: float, t0: float = 0.0, hbar: float = 1.0,
                  phase_per_step: float = 0.1) -> int:
    """Smallest step count with ``max|eig(H)| dt / hbar <= phase_per_step``."""
    top = float(np.max(np.abs(np.linalg.eigvalsh(h.entries))))
    return max(2, int(np.ceil(top * (t_end - t0) / (hbar * phase_per_step))))


def spin_expectation(psi: StateVector, basis: BasisSpec) -> np.ndarray:
    """``(<Sigma_x>, <Sigma_y>, <Sigma_z>)``."""
    n = basis.spatial_dim
    a = psi.amplitudes.reshape(4, n)
    rho = a @ a.conj().T  # reduced spinor density matrix
    out = np.empty(3)
    for i, s in enumerate(basis.algebra.sigma):
        z = np.trace(s.entries @ rho)
        if abs(z.imag) > 1e-12 * max(1.0, abs(z.real)):
            raise NumericalPolicyError(f"<Sigma_{'xyz'[i]}> has imaginary part {z.imag:.3e}")
        out[i] = z.real
    return out


def propagate(
    h_of_t: HamiltonianLike,
    psi0: StateVector,
    t_grid: Sequence[float],
    hbar: float = 1.0,
    basis: BasisSpec | None = None,
    check_convergence: bool = False,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> Trajectory:
    """Exponential-midpoint trajectory on a uniform grid.

    ``h_of_t`` may be a constant :class:`Operator`, in which case one
    eigendecomposition serves every step. When ``basis`` is given the spin
    column is filled, otherwise it is ``nan``. ``check_convergence`` repeats the
    run at ``2x`` and ``8x`` resolution and raises if the error ratio falls
    outside ``[3, 5]``.
    """
    t, dt = _check_uniform(t_grid)
    if check_convergence:
        _, _, ratio = step_error_ratio(h_of_t, psi0, t[-1], t.size - 1, hbar, t[0], policy)
        if np.isfinite(ratio) and not 3.0 <= ratio <= 5.0:
            raise NumericalPolicyError(
                f"step-halving error ratio {ratio:.3f} outside [3, 5]; time step too coarse"
            )
    amps = _evolve_amplitudes(h_of_t, psi0.amplitudes, t, dt, hbar, policy)
    tol = max(psi0.tol, 1e-10)
    states = tuple(StateVector(a, psi0.basis_tag, tol=tol) for a in amps)
    if basis is not None:
        spin = np.stack([spin_expectation(s, basis) for s in states])
    else:
        spin = np.full((len(states), 3), np.nan)
    return Trajectory(t, states, spin)


def rotation_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def classical_spin_oracle(
    omega: Callable[[float], np.ndarray], s0, t_grid: Sequence[float]
) -> np.ndarray:
    """RK4 solution of ``ds/dt = Omega(t) x s`` sampled on ``t_grid``."""
    s = np.asarray(s0, dtype=float)
    if abs(np.linalg.norm(s) - 1.0) > 1e-12:
        raise ValueError("initial spin must be a unit vector")
    t = np.asarray(t_grid, dtype=float)
    f = lambda tt, v: np.cross(np.asarray(omega(tt), dtype=float), v)  # noqa: E731
    out = np.empty((t.size, 3))
    out[0] = s
    for k in range(t.size - 1):
        h = t[k + 1] - t[k]
        k1 = f(t[k], s)
        k2 = f(t[k] + h / 2, s + h / 2 * k1)
        k3 = f(t[k] + h / 2, s + h / 2 * k2)
        k4 = f(t[k] + h, s + h * k3)
        s = s + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = s
    return out


# hbar scaling -------------------------------------------------------------


@dataclass(frozen=True)
class ScalingStudy:
    """Residual norms per formula and their log-log slopes against hbar.

    A slope is ``nan`` (and the formula listed in ``at_floor``) when some
    residual is not clearly above the finite-difference floor of the oracle.
    """

    hbars: tuple[float, ...]
    residuals: dict
    floors: tuple[float, ...]
    slopes: dict
    at_floor: tuple[str, ...]

    def slope(self, key: str) -> float:
        return self.slopes[key]


def fit_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def energy_operator_residuals(scenario, hbar: float, policy: NumericPolicy = DEFAULT_POLICY):
    """``({'eq19', 'eq21', 'eq16'}: residual norm, floor)`` at one hbar.

    ``eq19`` and ``eq21`` are the general and electromagnetic first-order
    Dirac energy operators compared with the Eriksen-based exact one; ``eq16``
    is the FW-side difference compared with the even part of
    ``-i hbar (dU_E) U_E^-1``. The floor is ten times the change of the exact
    operator when its derivative step is doubled.
    """
    from .energetics import (
        dirac_energy_operator_em,
        dirac_energy_operator_general,
        epsilon_rate,
        exact_dirac_energy_operator,
        exact_fw_energy_difference,
        fw_energy_difference,
    )
    from .fields import sample
    from .hamiltonians import dirac_hamiltonian, dirac_parts
    from .operator_core import even_odd_split

    sc = scenario.with_hbar(hbar)
    basis, particle, cfg, t = sc.basis, sc.particle, sc.fields, sc.sample_time
    beta = basis.spinor(basis.algebra.beta)

    def h_of(s):
        return dirac_hamiltonian(sample(cfg, basis, s), particle, basis)

    def odd_of(s):
        return dirac_parts(sample(cfg, basis, s), particle, basis)[1]

    fs = sample(cfg, basis, t)
    h_d = h_of(t)
    step = policy.fd_step
    exact = exact_dirac_energy_operator(h_of, beta, t, hbar, policy)
    exact_2h = exact_dirac_energy_operator(h_of, beta, t, hbar, policy.with_overrides({"fd_step": 2 * step}))
    odd_dot = (odd_of(t + step) - odd_of(t - step)) / (2 * step)
    eq19 = dirac_energy_operator_general(
        h_d, even_odd_split(h_d, beta, policy), odd_dot, particle,
        epsilon_rate(odd_of, t, particle.m, step), beta, policy,
    )
    eq21 = dirac_energy_operator_em(h_d, fs, particle, basis)
    fw_exact = exact_fw_energy_difference(h_of, beta, t, hbar, policy).even
    eq16 = fw_energy_difference(fs, particle, basis)
    floor = 10.0 * (exact - exact_2h).norm() + 1e-13 * h_d.norm()
    res = {
        "eq19": (eq19 - exact).norm(),
        "eq21": (eq21 - exact).norm(),
        "eq16": (eq16 - fw_exact).norm(),
    }
    return res, floor


def hbar_scaling_study(scenario, hbars: Sequence[float],
                       policy: NumericPolicy = DEFAULT_POLICY) -> ScalingStudy:
    """Residuals of the first-order energy operators versus hbar.

    ``scenario`` needs ``with_hbar(h)`` returning an object with ``basis``,
    ``particle``, ``fields`` and ``sample_time``. ``hbars`` must form a
    geometric progression of at least three values.
    """
    hs = np.asarray(hbars, dtype=float)
    if hs.size < 3:
        raise ValueError("need at least three hbar values")
    r = hs[1:] / hs[:-1]
    if np.any(hs <= 0) or np.max(np.abs(r - r[0])) > 1e-12 * abs(r[0]):
        raise ValueError("hbar values must be positive and in geometric progression")
    rows, floors = [], []
    for h in hs:
        res, floor = energy_operator_residuals(scenario, float(h), policy)
        rows.append(res)
        floors.append(floor)
    keys = ("eq19", "eq21", "eq16")
    residuals = {k: tuple(row[k] for row in rows) for k in keys}
    slopes, at_floor = {}, []
    for k in keys:
        if all(v > f for v, f in zip(residuals[k], floors)):
            slopes[k] = fit_slope(hs, residuals[k])
        else:
            slopes[k] = float("nan")
            at_floor.append(k)
    return ScalingStudy(tuple(map(float, hs)), residuals, tuple(floors), slopes, tuple(at_floor))
