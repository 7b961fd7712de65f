"""Analytic electromagnetic field configurations sampled onto a basis.

All time derivatives are closed forms. The plane wave is the real, linearly
polarized wave

    E = E0 cos(phase),  B = n x E,  A = (E0 / w) sin(phase),  phase = k.r - w t

with ``k = w n`` (c = 1), so that ``E = -dA/dt`` and ``B = curl A`` hold exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .basis import BasisSpec
from .operator_core import Operator

__all__ = [
    "UniformStatic",
    "UniformVectorPotential",
    "PlaneWave",
    "FieldConfig",
    "FieldSample",
    "field_values",
    "sample",
    "time_derivatives",
]

_VECTOR_KEYS = ("E", "B", "A", "A_dot", "E_dot", "B_dot", "j")


def _vec(v) -> tuple[float, float, float]:
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected a 3-vector, got {v!r}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"non-finite vector {v!r}")
    return tuple(float(x) for x in a)


@dataclass(frozen=True)
class UniformStatic:
    E0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    B0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    phi: float = 0.0
    kind: str = field(default="uniform_static", init=False)

    def __post_init__(self):
        object.__setattr__(self, "E0", _vec(self.E0))
        object.__setattr__(self, "B0", _vec(self.B0))

    def values(self, x, y, z, t):
        n = np.size(x)
        const = lambda v: np.repeat(np.asarray(v, dtype=float)[:, None], n, axis=1)  # noqa: E731
        zero = np.zeros((3, n))
        # A is not needed for uniform fields in the Coulomb-free gauge used here; B enters directly.
        return dict(E=const(self.E0), B=const(self.B0), A=zero, A_dot=zero, E_dot=zero,
                    B_dot=zero, j=zero, phi=np.full(n, self.phi), div_E=np.zeros(n),
                    div_A_dot=np.zeros(n))


@dataclass(frozen=True)
class UniformVectorPotential:
    """``A(t) = offset + amplitude * sin(frequency * t + phase)``; ``E = -dA/dt``, ``B = 0``."""

    amplitude: tuple[float, float, float] = (0.0, 0.0, 0.0)
    frequency: float = 1.0
    phase: float = 0.0
    offset: tuple[float, float, float] = (0.0, 0.0, 0.0)
    kind: str = field(default="uniform_vector_potential", init=False)

    def __post_init__(self):
        object.__setattr__(self, "amplitude", _vec(self.amplitude))
        object.__setattr__(self, "offset", _vec(self.offset))

    def waveform(self, t: float):
        a = np.asarray(self.amplitude)
        w, s = self.frequency, self.frequency * t + self.phase
        A = np.asarray(self.offset) + a * np.sin(s)
        A_dot = a * w * np.cos(s)
        A_ddot = -a * w * w * np.sin(s)
        return A, A_dot, A_ddot

    def values(self, x, y, z, t):
        n = np.size(x)
        A, A_dot, A_ddot = self.waveform(t)
        const = lambda v: np.repeat(np.asarray(v, dtype=float)[:, None], n, axis=1)  # noqa: E731
        zero = np.zeros((3, n))
        return dict(E=const(-A_dot), B=zero, A=const(A), A_dot=const(A_dot), E_dot=const(-A_ddot),
                    B_dot=zero, j=zero, phi=np.zeros(n), div_E=np.zeros(n),
                    div_A_dot=np.zeros(n))


@dataclass(frozen=True)
class PlaneWave:
    E0: tuple[float, float, float]
    n: tuple[float, float, float] = (0.0, 0.0, 1.0)
    omega: float = 1.0
    kind: str = field(default="plane_wave", init=False)

    def __post_init__(self):
        object.__setattr__(self, "E0", _vec(self.E0))
        object.__setattr__(self, "n", _vec(self.n))
        if not self.omega > 0:
            raise ValueError("plane wave frequency must be positive")
        nn = np.asarray(self.n)
        if abs(np.linalg.norm(nn) - 1.0) > 1e-12:
            raise ValueError("propagation direction n must be a unit vector")
        if abs(np.dot(self.E0, nn)) > 1e-12 * max(1.0, np.linalg.norm(self.E0)):
            raise ValueError("plane wave amplitude must be transverse (E0 . n = 0)")

    @property
    def wavevector(self) -> np.ndarray:
        return self.omega * np.asarray(self.n)

    def values(self, x, y, z, t):
        k = self.wavevector
        w = self.omega
        e0 = np.asarray(self.E0)[:, None]
        nxe0 = np.cross(self.n, self.E0)[:, None]
        ph = k[0] * np.asarray(x) + k[1] * np.asarray(y) + k[2] * np.asarray(z) - w * t
        c, s = np.cos(ph)[None, :], np.sin(ph)[None, :]
        n = np.size(x)
        return dict(
            E=e0 * c,
            B=nxe0 * c,
            A=(e0 / w) * s,
            A_dot=-e0 * c,
            E_dot=w * e0 * s,
            B_dot=w * nxe0 * s,
            j=np.zeros((3, n)),
            phi=np.zeros(n),
            div_E=np.zeros(n),  # k . E0 = 0
            div_A_dot=np.zeros(n),
        )


FieldConfig = Union[UniformStatic, UniformVectorPotential, PlaneWave]


@dataclass(frozen=True, eq=False)
class FieldSample:
    E: tuple[Operator, Operator, Operator]
    B: tuple[Operator, Operator, Operator]
    A: tuple[Operator, Operator, Operator]
    phi: Operator
    A_dot: tuple[Operator, Operator, Operator]
    E_dot: tuple[Operator, Operator, Operator]
    B_dot: tuple[Operator, Operator, Operator]
    j: tuple[Operator, Operator, Operator]
    div_E: Operator
    div_A_dot: Operator
    t: float = 0.0


def _sample_points(config: FieldConfig, basis: BasisSpec):
    if isinstance(config, PlaneWave):
        if basis.kind != "line_grid":
            raise ValueError("plane_wave fields need a line_grid basis")
        nn = np.asarray(config.n)
        if abs(nn[0]) > 0 or abs(nn[1]) > 0:
            raise ValueError("on a line_grid the wave must propagate along +/- z")
        basis.check_commensurate(config.omega)
    if basis.is_grid:
        return basis.points()
    z = np.zeros(1)
    return z, z, z


def field_values(config: FieldConfig, basis: BasisSpec, t: float) -> dict[str, np.ndarray]:
    """Raw sampled values: vectors as ``(3, n_points)`` arrays, scalars as ``(n_points,)``."""
    x, y, z = _sample_points(config, basis)
    return config.values(x, y, z, t)


def sample(config: FieldConfig, basis: BasisSpec, t: float) -> FieldSample:
    """Every field quantity at time ``t`` as diagonal (Hermitian) operators."""
    vals = field_values(config, basis, t)
    if basis.is_grid:
        lift = lambda v: basis.spatial(v).as_hermitian()  # noqa: E731
    else:
        lift = lambda v: basis.constant(float(v[0]))  # noqa: E731
    vec = {k: tuple(lift(vals[k][i]) for i in range(3)) for k in _VECTOR_KEYS}
    return FieldSample(
        phi=lift(vals["phi"]),
        div_E=lift(vals["div_E"]),
        div_A_dot=lift(vals["div_A_dot"]),
        t=t,
        **vec,
    )


def time_derivatives(config: FieldConfig, basis: BasisSpec, t: float):
    """Closed-form ``(A_dot, E_dot, B_dot)``, each a triple of operators."""
    s = sample(config, basis, t)
    return s.A_dot, s.E_dot, s.B_dot
