"""Finite realizations of the spinor x spatial Hilbert space.

The full space is ``C^4 (x) S`` with the spinor factor first, so a spinor
matrix ``M`` acts as ``kron(M, I_S)`` and a spatial matrix ``K`` as
``kron(I_4, K)``. Spatial kinds:

``single_mode``
    one plane-wave mode with a fixed momentum 3-vector.
``line_grid``
    ``N`` periodic points along z with spectral ``p_z``; ``p_x``, ``p_y`` are
    fixed numbers.
``cube_grid``
    ``N^3`` periodic points, spectral ``p_x, p_y, p_z`` and ``L_z = x p_y - y p_x``.
``polar_modes``
    orbital angular-momentum ladder ``m = -M..M`` at fixed radial momentum
    ``p_rho`` and axial momentum ``p_z``; ``L_z = hbar m`` is exact and
    ``p_(+/-) = p_x +/- i p_y`` shift ``m`` by one (truncated at the edges).

Units: c = 1; momentum eigenvalues on grids are ``2 pi hbar k / box_length``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .operator_core import Operator

__all__ = [
    "GammaAlgebra",
    "BasisSpec",
    "build_gamma_algebra",
    "momentum_operator",
    "position_operator",
    "angular_momentum_z",
    "diagonal_field_operator",
    "spectral_momentum_matrix",
]

SPINOR_TAG = "spinor4"
KINDS = ("single_mode", "line_grid", "cube_grid", "polar_modes")
_AXES = {"x": 0, "y": 1, "z": 2, 0: 0, 1: 1, 2: 2}

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class GammaAlgebra:
    """Standard (Dirac) representation; ``Pi = beta Sigma``."""

    beta: Operator
    alpha: tuple[Operator, Operator, Operator]
    gamma: tuple[Operator, Operator, Operator]
    sigma: tuple[Operator, Operator, Operator]
    pi: tuple[Operator, Operator, Operator]


def build_gamma_algebra() -> GammaAlgebra:
    z2 = np.zeros((2, 2), dtype=complex)
    i2 = np.eye(2, dtype=complex)
    beta = np.block([[i2, z2], [z2, -i2]])
    alpha = [np.block([[z2, s], [s, z2]]) for s in _PAULI]
    sigma = [np.block([[s, z2], [z2, s]]) for s in _PAULI]
    op = lambda m, herm=True: Operator(m, SPINOR_TAG, herm)  # noqa: E731
    return GammaAlgebra(
        beta=op(beta),
        alpha=tuple(op(a) for a in alpha),
        gamma=tuple(op(beta @ a, False) for a in alpha),
        sigma=tuple(op(s) for s in sigma),
        pi=tuple(op(beta @ s) for s in sigma),
    )


def spectral_momentum_matrix(n: int, box_length: float, hbar: float) -> np.ndarray:
    """Hermitian ``N x N`` spectral derivative ``-i hbar d/dz`` on a periodic grid."""
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=box_length / n)
    f = np.fft.fft(np.eye(n), axis=0, norm="ortho")
    p = f.conj().T @ (hbar * k[:, None] * f)
    return 0.5 * (p + p.conj().T)


def _grid_points(n: int, box_length: float) -> np.ndarray:
    return (np.arange(n) - n // 2) * (box_length / n)


@dataclass(frozen=True)
class BasisSpec:
    kind: str
    N: int = 1
    box_length: float = 2.0 * np.pi
    transverse_momentum: tuple[float, float] = (0.0, 0.0)
    momentum: tuple[float, float, float] = (0.0, 0.0, 0.0)
    hbar: float = 1.0
    m_max: int = 0
    radial_momentum: float = 0.0
    axial_momentum: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}; expected one of {KINDS}")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        if self.kind in ("line_grid", "cube_grid"):
            if self.N < 2:
                raise ValueError("grid bases need N >= 2")
            if not self.box_length > 0:
                raise ValueError("box_length must be positive")
        if self.kind == "polar_modes" and self.m_max < 0:
            raise ValueError("m_max must be non-negative")
        object.__setattr__(self, "transverse_momentum", tuple(map(float, self.transverse_momentum)))
        object.__setattr__(self, "momentum", tuple(map(float, self.momentum)))

    @property
    def tag(self) -> str:
        if self.kind == "single_mode":
            detail = f"p={self.momentum}"
        elif self.kind == "line_grid":
            detail = f"N={self.N},L={self.box_length!r},pt={self.transverse_momentum}"
        elif self.kind == "cube_grid":
            detail = f"N={self.N},L={self.box_length!r}"
        else:
            detail = f"M={self.m_max},prho={self.radial_momentum!r},pz={self.axial_momentum!r}"
        return f"{self.kind}({detail},hbar={self.hbar!r})"

    @property
    def spatial_dim(self) -> int:
        return {
            "single_mode": 1,
            "line_grid": self.N,
            "cube_grid": self.N ** 3,
            "polar_modes": 2 * self.m_max + 1,
        }[self.kind]

    @property
    def dim(self) -> int:
        return 4 * self.spatial_dim

    @property
    def is_grid(self) -> bool:
        return self.kind in ("line_grid", "cube_grid")

    @property
    def momentum_quantum(self) -> float:
        """Grid spacing of momentum eigenvalues, ``2 pi hbar / L``."""
        return 2.0 * np.pi * self.hbar / self.box_length

    def with_hbar(self, hbar: float) -> "BasisSpec":
        from dataclasses import replace

        return replace(self, hbar=hbar)

    @cached_property
    def algebra(self) -> GammaAlgebra:
        return build_gamma_algebra()

    # Kronecker lifts -------------------------------------------------

    def spinor(self, m: Operator | np.ndarray) -> Operator:
        """Lift a 4x4 spinor matrix to ``M (x) I``."""
        a = m.entries if isinstance(m, Operator) else np.asarray(m)
        herm = m.hermitian_hint if isinstance(m, Operator) else False
        return Operator(np.kron(a, np.eye(self.spatial_dim)), self.tag, herm)

    def spatial(self, k: np.ndarray) -> Operator:
        """Lift a spatial matrix (or a diagonal given as a vector) to ``I_4 (x) K``."""
        k = np.asarray(k)
        if k.ndim == 1:
            k = np.diag(k)
        return Operator(np.kron(np.eye(4), k), self.tag)

    def identity(self) -> Operator:
        return Operator.identity(self.dim, self.tag)

    def constant(self, c: float) -> Operator:
        return Operator(c * np.eye(self.dim), self.tag, True)

    # Spatial factor matrices ---------------------------------------------

    def points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Cartesian coordinates of every spatial basis point, flattened."""
        if self.kind == "line_grid":
            z = _grid_points(self.N, self.box_length)
            zeros = np.zeros_like(z)
            return zeros, zeros, z
        if self.kind == "cube_grid":
            g = _grid_points(self.N, self.box_length)
            x, y, z = np.meshgrid(g, g, g, indexing="ij")
            return x.ravel(), y.ravel(), z.ravel()
        raise ValueError(f"{self.kind} has no position grid")

    def spatial_momentum(self, axis) -> np.ndarray:
        ax = _axis(axis)
        if self.kind == "single_mode":
            return np.array([[self.momentum[ax]]], dtype=complex)
        if self.kind == "line_grid":
            if ax == 2:
                return spectral_momentum_matrix(self.N, self.box_length, self.hbar)
            return self.transverse_momentum[ax] * np.eye(self.N, dtype=complex)
        if self.kind == "cube_grid":
            p1 = spectral_momentum_matrix(self.N, self.box_length, self.hbar)
            mats = [np.eye(self.N)] * 3
            mats[ax] = p1
            return np.kron(np.kron(mats[0], mats[1]), mats[2])
        n = 2 * self.m_max + 1
        if ax == 2:
            return self.axial_momentum * np.eye(n, dtype=complex)
        raise_ = np.diag(np.ones(n - 1), -1).astype(complex)  # |m> -> |m+1>
        lower = raise_.T
        if ax == 0:
            return 0.5 * self.radial_momentum * (raise_ + lower)
        return -0.5j * self.radial_momentum * (raise_ - lower)

    def spatial_momentum_squared(self) -> np.ndarray:
        return sum(
            (lambda p: p @ p)(self.spatial_momentum(ax)) for ax in range(3)
        )

    def spatial_position(self, axis) -> np.ndarray:
        return np.diag(self.points()[_axis(axis)]).astype(complex)

    def spatial_angular_momentum_z(self) -> np.ndarray:
        if self.kind == "polar_modes":
            return self.hbar * np.diag(np.arange(-self.m_max, self.m_max + 1)).astype(complex)
        if self.kind != "cube_grid":
            raise ValueError(f"L_z needs a cube_grid or polar_modes basis, got {self.kind}")
        x, y, _ = self.points()
        px, py = self.spatial_momentum(0), self.spatial_momentum(1)
        return x[:, None] * py - y[:, None] * px

    def check_commensurate(self, wavenumber: float, axis=2, rtol: float = 1e-9) -> int:
        """Return the integer ``n`` with ``wavenumber = 2 pi n / L``; raise otherwise."""
        if not self.is_grid:
            raise ValueError("commensurability only applies to grid bases")
        n = wavenumber * self.box_length / (2.0 * np.pi)
        k = int(round(n))
        if abs(n - k) > rtol * max(1.0, abs(n)):
            raise ValueError(
                f"wavenumber {wavenumber!r} is not a multiple of 2*pi/L (ratio {n!r})"
            )
        if abs(k) >= self.N // 2:
            raise ValueError(f"wavenumber index {k} is at or beyond the grid Nyquist limit")
        return k


def _axis(axis) -> int:
    try:
        return _AXES[axis]
    except KeyError:
        raise ValueError(f"invalid axis {axis!r}") from None


def momentum_operator(basis: BasisSpec, axis) -> Operator:
    """Canonical momentum component ``I_4 (x) p_axis`` (Hermitian)."""
    return basis.spatial(basis.spatial_momentum(axis)).as_hermitian()


def position_operator(basis: BasisSpec, axis) -> Operator:
    if not basis.is_grid:
        raise ValueError(f"{basis.kind} has no position operator")
    ax = _axis(axis)
    if basis.kind == "line_grid" and ax != 2:
        raise ValueError("line_grid represents only the z coordinate")
    return basis.spatial(basis.points()[ax]).as_hermitian()


def angular_momentum_z(basis: BasisSpec) -> Operator:
    """Orbital ``L_z``; ``x p_y - y p_x`` on a cube grid, ``hbar m`` on polar modes."""
    return basis.spatial(basis.spatial_angular_momentum_z()).as_hermitian()


def diagonal_field_operator(
    basis: BasisSpec, f: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
) -> Operator:
    """Multiplication operator ``f(r)`` sampled at the grid points."""
    if not basis.is_grid:
        raise ValueError(f"{basis.kind} has no position grid to sample on")
    x, y, z = basis.points()
    values = np.broadcast_to(np.asarray(f(x, y, z), dtype=complex), x.shape)
    return basis.spatial(values)
