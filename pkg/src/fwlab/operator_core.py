"""Dense complex operator algebra on a tagged basis.

Every operator carries the tag of the basis it was built on; mixing tags is a
:class:`BasisMismatchError`. Matrix functions go through a full Hermitian
eigendecomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from numbers import Number
from typing import Callable

import numpy as np

from .numeric import (
    DEFAULT_POLICY,
    BasisMismatchError,
    GapClosedError,
    NumericalPolicyError,
    NumericPolicy,
)

__all__ = [
    "Operator",
    "StateVector",
    "EvenOddSplit",
    "Spectrum",
    "commutator",
    "anticommutator",
    "spectrum",
    "hermitian_function",
    "sign_operator",
    "even_odd_split",
    "expectation",
    "hermitian_defect",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def hermitian_defect(a: np.ndarray) -> float:
    """Relative Frobenius defect ``||A - A^+|| / ||A||`` (0 for the zero matrix)."""
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(a - a.conj().T) / scale)


@dataclass(frozen=True, eq=False)
class Operator:
    entries: np.ndarray
    basis_tag: str
    hermitian_hint: bool = False
    tol: float = field(default=DEFAULT_POLICY.hermitian_tol, repr=False)

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"operator entries must be square, got shape {a.shape}")
        object.__setattr__(self, "entries", _frozen(a))
        if self.hermitian_hint:
            d = hermitian_defect(self.entries)
            if d > self.tol:
                raise NumericalPolicyError(
                    f"hermitian_hint set but Hermiticity defect is {d:.3e} > {self.tol:.1e}"
                )

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, dim: int, basis_tag: str) -> "Operator":
        return cls(np.eye(dim), basis_tag, True)

    @classmethod
    def zeros(cls, dim: int, basis_tag: str) -> "Operator":
        return cls(np.zeros((dim, dim)), basis_tag, True)

    def _check(self, other: "Operator") -> None:
        if not isinstance(other, Operator):
            raise TypeError(f"expected Operator, got {type(other).__name__}")
        if other.basis_tag != self.basis_tag:
            raise BasisMismatchError(f"basis mismatch: {self.basis_tag!r} vs {other.basis_tag!r}")
        if other.dim != self.dim:
            raise BasisMismatchError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _new(self, entries) -> "Operator":
        return Operator(entries, self.basis_tag, False)

    def __add__(self, other):
        if isinstance(other, Number):
            return self._new(self.entries + other * np.eye(self.dim))
        self._check(other)
        return self._new(self.entries + other.entries)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Number):
            return self._new(self.entries - other * np.eye(self.dim))
        self._check(other)
        return self._new(self.entries - other.entries)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self._new(-self.entries)

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return self._new(scalar * self.entries)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return self._new(self.entries / scalar)

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            if other.basis_tag != self.basis_tag:
                raise BasisMismatchError(
                    f"basis mismatch: {self.basis_tag!r} vs {other.basis_tag!r}"
                )
            return self.entries @ other.amplitudes
        self._check(other)
        return self._new(self.entries @ other.entries)

    @property
    def dag(self) -> "Operator":
        return self._new(self.entries.conj().T)

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.linalg.norm(self.entries))

    def hermitian_defect(self) -> float:
        return hermitian_defect(self.entries)

    def hermitian_part(self) -> "Operator":
        return self._new(0.5 * (self.entries + self.entries.conj().T))

    def as_hermitian(self, tol: float | None = None) -> "Operator":
        """Symmetrize after checking that the defect is within tolerance."""
        tol = DEFAULT_POLICY.hermitian_tol if tol is None else tol
        d = self.hermitian_defect()
        if d > tol:
            raise NumericalPolicyError(f"Hermiticity defect {d:.3e} exceeds {tol:.1e}")
        return Operator(0.5 * (self.entries + self.entries.conj().T), self.basis_tag, True)

    def allclose(self, other: "Operator", rtol: float) -> bool:
        self._check(other)
        scale = max(self.norm(), other.norm(), 1e-300)
        return (self - other).norm() <= rtol * scale

    def __repr__(self) -> str:
        return f"Operator(dim={self.dim}, basis_tag={self.basis_tag!r}, hermitian_hint={self.hermitian_hint})"


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    basis_tag: str
    tol: float = field(default=DEFAULT_POLICY.norm_tol, repr=False)

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.ndim != 1:
            raise ValueError("state amplitudes must be a vector")
        object.__setattr__(self, "amplitudes", _frozen(a))
        drift = abs(np.linalg.norm(a) - 1.0)
        if drift > self.tol:
            raise NumericalPolicyError(f"state norm defect {drift:.3e} exceeds {self.tol:.1e}")

    @classmethod
    def normalized(cls, amplitudes, basis_tag: str) -> "StateVector":
        a = np.asarray(amplitudes, dtype=complex)
        n = np.linalg.norm(a)
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(a / n, basis_tag)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def evolved(self, matrix: np.ndarray, tol: float | None = None) -> "StateVector":
        """Apply a (nominally unitary) matrix; the norm check of the constructor applies."""
        return StateVector(matrix @ self.amplitudes, self.basis_tag,
                           self.tol if tol is None else tol)


@dataclass(frozen=True)
class EvenOddSplit:
    even: Operator
    odd: Operator


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Cached eigendecomposition of a Hermitian operator."""

    values: np.ndarray
    vectors: np.ndarray
    basis_tag: str

    def apply(self, f: Callable[[np.ndarray], np.ndarray]) -> Operator:
        with np.errstate(divide="ignore", invalid="ignore"):
            fv = np.asarray(f(self.values), dtype=float)
        if fv.shape != self.values.shape:
            fv = np.broadcast_to(fv, self.values.shape)
        if not np.all(np.isfinite(fv)):
            bad = self.values[~np.isfinite(fv)]
            raise GapClosedError(f"function undefined at eigenvalue(s) {bad[:4]}")
        v = self.vectors
        m = (v * fv) @ v.conj().T
        m = 0.5 * (m + m.conj().T)
        return Operator(m, self.basis_tag, True)


def _check_pair(a: Operator, b: Operator) -> None:
    a._check(b)


def commutator(a: Operator, b: Operator) -> Operator:
    """``AB - BA``."""
    _check_pair(a, b)
    return a._new(a.entries @ b.entries - b.entries @ a.entries)


def anticommutator(a: Operator, b: Operator) -> Operator:
    """``AB + BA``."""
    _check_pair(a, b)
    return a._new(a.entries @ b.entries + b.entries @ a.entries)


def spectrum(a: Operator, policy: NumericPolicy = DEFAULT_POLICY) -> Spectrum:
    d = a.hermitian_defect()
    if d > policy.hermitian_tol:
        raise NumericalPolicyError(f"matrix function of non-Hermitian input (defect {d:.3e})")
    h = 0.5 * (a.entries + a.entries.conj().T)
    w, v = np.linalg.eigh(h)
    return Spectrum(w, v, a.basis_tag)


def hermitian_function(
    a: Operator, f: Callable[[np.ndarray], np.ndarray], policy: NumericPolicy = DEFAULT_POLICY
) -> Operator:
    """``V f(L) V^+`` for ``A = V L V^+``; ``f`` must be vectorized over eigenvalues."""
    return spectrum(a, policy).apply(f)


def sign_operator(
    h: Operator, policy: NumericPolicy = DEFAULT_POLICY, gap: float | None = None
) -> Operator:
    """``H (H^2)^(-1/2)``; an eigenvalue within the gap threshold is an error."""
    sp = spectrum(h, policy)
    scale = float(np.max(np.abs(sp.values))) if sp.values.size else 0.0
    threshold = policy.gap_rel * scale if gap is None else gap
    smallest = float(np.min(np.abs(sp.values)))
    if smallest <= threshold:
        raise GapClosedError(
            f"eigenvalue {smallest:.3e} within gap threshold {threshold:.3e}; sign undefined"
        )
    return sp.apply(np.sign)


def even_odd_split(
    a: Operator, beta: Operator, policy: NumericPolicy = DEFAULT_POLICY
) -> EvenOddSplit:
    """Split into parts commuting and anticommuting with an involution ``beta``."""
    a._check(beta)
    b = beta.entries
    defect = np.linalg.norm(b @ b - np.eye(beta.dim)) / np.sqrt(beta.dim)
    if defect > policy.involution_tol:
        raise NumericalPolicyError(f"beta is not involutory (defect {defect:.3e})")
    bab = b @ a.entries @ b
    return EvenOddSplit(a._new(0.5 * (a.entries + bab)), a._new(0.5 * (a.entries - bab)))


def expectation(a: Operator, psi: StateVector) -> complex:
    """``<psi|A|psi>``."""
    if a.basis_tag != psi.basis_tag:
        raise BasisMismatchError(f"basis mismatch: {a.basis_tag!r} vs {psi.basis_tag!r}")
    return complex(np.vdot(psi.amplitudes, a.entries @ psi.amplitudes))
