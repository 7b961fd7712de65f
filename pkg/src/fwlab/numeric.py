"""Numeric policy and the exception hierarchy shared by every module."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace


class FWLabError(Exception):
    """Base class for all library errors."""


class BasisMismatchError(FWLabError, ValueError):
    """Operands live on different bases."""


class NumericalPolicyError(FWLabError, ArithmeticError):
    """A numerical invariant was violated beyond the configured tolerance."""


class GapClosedError(NumericalPolicyError):
    """An eigenvalue sits inside the forbidden gap (sign or inverse root undefined)."""


@dataclass(frozen=True)
class NumericPolicy:
    """Every tolerance used by the library, in one record.

    ``scaled(k)`` multiplies the tolerances (not the step sizes) by ``k``;
    this is what ``--tolerance-scale`` on the command line maps to.
    """

    hermitian_tol: float = 1e-12
    unitary_tol: float = 1e-12
    norm_tol: float = 1e-12
    involution_tol: float = 1e-10
    gap_rel: float = 1e-8
    eriksen_denominator_tol: float = 1e-10
    fd_step: float = 1e-5
    form_agreement_tol: float = 1e-6
    exactness_tol: float = 1e-10

    def scaled(self, factor: float) -> "NumericPolicy":
        if not factor > 0:
            raise ValueError("tolerance scale must be positive")
        keep = {"fd_step"}
        return replace(
            self,
            **{f.name: getattr(self, f.name) * factor for f in fields(self) if f.name not in keep},
        )

    def with_overrides(self, overrides: dict[str, float]) -> "NumericPolicy":
        names = {f.name for f in fields(self)}
        unknown = set(overrides) - names
        if unknown:
            raise ValueError(f"unknown numeric_policy keys: {sorted(unknown)}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})


DEFAULT_POLICY = NumericPolicy()
