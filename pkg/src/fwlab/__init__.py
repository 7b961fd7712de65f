"""Numerical laboratory for time-dependent Foldy-Wouthuysen transformations.

Dirac Hamiltonians, their exact (Eriksen) FW transforms and the energy
operators of different representations, all as dense finite matrices.
"""

from .basis import BasisSpec, GammaAlgebra, build_gamma_algebra
from .fields import PlaneWave, UniformStatic, UniformVectorPotential, sample
from .hamiltonians import ParticleParams
from .numeric import (
    DEFAULT_POLICY,
    BasisMismatchError,
    FWLabError,
    GapClosedError,
    NumericalPolicyError,
    NumericPolicy,
)
from .operator_core import EvenOddSplit, Operator, StateVector

__version__ = "0.1.0"

__all__ = [
    "BasisSpec",
    "GammaAlgebra",
    "build_gamma_algebra",
    "PlaneWave",
    "UniformStatic",
    "UniformVectorPotential",
    "sample",
    "ParticleParams",
    "DEFAULT_POLICY",
    "NumericPolicy",
    "FWLabError",
    "BasisMismatchError",
    "GapClosedError",
    "NumericalPolicyError",
    "Operator",
    "StateVector",
    "EvenOddSplit",
]
