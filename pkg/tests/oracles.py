"""Reference implementations that share no code with the package."""

import numpy as np
from scipy.linalg import expm


def tbmt_omega(pi, E, B, m=1.0, e=1.0, g=2.0, eta=0.0):
    """Thomas-BMT precession vector in the velocity form (c = 1).

    ds/dt = Omega x s with a = (g - 2)/2 and the EDM strength eta,
    written in terms of beta = v and gamma rather than momenta.
    """
    pi, E, B = (np.asarray(v, dtype=float) for v in (pi, E, B))
    gamma = np.sqrt(1.0 + pi @ pi / m ** 2)
    beta = pi / (gamma * m)
    a = 0.5 * (g - 2.0)
    mdm = (a + 1.0 / gamma) * B - a * gamma / (gamma + 1.0) * (beta @ B) * beta \
        - (a + 1.0 / (gamma + 1.0)) * np.cross(beta, E)
    edm = E - gamma / (gamma + 1.0) * (beta @ E) * beta + np.cross(beta, B)
    return -(e / m) * mdm - 0.5 * eta * (e / m) * edm


def eta_from_d_hat(d_hat, m=1.0, e=1.0):
    """d = d_hat * hbar  <->  eta e / (2m) = 2 d / hbar."""
    return 4.0 * m * d_hat / e


DIRAC_BETA = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)
_P = [np.array([[0, 1], [1, 0]], complex), np.array([[0, -1j], [1j, 0]]), np.diag([1.0 + 0j, -1.0])]
DIRAC_ALPHA = [np.block([[np.zeros((2, 2)), s], [s, np.zeros((2, 2))]]) for s in _P]


def free_fw_unitary(p, m=1.0):
    """(eps + m + beta alpha.p) / sqrt(2 eps (eps + m)) for one momentum mode."""
    p = np.asarray(p, dtype=float)
    eps = np.sqrt(m * m + p @ p)
    ap = sum(pi * a for pi, a in zip(p, DIRAC_ALPHA))
    return ((eps + m) * np.eye(4) + DIRAC_BETA @ ap) / np.sqrt(2 * eps * (eps + m))


def single_exponential(h, psi0, t, hbar=1.0):
    """exp(-i H t / hbar) psi0 by Pade scaling-and-squaring."""
    return expm(-1j * np.asarray(h) * t / hbar) @ np.asarray(psi0)
