"""Invariant battery behind ``fwlab verify``.

Each suite is a function returning a list of checks; a check records the
measured defect and the threshold it was held to. Random inputs come from a
fixed seed so reports are reproducible.
"""

from __future__ import annotations

import time
from typing import Callable

import numpy as np

from .basis import BasisSpec, angular_momentum_z, build_gamma_algebra, momentum_operator
from .fields import PlaneWave, UniformStatic, UniformVectorPotential, field_values, sample
from .hamiltonians import (
    ParticleParams,
    dirac_hamiltonian,
    dirac_parts,
    fw_hamiltonian_analytic,
    fw_hamiltonian_terms,
)
from .numeric import DEFAULT_POLICY
from .operator_core import (
    Operator,
    StateVector,
    anticommutator,
    commutator,
    even_odd_split,
    expectation,
    hermitian_function,
    sign_operator,
)
from .transforms import (
    TimedUnitary,
    check_eriksen_condition,
    eriksen_operator,
    transform_hamiltonian_forms,
    unitarity_defect,
)

__all__ = ["SUITES", "random_dirac_type", "random_state", "run_suites"]

SEED = 20240611


class _Collector:
    def __init__(self, suite: str, scale: float):
        self.suite, self.scale, self.checks = suite, scale, []

    def at_most(self, name: str, measured: float, threshold: float):
        thr = threshold * self.scale
        self.checks.append(dict(suite=self.suite, name=name, measured=float(measured),
                                threshold=float(thr), passed=bool(measured <= thr)))

    def within(self, name: str, measured: float, lo: float, hi: float):
        ok = lo <= measured <= hi
        self.checks.append(dict(suite=self.suite, name=name, measured=float(measured),
                                threshold=[lo, hi], passed=bool(ok)))


def random_dirac_type(rng: np.random.Generator, n_spatial: int, mass: float = 1.0,
                      scale: float = 0.4) -> tuple[Operator, Operator]:
    """``(H, beta)`` with ``H = beta m + E + O``, random Hermitian even and odd parts.

    ``E`` is kept below the mass so the spectrum has a gap around zero.
    """
    dim = 4 * n_spatial
    tag = f"random({n_spatial})"
    beta = Operator(np.kron(np.diag([1.0, 1.0, -1.0, -1.0]), np.eye(n_spatial)), tag, True)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    a = Operator((a + a.conj().T) / 2, tag, True)
    split = even_odd_split(a, beta)
    even = split.even * (scale * mass / max(np.linalg.norm(split.even.entries, 2), 1e-300))
    odd = split.odd * (2.0 * mass / max(np.linalg.norm(split.odd.entries, 2), 1e-300))
    return (beta * mass + even + odd).as_hermitian(1e-12), beta


def random_state(rng: np.random.Generator, dim: int, tag: str) -> StateVector:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector.normalized(v, tag)


def _rel(x: Operator, y: Operator) -> float:
    return (x - y).norm() / max(y.norm(), 1e-300)


def suite_trivial_algebra(c: _Collector):
    g = build_gamma_algebra()
    eye = np.eye(4)
    c.at_most("beta^2 = I", np.linalg.norm(g.beta.entries @ g.beta.entries - eye), 1e-15)
    for i in range(3):
        c.at_most(f"beta alpha_{i} + alpha_{i} beta", anticommutator(g.beta, g.alpha[i]).norm(), 1e-15)
        c.at_most(f"gamma_{i} = beta alpha_{i}", (g.gamma[i] - g.beta @ g.alpha[i]).norm(), 1e-15)
        c.at_most(f"Pi_{i} = beta Sigma_{i}", (g.pi[i] - g.beta @ g.sigma[i]).norm(), 1e-15)
        for j in range(3):
            d = anticommutator(g.alpha[i], g.alpha[j]).entries - 2.0 * (i == j) * eye
            c.at_most(f"{{alpha_{i}, alpha_{j}}} = 2 delta", np.linalg.norm(d), 1e-15)
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        d = commutator(g.sigma[i], g.sigma[j]) - g.sigma[k] * 2j
        c.at_most(f"[Sigma_{i}, Sigma_{j}] = 2i Sigma_{k}", d.norm(), 1e-15)
    b = BasisSpec("line_grid", N=8)
    kron = commutator(b.spinor(g.beta), momentum_operator(b, "z")).norm()
    c.at_most("[beta x I, I x p_z] = 0", kron, 0.0 + 1e-300)


def suite_operator_core(c: _Collector):
    rng = np.random.default_rng(SEED)
    for n in (4, 16, 32):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = Operator((a + a.conj().T) / 2, "r", True)
        fa = hermitian_function(h, np.tanh)
        c.at_most(f"[f(A), A] = 0 (n={n})", commutator(fa, h).norm() / (h.norm() * fa.norm()), 1e-10)
        lam = sign_operator(h)
        c.at_most(f"sign^2 = I (n={n})", (lam @ lam - Operator.identity(n, "r")).norm() / np.sqrt(n), 1e-10)
        c.at_most(f"[sign, H] = 0 (n={n})", commutator(lam, h).norm() / h.norm(), 1e-10)
    h, beta = random_dirac_type(rng, 4)
    s = even_odd_split(h, beta)
    c.at_most("even + odd = H", (s.even + s.odd - h).norm(), 1e-15 * h.norm())
    c.at_most("split idempotent on even part", (even_odd_split(s.even, beta).even - s.even).norm(),
              1e-15 * h.norm())
    psi = random_state(rng, h.dim, h.basis_tag)
    z = expectation(h, psi)
    c.at_most("Im <H> for Hermitian H", abs(z.imag), 1e-12 * abs(z.real) + 1e-14)


def suite_basis(c: _Collector):
    b = BasisSpec("line_grid", N=8, box_length=2 * np.pi)
    pz = momentum_operator(b, "z")
    c.at_most("p_z Hermitian", pz.hermitian_defect(), 1e-15)
    ev = np.sort(np.linalg.eigvalsh(b.spatial_momentum("z")))
    c.at_most("p_z spectrum = {-4..3}", np.max(np.abs(ev - np.arange(-4, 4))), 1e-12)
    cube = BasisSpec("cube_grid", N=4)
    lz = angular_momentum_z(cube)
    c.at_most("L_z Hermitian", lz.hermitian_defect() / lz.norm(), 1e-12)
    c.at_most("[L_z, p_z] = 0", commutator(lz, momentum_operator(cube, "z")).norm(), 1e-10)
    try:
        b.check_commensurate(1.5)
        rejected = 0.0
    except ValueError:
        rejected = 1.0
    c.within("incommensurate wavenumber rejected", rejected, 1.0, 1.0)


def suite_fields(c: _Collector):
    b = BasisSpec("line_grid", N=16, box_length=2 * np.pi * 4)
    pw = PlaneWave(E0=(0.3, -0.2, 0.0), omega=2 * np.pi / b.box_length * 2)
    for t in (0.0, 0.7):
        v = field_values(pw, b, t)
        c.at_most(f"A_dot = -E (t={t})", np.max(np.abs(v["A_dot"] + v["E"])), 1e-15)
        h = 1e-6
        vp, vm = field_values(pw, b, t + h), field_values(pw, b, t - h)
        for key, base in (("A", "A_dot"), ("E", "E_dot"), ("B", "B_dot")):
            fd = (vp[key] - vm[key]) / (2 * h)
            err = np.max(np.abs(fd - v[base])) / max(np.max(np.abs(v[base])), 1e-300)
            c.at_most(f"d{key}/dt analytic vs FD (t={t})", err, 1e-8)
        # spectral curl of B (only z-derivatives on a line): (curl B)_x = -dB_y/dz, (curl B)_y = dB_x/dz
        pz = b.spatial_momentum("z")
        dz = lambda f: (1j / b.hbar) * (pz @ f)  # noqa: E731
        curl = np.array([-dz(v["B"][1]), dz(v["B"][0]), np.zeros(b.N)])
        c.at_most(f"curl B - dE/dt = 0 (t={t})", np.max(np.abs(curl - v["E_dot"])), 1e-10)
    ua = UniformVectorPotential(amplitude=(0.1, 0.0, 0.2), frequency=0.9)
    v = field_values(ua, b, 0.4)
    c.at_most("uniform A: E = -A_dot", np.max(np.abs(v["E"] + v["A_dot"])), 1e-15)


def suite_hamiltonians(c: _Collector):
    b = BasisSpec("line_grid", N=8, box_length=2 * np.pi * 4, transverse_momentum=(0.2, 0.1))
    p = ParticleParams(g=2.4, d_hat=0.2)
    pw = PlaneWave(E0=(0.1, 0.05, 0.0), omega=2 * np.pi / b.box_length)
    fs = sample(pw, b, 0.3)
    h = dirac_hamiltonian(fs, p, b)
    c.at_most("Dirac H Hermitian", h.hermitian_defect() / h.norm(), 1e-12)
    fw = fw_hamiltonian_analytic(fs, p, b)
    c.at_most("FW H Hermitian", fw.hermitian_defect() / fw.norm(), 1e-12)
    beta = b.spinor(b.algebra.beta)
    even, odd = dirac_parts(fs, p, b)
    s = even_odd_split(h - beta * p.m, beta)
    c.at_most("split reproduces E", (s.even - even).norm(), 1e-13 * h.norm())
    c.at_most("split reproduces O", (s.odd - odd).norm(), 1e-13 * h.norm())
    zero = sample(UniformStatic(), b, 0.0)
    terms = fw_hamiltonian_terms(zero, p, b)
    spin_terms = sum((v.norm() for k, v in terms.items() if k not in ("rest", "scalar")), 0.0)
    c.at_most("zero fields: only beta eps' survives", spin_terms, 1e-14)
    tiny = ParticleParams(g=2.4, d_hat=0.2, hbar=1e-9)
    bt = b.with_hbar(1e-9)
    ft = fw_hamiltonian_terms(sample(pw, bt, 0.3), tiny, bt)
    ratio = sum(v.norm() for k, v in ft.items() if k not in ("rest", "scalar")) / ft["rest"].norm()
    c.at_most("hbar -> 0 removes spin terms", ratio, 1e-8)


def suite_eriksen(c: _Collector):
    rng = np.random.default_rng(SEED + 1)
    worst = dict(odd=0.0, unit=0.0, cond=0.0, spec=0.0, proj=0.0, lower=0.0)
    cases = [random_dirac_type(rng, n) for n in (1, 2, 4, 8, 16)]
    sm = BasisSpec("single_mode", momentum=(0.3, -0.2, 0.75))
    stat = sample(UniformStatic(E0=(0.1, 0.0, 0.05), B0=(0.0, 0.2, 0.4)), sm, 0.0)
    p = ParticleParams(g=2.3, d_hat=0.1)
    cases.append((dirac_hamiltonian(stat, p, sm), sm.spinor(sm.algebra.beta)))
    for h, beta in cases:
        u = eriksen_operator(h, beta)
        hf = (u @ h @ u.dag).hermitian_part()
        worst["odd"] = max(worst["odd"], even_odd_split(hf, beta).odd.norm() / h.norm())
        worst["unit"] = max(worst["unit"], unitarity_defect(u))
        worst["cond"] = max(worst["cond"], check_eriksen_condition(u, beta))
        e1, e2 = np.linalg.eigvalsh(h.entries), np.linalg.eigvalsh(hf.entries)
        worst["spec"] = max(worst["spec"], np.max(np.abs(e1 - e2)) / np.max(np.abs(e1)))
        lam = sign_operator(h)
        proj = (lam + 1.0) * 0.5
        worst["proj"] = max(worst["proj"], commutator(proj, h).norm() / h.norm())
        w, v = np.linalg.eigh(h.entries)
        n = h.dim // 4
        moved = u.entries @ v[:, w > 0]
        worst["lower"] = max(worst["lower"], float(np.max(np.linalg.norm(moved[2 * n:], axis=0))))
    c.at_most("odd part of U H U^-1 (relative)", worst["odd"], 1e-10)
    c.at_most("unitarity defect", worst["unit"], 1e-12)
    c.at_most("beta U - U^+ beta", worst["cond"], 1e-12)
    c.at_most("spectrum preserved", worst["spec"], 1e-10)
    c.at_most("[(1 + lambda)/2, H] = 0", worst["proj"], 1e-10)
    c.at_most("positive-energy states have no lower components", worst["lower"], 1e-10)


def _rotation_unitary(basis: BasisSpec, theta: Callable[[float], float],
                      dtheta: Callable[[float], float] | None = None, step: float = 1e-5):
    sz = basis.algebra.sigma[2].entries.real.diagonal()
    diag = np.kron(sz, np.ones(basis.spatial_dim))

    def u(t):
        return Operator(np.diag(np.exp(-0.5j * theta(t) * diag)), basis.tag)

    du = None
    if dtheta is not None:
        def du(t):
            return Operator(np.diag(-0.5j * dtheta(t) * diag * np.exp(-0.5j * theta(t) * diag)), basis.tag)
    return TimedUnitary(u, du, fd_step=step)


def suite_transforms(c: _Collector):
    rng = np.random.default_rng(SEED + 2)
    h, beta = random_dirac_type(rng, 2)
    n = h.dim
    # an arbitrary smooth U(t) = exp(-i t K) exp(-i sin(t) G)
    k = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    ek = np.linalg.eigh((k + k.conj().T) / 4)
    eg = np.linalg.eigh((g + g.conj().T) / 4)

    def u(t):
        m1 = (ek[1] * np.exp(-1j * t * ek[0])) @ ek[1].conj().T
        m2 = (eg[1] * np.exp(-1j * np.sin(t) * eg[0])) @ eg[1].conj().T
        return Operator(m1 @ m2, h.basis_tag)

    ratios, gaps = [], []
    for step in (4e-3, 2e-3, 1e-3):
        fi, fd = transform_hamiltonian_forms(h, TimedUnitary(u, fd_step=step, unitary_tol=1e-11), 0.4)
        gaps.append((fi - fd).norm() / fd.norm())
    ratios = [gaps[0] / gaps[1], gaps[1] / gaps[2]]
    for i, r in enumerate(ratios):
        c.within(f"form disagreement halving ratio #{i}", r, 3.5, 4.5)
    b = BasisSpec("single_mode", momentum=(0.0, 0.0, 0.5))
    nu = 0.8
    rot = _rotation_unitary(b, lambda t: nu * t, lambda t: nu + 0 * t)
    hb = b.spinor(b.algebra.beta) * 1.0
    _, fd = transform_hamiltonian_forms(hb, rot, 0.3)
    expect = hb + b.spinor(b.algebra.sigma[2]) * (0.5 * nu)
    c.at_most("rotation: H' = beta m + (hbar nu / 2) Sigma_z", (fd - expect).norm(), 1e-14)


def suite_energetics(c: _Collector):
    from .energetics import (
        dirac_energy_operator_em,
        dirac_energy_operator_general,
        epsilon_rate,
        fw_energy_difference,
    )
    from .scenarios import plane_wave, run, uniform_A
    from dataclasses import replace

    rng = np.random.default_rng(SEED + 3)
    h, beta = random_dirac_type(rng, 4)
    u = eriksen_operator(h, beta)
    psi = random_state(rng, h.dim, h.basis_tag)
    psi_p = psi.evolved(u.entries, tol=1e-10)
    inv = abs(expectation(u @ h @ u.dag, psi_p) - expectation(h, psi))
    c.at_most("unitary invariance |<UHU^-1>' - <H>|", inv, 1e-12)
    for sc in (plane_wave(steps=4, t_end=0.4), uniform_A(steps=4, t_end=0.4)):
        r = run(sc)
        worst = max(abs(x.eev_fw_direct - x.eev_primed_corrected) for x in r.reports)
        c.at_most(f"{sc.name}: Dirac EEV (corrected) = FW EEV", worst, 1e-8)
        bad = max(abs(x.eev_primed_naive - x.gap - x.eev_primed_corrected) for x in r.reports)
        c.at_most(f"{sc.name}: corrected = naive - gap", bad, 1e-12)
    sc = replace(plane_wave(particle=ParticleParams(g=2.3, d_hat=0.1)))
    b, p, t = sc.basis, sc.particle, 0.3
    fs = sample(sc.fields, b, t)
    hd = dirac_hamiltonian(fs, p, b)
    beta = b.spinor(b.algebra.beta)
    odd_of = lambda s: dirac_parts(sample(sc.fields, b, s), p, b)[1]  # noqa: E731
    step = DEFAULT_POLICY.fd_step
    odot = (odd_of(t + step) - odd_of(t - step)) / (2 * step)
    ops = {
        "eq16": fw_energy_difference(fs, p, b),
        "eq19": dirac_energy_operator_general(hd, even_odd_split(hd, beta), odot, p,
                                              epsilon_rate(odd_of, t, p.m), beta),
        "eq21": dirac_energy_operator_em(hd, fs, p, b),
    }
    for k, op in ops.items():
        c.at_most(f"{k} operator Hermitian", op.hermitian_defect() / max(op.norm(), 1e-300), 1e-10)


def suite_dynamics(c: _Collector):
    from .dynamics import propagate, step_error_ratio, uniform_grid
    from .scenarios import rotating_frame

    rng = np.random.default_rng(SEED + 4)
    h, _ = random_dirac_type(rng, 4)
    psi0 = random_state(rng, h.dim, h.basis_tag)
    grid = uniform_grid(10.0, 1000)
    tr = propagate(h, psi0, grid)
    nd = tr.norm_defects()
    c.at_most("norm drift over 1000 steps", float(np.max(nd)), 1e-9)
    c.at_most("norm drift per step", float(np.max(np.abs(np.diff(nd)))), 1e-12)
    e = np.array([expectation(h, s).real for s in tr.states])
    c.at_most("static H: energy conserved (relative)", float(np.max(np.abs(e - e[0]))) / abs(e[0]), 1e-10)
    # convergence order on a genuinely time-dependent H
    k = rng.normal(size=(h.dim, h.dim)) + 1j * rng.normal(size=(h.dim, h.dim))
    v = Operator((k + k.conj().T) / 8, h.basis_tag, True)
    hot = lambda t: (h + v * np.sin(1.3 * t)).hermitian_part()  # noqa: E731
    _, _, ratio = step_error_ratio(hot, psi0, 2.0, 50)
    c.within("step-halving error ratio (vs dt/8 reference)", ratio, 3.5, 4.5)
    sc = rotating_frame()
    w = sc.rotation
    grid = uniform_grid(1.0, 500)
    psi = sc.initial_fw_state()
    tr = propagate(sc.fw_hamiltonian, psi, grid, basis=sc.basis)
    from .dynamics import rotation_z

    err = max(np.linalg.norm(s - rotation_z(-w.angle(t)) @ tr.spin[0]) for t, s in zip(grid, tr.spin))
    c.at_most("rotating-frame spin follows R_z(-int omega)", err, 1e-6)


def suite_hbar_scaling(c: _Collector):
    from .dynamics import hbar_scaling_study
    from .scenarios import hbar_scaling

    st = hbar_scaling_study(hbar_scaling(), (1.0, 0.5, 0.25, 0.125))
    for k in ("eq19", "eq21", "eq16"):
        c.within(f"plane wave {k} residual slope", st.slopes[k], 1.9, 2.1)


def suite_cli(c: _Collector):
    from . import config as cfgmod

    for name in ("free_particle", "plane_wave", "rotating_frame", "hbar_scaling"):
        first = cfgmod.dump(cfgmod.loads(f"scenario: {name}\n"))
        second = cfgmod.dump(cfgmod.loads(first))
        c.within(f"config round trip is byte-identical ({name})", float(first == second), 1.0, 1.0)


SUITES: dict[str, Callable[[_Collector], None]] = {
    "trivial-algebra": suite_trivial_algebra,
    "operator-core": suite_operator_core,
    "basis": suite_basis,
    "fields": suite_fields,
    "hamiltonians": suite_hamiltonians,
    "eriksen": suite_eriksen,
    "transforms": suite_transforms,
    "energetics": suite_energetics,
    "dynamics": suite_dynamics,
    "hbar-scaling": suite_hbar_scaling,
    "cli": suite_cli,
}


def run_suites(names=None, tolerance_scale: float = 1.0) -> dict:
    """Run the named suites (all by default) and return a JSON-ready report."""
    names = list(SUITES) if not names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s) {unknown}; available: {list(SUITES)}")
    checks, timings = [], {}
    for n in names:
        col = _Collector(n, tolerance_scale)
        t0 = time.perf_counter()
        SUITES[n](col)
        timings[n] = round(time.perf_counter() - t0, 3)
        checks.extend(col.checks)
    return {
        "schema": "fw-lab/1",
        "suites": names,
        "tolerance_scale": tolerance_scale,
        "passed": all(ch["passed"] for ch in checks),
        "n_checks": len(checks),
        "n_failed": sum(not ch["passed"] for ch in checks),
        "checks": checks,
        "seconds": timings,
    }
