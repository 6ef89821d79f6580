"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records a one-line PASS/FAIL verdict that is printed in the
terminal summary, then asserts.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
from scipy.integrate import quad

from conftest import ACCEPTANCE_LINES, random_op
from resonant_pu.algebra import verify_identity_suite
from resonant_pu.classical import (
    block_eigenvalues,
    build_H2_classical,
    build_Hg_classical,
    build_J2,
    build_Jg,
    build_Mp_Mv,
    combined_pair,
    conserved_Q,
    definiteness_scan,
    flow_field,
    integrate,
    jordan_structure,
    propagator,
)
from resonant_pu.errors import ForbiddenRay
from resonant_pu.factorization import (
    diagonalize_form,
    effective_hamiltonian,
    gaussian_moment,
    quad_form_matrix,
    transformed_hamiltonian,
)
from resonant_pu.params import (
    PhaseState,
    hg_value,
    hpu_value,
    is_normalizable,
    pu_frequencies,
    pu_from_ghost,
    sample_param_list,
    sample_params,
)
from resonant_pu.spectrum import (
    build_chain,
    eigenvalue_E,
    raise_with_Aplus,
    verify_sector_actions,
)
from resonant_pu.weyl import apply_to_poly, commutator, compose, residual

SEED = 42


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def mixed_samples(n: int, seed: int = SEED):
    rng = np.random.default_rng(seed)
    return [sample_params(rng, 1 if i % 2 == 0 else -1) for i in range(n)]


def test_criterion_01_algebra_suite():
    t0 = time.perf_counter()
    worst = 0.0
    failed = set()
    n_checks = 0
    for p in mixed_samples(100):
        rep = verify_identity_suite(p, 1e-10, ("xy", "pu"))
        n_checks = max(n_checks, len(rep.checks))
        worst = max(worst, rep.worst())
        failed.update(rep.failed())
    elapsed = time.perf_counter() - t0
    ok = not failed and elapsed < 10.0
    record(1, ok, f"{n_checks} identities x 100 samples, both representations, worst residual {worst:.2e} (tol 1e-10), {elapsed:.1f} s (budget 10 s)")
    assert not failed, sorted(failed)
    assert elapsed < 10.0


def _monomials(max_degree):
    return [{(i, n - i): 1.0} for n in range(max_degree + 1) for i in range(n + 1)]


def _pdiff(p, q):
    keys = set(p) | set(q)
    return max((abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys), default=0.0)


def test_criterion_02_weyl_oracle():
    rng = np.random.default_rng(SEED)
    monos = _monomials(6)
    worst_oracle = 0.0
    for _ in range(500):
        A = random_op(rng, 4, int(rng.integers(1, 6)))
        B = random_op(rng, 4, int(rng.integers(1, 6)))
        AB = compose(A, B)
        scale = max(1.0, AB.max_coeff())
        for m in monos:
            worst_oracle = max(worst_oracle, _pdiff(apply_to_poly(AB, m), apply_to_poly(A, apply_to_poly(B, m))) / scale)
    worst_jac = worst_leib = 0.0
    for _ in range(100):
        A, B, C = (random_op(rng, 3, 3) for _ in range(3))
        jac = commutator(A, commutator(B, C)) + commutator(B, commutator(C, A)) + commutator(C, commutator(A, B))
        worst_jac = max(worst_jac, jac.max_coeff() / max(1.0, A.max_coeff() * B.max_coeff() * C.max_coeff()))
        lhs = commutator(A, compose(B, C))
        rhs = compose(commutator(A, B), C) + compose(B, commutator(A, C))
        worst_leib = max(worst_leib, residual(lhs, rhs))
    ok = max(worst_oracle, worst_jac, worst_leib) < 1e-10
    record(2, ok, f"oracle {worst_oracle:.1e} over 500 pairs x 28 monomials, Jacobi {worst_jac:.1e}, Leibniz {worst_leib:.1e} (tol 1e-10)")
    assert ok


def test_criterion_03_jordan_chains():
    worst = 0.0
    bad = []
    for i, p in enumerate(sample_param_list(20, SEED)):
        for k in range(1, 13):
            ch = build_chain(k, p, tol=1e-9)
            worst = max(worst, ch.termination_residual, *ch.relation_residuals, *ch.h2_residuals)
            if not ch.passed:
                bad.append((i, k))
            if k <= 8 and not verify_sector_actions(k, p, 1e-9).passed:
                bad.append((i, k, "sector"))
    ok = not bad
    record(3, ok, f"k <= 12 (stretch) x 20 samples: termination, l(k-l) relations, sector actions, H2 diagonal; worst {worst:.1e} (tol 1e-9)")
    assert ok, bad


def test_criterion_04_eigenvalue_cross_identities():
    worst_e = worst_r = 0.0
    for p in sample_param_list(20, SEED, eta=1):
        for n in range(9):
            E = eigenvalue_E(n, p)
            worst_e = max(worst_e, abs(E - 2 * p.kappa * (n + 1)) / E)
            r = raise_with_Aplus(n, p)
            worst_r = max(worst_r, r.magnitude_residual if math.isfinite(r.ratio) else math.inf)
    ok = worst_e < 1e-9 and worst_r < 1e-9
    record(4, ok, f"E_n = 2 kappa (n+1) = (n+1)(alpha-beta) worst {worst_e:.1e}; |A+^n psi0 / (x-y)^n G| = kappa^n worst {worst_r:.1e}, n <= 8 (tol 1e-9)")
    assert ok


def test_criterion_05_classical_equivalences():
    rng = np.random.default_rng(SEED)
    params = sample_param_list(20, SEED)
    worst_flow = worst_pair = 0.0
    for i in range(100):
        p = params[i % len(params)]
        z = rng.uniform(-3, 3, 4)
        a = flow_field(build_Jg(), build_Hg_classical(p), z)
        b = flow_field(build_J2(p), build_H2_classical(p), z)
        worst_flow = max(worst_flow, np.abs(a - b).max() / (np.abs(a).max() * max(1.0, np.abs(z).max())))
        while True:
            c1, c2 = rng.uniform(-5, 5, 2)
            try:
                cp = combined_pair(c1, c2, p)
                break
            except ForbiddenRay:
                continue
        fb = flow_field(cp.Jbar, cp.Hbar, z)
        scale = np.abs(cp.Jbar.J).max() * np.abs(cp.Hbar.Hmat).max() * max(1.0, np.abs(z).max())
        worst_pair = max(worst_pair, np.abs(fb - a).max() / max(1.0, scale))

    in_window = [p for p in sample_param_list(200, SEED) if 0.5 <= p.omega <= 3.0][:10]
    worst_traj = worst_H = worst_Q = 0.0
    for p in in_window:
        z0 = rng.uniform(-1, 1, 4)
        t, Z = integrate(build_Jg(), build_Hg_classical(p), z0, 10.0, 1e-3)
        exact = np.array([propagator(p, ti) @ z0 for ti in t])
        worst_traj = max(worst_traj, np.abs(Z - exact).max())
        H = build_Hg_classical(p)
        Hv = np.einsum("ij,jk,ik->i", Z, H.Hmat, Z)
        worst_H = max(worst_H, np.abs(Hv - Hv[0]).max())
        Qv = np.array([conserved_Q(z, p) for z in Z])
        worst_Q = max(worst_Q, np.abs(Qv - Qv[0]).max())

    worst_cp = worst_b2 = 0.0
    for p in params:
        js = jordan_structure(p)
        worst_cp = max(worst_cp, js["charpoly_residual"])
        worst_b2 = max(worst_b2, js["B2_residual"])

    ok = (worst_flow < 1e-12 and worst_pair < 1e-12 and worst_traj < 1e-6
          and worst_H < 1e-8 and worst_Q < 1e-8 and worst_cp < 1e-10 and worst_b2 < 1e-10)
    record(5, ok, f"flow {worst_flow:.1e}, combined {worst_pair:.1e} (1e-12); RK4 vs exact {worst_traj:.1e} (1e-6); "
                  f"H drift {worst_H:.1e}, Q drift {worst_Q:.1e} (1e-8); charpoly {worst_cp:.1e}, (A^2+w^2)^2 {worst_b2:.1e} (1e-10)")
    assert ok


def test_criterion_06_definiteness_no_go():
    t0 = time.perf_counter()
    scan = definiteness_scan(100, 20, SEED)
    elapsed = time.perf_counter() - t0
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for p in sample_param_list(100, SEED + 1):
        while True:
            c1, c2 = rng.uniform(-5, 5, 2)
            try:
                Mp, Mv = build_Mp_Mv(c1, c2, p)
                break
            except ForbiddenRay:
                continue
        Ep, Ev = block_eigenvalues(c1, c2, p)
        worst = max(worst,
                    np.abs(Ep - np.linalg.eigvalsh(Mp)).max() / max(1.0, np.abs(Ep).max()),
                    np.abs(Ev - np.linalg.eigvalsh(Mv)).max() / max(1.0, np.abs(Ev).max()))
    ok = scan["count"] == 0 and worst < 1e-12 and elapsed < 30.0
    record(6, ok, f"{scan['points']} grid points, simultaneous-PD count {scan['count']}; closed-form eigenvalues worst {worst:.1e} (tol 1e-12); {elapsed:.1f} s (budget 30 s)")
    assert ok


def test_criterion_07_pu_consistency():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(1000):
        p = sample_params(rng)
        while p.total <= 0:  # the real map to PU variables needs nu2 + Omega > 0
            p = sample_params(rng)
        s = PhaseState(*rng.uniform(-2, 2, 4))
        lhs = hpu_value(pu_from_ghost(s, p), p)
        rhs = hg_value(s, p)
        mag = abs(s.px**2) + abs(s.py**2) + (p.nu2 + abs(p.Omega) + abs(p.g)) * (s.x**2 + s.y**2)
        worst = max(worst, abs(lhs - rhs) / max(1.0, mag))
    freq = 0.0
    for p in sample_param_list(200, SEED):
        w1, w2 = pu_frequencies(p.nu2, p.Omega, p.g)
        freq = max(freq, abs(w1 - w2))
    ok = worst < 1e-12 and freq < 1e-12
    record(7, ok, f"H_PU o map = H_g at 1000 states worst {worst:.1e}; |w1 - w2| worst {freq:.1e} (tol 1e-12)")
    assert ok


def test_criterion_08_factorisation():
    prod = 0.0
    lam_minus_ok = True
    for p in mixed_samples(200):
        (lp, lm), _, _, _ = diagonalize_form(quad_form_matrix(p))
        prod = max(prod, abs(lp * lm - 0.5 * (p.Omega - p.nu2)) / max(1.0, p.gap))
        lam_minus_ok &= lm < 0 and (lp * lm < 0)
    signs_ok = True
    n_signs = 0
    for p in sample_param_list(200, SEED, eta=1):
        a1, a2, _, flag = effective_hamiltonian(p)
        if flag:
            n_signs += 1
            signs_ok &= a1 < 0 and a2 < 0
    mom = 0.0
    for lam in (0.1, 0.37, 1.0, 2.0, 5.5, 10.0):
        for n in range(9):
            val, _ = quad(lambda x: x**n * math.exp(-lam * x * x), -np.inf, np.inf, epsabs=1e-14, epsrel=1e-13)
            mom = max(mom, abs(val - gaussian_moment(lam, n)) / max(1.0, abs(val)))
    rng = np.random.default_rng(SEED)
    sub = 0.0
    for p in sample_param_list(100, SEED + 2):
        th = transformed_hamiltonian(p)
        _, _, _, U = diagonalize_form(quad_form_matrix(p))
        z = rng.uniform(-2, 2, 4)
        val = hg_value(PhaseState(*z), p)
        scale = (1 + p.nu2 + abs(p.Omega) + abs(p.g)) * (z @ z)
        sub = max(sub, abs(th(U @ z[:2], U @ z[2:]) - val) / max(1.0, scale))
    ok = prod < 1e-12 and lam_minus_ok and signs_ok and n_signs > 0 and mom < 1e-10 and sub < 1e-12
    record(8, ok, f"lambda+ lambda- = (Omega-nu2)/2 worst {prod:.1e}, lambda- < 0 on 200/200; a1, a2 < 0 on {n_signs} eta=+1 samples; "
                  f"moments vs quadrature {mom:.1e} (1e-10); substitution {sub:.1e} (1e-12)")
    assert ok


def test_criterion_09_non_normalisable():
    worst = 0.0
    never = True
    for p in mixed_samples(500):
        never &= not is_normalizable(p.alpha, p.beta, p.gamma)
        det = p.alpha * p.beta - p.gamma**2
        never &= det < 0
        worst = max(worst, abs(det - 0.5 * (p.Omega - p.nu2)) / max(1.0, p.gap))
    ok = never and worst < 1e-12
    record(9, ok, f"L2 conditions fail on 500/500 samples (both eta); alpha beta - gamma^2 = (Omega-nu2)/2 worst {worst:.1e}")
    assert ok


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "resonant_pu", *args], capture_output=True)


def test_criterion_10_cli_contract():
    a = _cli("verify", "--samples", "5", "--json")
    b = _cli("verify", "--samples", "5", "--json")
    s1 = _cli("scan", "--grid-c", "30", "--grid-p", "4", "--samples", "40", "--seed", "7", "--json")
    s2 = _cli("scan", "--grid-c", "30", "--grid-p", "4", "--samples", "40", "--seed", "7", "--json")
    bad = _cli("verify", "--samples", "0", "--perturb-kappa", "1.01", "--json")
    invalid = _cli("verify", "--nu2", "1", "--omega-cap", "1")
    identical = a.stdout == b.stdout and s1.stdout == s2.stdout
    codes = (a.returncode, bad.returncode, invalid.returncode)
    parsed = json.loads(a.stdout)["pass"] is True and json.loads(bad.stdout)["pass"] is False
    ok = identical and codes == (0, 1, 2) and parsed
    record(10, ok, f"byte-identical reports: {identical}; exit codes pass/perturbed/invalid = {codes}")
    assert ok
