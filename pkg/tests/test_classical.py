import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import model_params
from resonant_pu.classical import (
    PoissonTensor,
    Q_as_hamiltonian,
    QuadHamiltonian,
    block_eigenvalues,
    build_H2_classical,
    build_Hg_classical,
    build_J2,
    build_Jg,
    build_Mp_Mv,
    combined_pair,
    conserved_Q,
    conserved_Q_pu,
    definiteness_scan,
    exact_solution,
    flow_field,
    integrate,
    jordan_structure,
    propagator,
)
from resonant_pu.errors import ForbiddenRay
from resonant_pu.params import PhaseState, derive_params, hg_value, pu_from_ghost

R2 = math.sqrt(2.0)
vec4 = st.lists(st.floats(-5, 5), min_size=4, max_size=4).map(np.array)


def test_poisson_tensors(p21):
    Jg = build_Jg().J
    assert Jg[0, 2] == 1 and Jg[2, 0] == -1
    J2 = build_J2(p21).J
    assert J2[0, 2] == pytest.approx(5 / R2)
    assert np.array_equal(J2, -J2.T)


def test_containers_symmetrise():
    J = PoissonTensor(np.arange(16.0).reshape(4, 4))
    assert np.array_equal(J.J, -J.J.T)
    H = QuadHamiltonian(np.arange(16.0).reshape(4, 4))
    assert np.array_equal(H.Hmat, H.Hmat.T)


def test_hamiltonian_matrix_matches_scalar(p21):
    z = np.array([0.3, -1.2, 0.7, 2.0])
    assert build_Hg_classical(p21)(z) == pytest.approx(hg_value(PhaseState(*z), p21))
    assert np.array_equal(build_Hg_classical(p21).kinetic(), np.diag([1.0, -1.0]))


def test_flow_field_reference(p21):
    f = flow_field(build_Jg(), build_Hg_classical(p21), PhaseState(1, 0, 0, 0))
    assert f == pytest.approx([0, 0, -4, 3])
    assert not flow_field(build_Jg(), build_Hg_classical(p21), np.zeros(4)).any()


@given(model_params(), vec4)
def test_two_structures_same_flow(p, z):
    a = flow_field(build_Jg(), build_Hg_classical(p), z)
    b = flow_field(build_J2(p), build_H2_classical(p), z)
    scale = max(1.0, np.abs(z).max()) * max(1.0, p.gap, abs(p.total))
    assert np.abs(a - b).max() <= 1e-12 * scale


def test_combined_pair_special_cases(p21):
    cp = combined_pair(1.0, 0.0, p21)
    assert (cp.c3, cp.c4, cp.Delta) == (1.0, 0.0, 1.0)
    assert np.allclose(cp.Jbar.J, build_Jg().J) and np.allclose(cp.Hbar.Hmat, build_Hg_classical(p21).Hmat)
    cp = combined_pair(0.0, 1.0, p21)
    assert cp.Delta == pytest.approx(2.0) and cp.c4 == pytest.approx(1.0) and cp.c3 == 0.0
    with pytest.raises(ForbiddenRay):
        combined_pair(R2, -1.0, p21)


def _flow_residual(cp, p, z):
    a = flow_field(cp.Jbar, cp.Hbar, z)
    b = flow_field(build_Jg(), build_Hg_classical(p), z)
    scale = np.abs(cp.Jbar.J).max() * np.abs(cp.Hbar.Hmat).max() * max(1.0, np.abs(z).max())
    return np.abs(a - b).max() / max(1.0, scale)


@settings(max_examples=100)
@given(model_params(), st.floats(-5, 5), st.floats(-5, 5), vec4)
def test_combined_pair_flow(p, c1, c2, z):
    try:
        cp = combined_pair(c1, c2, p)
    except ForbiddenRay:
        return
    assert _flow_residual(cp, p, z) < 1e-12


@settings(max_examples=100)
@given(model_params(), st.floats(-5, 5), st.floats(-5, 5), vec4)
def test_blocks_and_eigenvalues(p, c1, c2, z):
    try:
        cp = combined_pair(c1, c2, p)
    except ForbiddenRay:
        return
    Mp, Mv = build_Mp_Mv(c1, c2, p)
    scale = max(1.0, np.abs(Mp).max(), np.abs(Mv).max())
    assert np.abs(cp.Hbar.kinetic() - Mp).max() <= 1e-12 * scale
    assert np.abs(cp.Hbar.potential() - Mv).max() <= 1e-12 * scale
    assert not cp.Hbar.Hmat[:2, 2:].any()
    Ep, Ev = block_eigenvalues(c1, c2, p)
    assert np.abs(Ep - np.linalg.eigvalsh(Mp)).max() <= 1e-12 * max(1.0, np.abs(Ep).max())
    assert np.abs(Ev - np.linalg.eigvalsh(Mv)).max() <= 1e-12 * max(1.0, np.abs(Ev).max())
    quad = z[2:] @ Mp @ z[2:] + z[:2] @ Mv @ z[:2]
    assert abs(cp.Hbar(z) - quad) <= 1e-12 * scale * max(1.0, z @ z)


def test_blocks_reference(p21):
    Mp, _ = build_Mp_Mv(1.0, 0.0, p21)
    assert Mp == pytest.approx(np.diag([1.0, -1.0]))


@given(model_params(), st.floats(-5, 5), st.floats(-5, 5))
def test_each_block_is_indefinite(p, c1, c2):
    try:
        Mp, Mv = build_Mp_Mv(c1, c2, p)
    except ForbiddenRay:
        return
    assert np.linalg.det(Mv) <= 1e-12 * max(1.0, np.abs(Mv).max() ** 2)
    assert np.linalg.det(Mp) <= 1e-12 * max(1.0, np.abs(Mp).max() ** 2)


def test_definiteness_scan_small():
    rep = definiteness_scan(grid_c=30, grid_p=5, seed=3)
    assert rep["count"] == 0
    assert rep["max_min_eigenvalue"] <= 0
    assert rep["points"] + rep["skipped"] == 30 * 30 * 5
    assert set(rep["argmax"]) == {"c1", "c2", "nu2", "Omega"}


def test_definiteness_controls():
    # flipping the momentum block alone cannot help: the position block is indefinite
    assert definiteness_scan(30, 5, 3, abs_momentum=True)["count"] == 0
    assert definiteness_scan(30, 5, 3, abs_momentum=True, abs_position=True)["count"] > 0


def test_definiteness_scan_bad_grid():
    with pytest.raises(ValueError):
        definiteness_scan(0, 1)


def test_integrator_reference(p21):
    z0 = np.array([0.3, -0.7, 0.5, 0.2])
    t, Z = integrate(build_Jg(), build_Hg_classical(p21), z0, 10.0, 1e-3)
    assert len(t) == 10001 and t[-1] == pytest.approx(10.0)
    H = build_Hg_classical(p21)
    assert max(abs(H(z) - H(z0)) for z in Z) < 1e-8
    assert max(abs(conserved_Q(z, p21) - conserved_Q(z0, p21)) for z in Z) < 1e-8
    exact = np.array([propagator(p21, ti) @ z0 for ti in t])
    assert np.abs(Z - exact).max() < 1e-6
    with pytest.raises(ValueError):
        integrate(build_Jg(), H, z0, 1.0, 0.0)


def test_exact_solution_at_zero(p21):
    z0 = PhaseState(0.1, 0.2, 0.3, 0.4)
    assert exact_solution(z0, 0.0, p21) == z0


def test_propagator_group_property(p21):
    a, b = 0.7, 2.3
    assert propagator(p21, a) @ propagator(p21, b) == pytest.approx(propagator(p21, a + b), abs=1e-12)


def test_secular_fit(p21):
    z0 = np.array([0.3, -0.7, 0.5, 0.2])
    w = p21.omega
    t = np.linspace(0, 20, 400)
    q = np.array([pu_from_ghost(exact_solution(z0, ti, p21), p21).q for ti in t])
    basis = np.column_stack([np.cos(w * t), np.sin(w * t), t * np.cos(w * t), t * np.sin(w * t)])
    coef, *_ = np.linalg.lstsq(basis, q, rcond=None)
    assert np.abs(basis @ coef - q).max() < 1e-9
    assert np.hypot(coef[2], coef[3]) > 1e-3


def test_jordan_structure_reference(p21):
    js = jordan_structure(p21)
    assert js["charpoly"] == pytest.approx([1, 0, 4, 0, 4], abs=1e-10)
    assert js["B2_residual"] < 1e-10
    assert js["B_norm"] > 1e-6
    assert js["rank_A_minus_iw"] == 3
    assert js["minimal_degree"] == 4


@given(model_params())
def test_jordan_structure_random(p):
    js = jordan_structure(p)
    assert js["charpoly_residual"] < 1e-10
    assert js["B2_residual"] < 1e-10
    assert js["rank_A_minus_iw"] == 3


def test_conserved_Q_reference(p21):
    assert conserved_Q(PhaseState(1, 0, 0, 0), p21) == pytest.approx(1.5)


@given(model_params().filter(lambda p: p.total > 0), vec4)
def test_Q_forms_agree(p, z):
    a = conserved_Q(z, p)
    b = conserved_Q_pu(z, p)
    assert abs(a - b) <= 1e-10 * max(1.0, abs(a), abs(b))


@given(model_params(), vec4.filter(lambda z: np.abs(z).max() > 0.1))
def test_Q_is_conserved_but_not_a_hamiltonian(p, z):
    A = build_Jg().J @ (2 * build_Hg_classical(p).Hmat)
    # dQ/dt = grad Q . zdot
    Qm = 2 * np.array([[1, -1, 0, 0], [-1, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]) * 0.5 * p.total / p.gap
    Qm[2:, 2:] = 2 * p.total / p.gap**2 * np.ones((2, 2))
    rate = (Qm @ z) @ (A @ z)
    assert abs(rate) <= 1e-10 * max(1.0, np.abs(Qm).max() * np.abs(A).max() * (z @ z))
    mism = Q_as_hamiltonian(p, z)
    assert mism["Jg"] > 1e-6
