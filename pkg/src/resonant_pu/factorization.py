"""Splitting the formal ground-state Gaussian along the eigenvectors of its form.

The ground state is ``exp(-x^T M x / 2)`` with ``M = [[alpha, -gamma],
[-gamma, beta]]``.  Rotating to the eigenbasis of ``M`` factorises it into two
one-dimensional Gaussians ``phi+ phi-`` with exponents ``lambda+`` and
``lambda-``.  At the degenerate coupling ``det M = (Omega - nu2) / 2 < 0``, so
exactly one of the two exponents is positive.

Projecting the rotated ``H_g`` onto the normalisable factor ``phi+`` yields an
operator ``a1 p^2 + a2 x^2 + a3`` acting on ``phi-``.  The factor ``phi+`` is
normalised here (``int phi+^2 = 1``); other normalisations rescale ``a1, a2, a3``
by the same positive constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import build_Hg
from .errors import DegenerateEigenvalues, NonNormalizable
from .params import SQRT2, ModelParams, sample_params
from .states import GaussPolyState, apply_to_state
from .weyl import WeylOp, linear_substitution

EIG_GUARD = 1e-12


def quad_form_matrix(p: ModelParams) -> np.ndarray:
    """``[[alpha, -gamma], [-gamma, beta]]``."""
    return np.array([[p.alpha, -p.gamma], [-p.gamma, p.beta]])


def diagonalize_form(M):
    """Closed-form eigen-decomposition of a symmetric 2x2 matrix.

    Parameters
    ----------
    M : array_like
        Symmetric matrix ``[[a, -c], [-c, b]]``.

    Returns
    -------
    lambdas : tuple of float
        ``(lambda+, lambda-)`` with ``lambda+ >= lambda-``.
    vectors : tuple of ndarray
        Unit eigenvectors ``(v+, v-)``; both have a positive second component.
    rhos : tuple of float
        ``rho+- = sqrt(d / (+-(b - a) + d))`` with ``d = lambda+ - lambda-``, so
        that the second component of ``v+-`` is ``1 / (sqrt(2) rho+-)``.
    U : ndarray
        Orthogonal matrix with rows ``v+`` and ``v-``.

    Raises
    ------
    DegenerateEigenvalues
        If the two eigenvalues coincide (``c = 0`` and ``a = b``) or the
        off-diagonal entry vanishes, which leaves the second components
        undetermined.
    """
    M = np.asarray(M, dtype=float)
    a, b = M[0, 0], M[1, 1]
    c = -0.5 * (M[0, 1] + M[1, 0])
    d = math.hypot(a - b, 2 * c)
    if d < EIG_GUARD * max(1.0, abs(a) + abs(b)) or abs(c) < EIG_GUARD * max(1.0, d):
        raise DegenerateEigenvalues(f"eigenvalues not separated (d={d!r}, offdiag={c!r})")
    lam_p = 0.5 * (a + b + d)
    lam_m = 0.5 * (a + b - d)
    vecs = []
    rhos = []
    for s in (1, -1):
        den = s * (b - a) + d
        # den = d - s(a - b) suffers cancellation when s(a - b) ~ d; use
        # (d - t)(d + t) = 4 c^2 with t = s(a - b)
        if den < 0.5 * d:
            den = 4 * c * c / (d + s * (a - b))
        rho = math.sqrt(d / den)
        rhos.append(rho)
        vecs.append(np.array([-s * SQRT2 * c * rho / d, 1.0 / (SQRT2 * rho)]))
    U = np.array(vecs)
    return (lam_p, lam_m), tuple(vecs), tuple(rhos), U


@dataclass
class TransformedHamiltonian:
    """``H_g`` in the rotated variables, stored as ``p^T Kin p + x^T Pot x``."""

    kinetic: np.ndarray
    potential: np.ndarray
    operator: WeylOp
    closed_form: dict = field(default_factory=dict)
    closed_form_residuals: dict = field(default_factory=dict)

    def coefficients(self) -> dict:
        K, P = self.kinetic, self.potential
        return {
            "kinetic++": float(K[0, 0]),
            "kinetic--": float(K[1, 1]),
            "kinetic+-": float(2 * K[0, 1]),
            "potential++": float(P[0, 0]),
            "potential--": float(P[1, 1]),
            "potential+-": float(2 * P[0, 1]),
        }

    def __call__(self, xt, pt) -> float:
        xt = np.asarray(xt, dtype=float)
        pt = np.asarray(pt, dtype=float)
        return float(pt @ self.kinetic @ pt + xt @ self.potential @ xt)


def _closed_form_coefficients(p: ModelParams, lams, rhos) -> dict:
    """Closed-form rotated coefficients in terms of ``alpha, beta, gamma, lambda+-, rho+-``."""
    a, b, c = p.alpha, p.beta, p.gamma
    d = lams[0] - lams[1]
    rr = rhos[0] * rhos[1]
    diag = (p.gap * (a - b) - 2 * p.g * c) / (2 * d)
    return {
        "kinetic++": (a - b) / d,
        "kinetic--": -(a - b) / d,
        "kinetic+-": -2 / rr,
        "potential++": diag + 0.5 * p.total,
        "potential--": -diag + 0.5 * p.total,
        "potential+-": (p.g * (b - a) + 2 * (p.Omega - p.nu2) * c) / (2 * c * rr),
    }


def transformed_hamiltonian(p: ModelParams) -> TransformedHamiltonian:
    """Rewrite the quantum ``H_g`` in ``xt = U (x, y)``.

    The operator is obtained by substituting variables into the normal-ordered
    ``H_g``; the matrices ``Kin`` and ``Pot`` are read off its coefficients
    (a derivative ``d^2`` corresponds to ``-p^2``).  The closed-form coefficients
    are evaluated alongside and their per-term relative residuals recorded.
    """
    lams, _, rhos, U = diagonalize_form(quad_form_matrix(p))
    op = linear_substitution(build_Hg(p), U)
    K = np.array([
        [-op.coeff(0, 0, 2, 0), -0.5 * op.coeff(0, 0, 1, 1)],
        [-0.5 * op.coeff(0, 0, 1, 1), -op.coeff(0, 0, 0, 2)],
    ])
    P = np.array([
        [op.coeff(2, 0), 0.5 * op.coeff(1, 1)],
        [0.5 * op.coeff(1, 1), op.coeff(0, 2)],
    ])
    out = TransformedHamiltonian(kinetic=K, potential=P, operator=op)
    out.closed_form = _closed_form_coefficients(p, lams, rhos)
    mine = out.coefficients()
    scale = max(1.0, max(abs(v) for v in mine.values()))
    out.closed_form_residuals = {k: abs(out.closed_form[k] - mine[k]) / scale for k in mine}
    return out


def gaussian_moment(lam: float, n: int) -> float:
    """``int x^n exp(-lam x^2) dx`` over the real line.

    Raises
    ------
    NonNormalizable
        If ``lam <= 0``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if not lam > 0:
        raise NonNormalizable(f"Gaussian exponent {lam!r} is not positive")
    if n % 2:
        return 0.0
    return math.gamma((n + 1) / 2) / lam ** ((n + 1) / 2)


@dataclass
class FactorizationResult:
    M: np.ndarray
    lambda_plus: float
    lambda_minus: float
    v_plus: np.ndarray
    v_minus: np.ndarray
    rho_plus: float
    rho_minus: float
    U: np.ndarray
    a1: float = math.nan
    a2: float = math.nan
    a3: float = math.nan
    lambda_plus_positive: bool = False

    def to_dict(self) -> dict:
        return {
            "M": self.M.tolist(),
            "lambda_plus": self.lambda_plus,
            "lambda_minus": self.lambda_minus,
            "v_plus": self.v_plus.tolist(),
            "v_minus": self.v_minus.tolist(),
            "rho_plus": self.rho_plus,
            "rho_minus": self.rho_minus,
            "U": self.U.tolist(),
            "a1": self.a1,
            "a2": self.a2,
            "a3": self.a3,
            "lambda_plus_positive": bool(self.lambda_plus_positive),
        }


def effective_hamiltonian(p: ModelParams) -> tuple[float, float, float, bool]:
    """Coefficients ``(a1, a2, a3, lambda_plus_positive)`` of the projected operator.

    Acting with the rotated ``H`` on ``phi+ phi-``, multiplying by the
    normalised ``phi+`` and integrating out ``xt+`` leaves
    ``(a1 p^2 + a2 xt-^2 + a3) phi-``.  Terms odd in ``xt+`` integrate to zero.

    Raises
    ------
    NonNormalizable
        If ``lambda+ <= 0``.
    """
    lams, _, _, _ = diagonalize_form(quad_form_matrix(p))
    lp = lams[0]
    if not lp > 0:
        raise NonNormalizable(f"lambda+ = {lp!r} <= 0")
    th = transformed_hamiltonian(p)
    K, P = th.kinetic, th.potential
    norm = 1.0 / gaussian_moment(lp, 0)
    m0 = norm * gaussian_moment(lp, 0)
    m2 = norm * gaussian_moment(lp, 2)
    # -d^2 phi+ = (lp - lp^2 x^2) phi+
    a1 = K[1, 1] * m0
    a2 = P[1, 1] * m0
    a3 = K[0, 0] * (lp * m0 - lp * lp * m2) + P[0, 0] * m2
    return float(a1), float(a2), float(a3), True


def projection_check(p: ModelParams) -> float:
    """Double-entry check of :func:`effective_hamiltonian` through exact state algebra.

    Applies the rotated operator to the two-variable state ``phi+ phi-``,
    integrates each monomial against ``phi+`` with :func:`gaussian_moment`, and
    compares the resulting ``(c0 + c2 xt-^2) phi-`` with
    ``(a1 p^2 + a2 xt-^2 + a3) phi-``.  Returns the relative residual.
    """
    lams, _, _, _ = diagonalize_form(quad_form_matrix(p))
    lp, lm = lams
    a1, a2, a3, _ = effective_hamiltonian(p)
    th = transformed_hamiltonian(p)
    psi = GaussPolyState({(0, 0): 1.0}, (lp, lm, 0.0))
    out = apply_to_state(th.operator, psi)
    norm = 1.0 / gaussian_moment(lp, 0)
    proj: dict = {}
    for (i, j), c in out.poly.items():
        proj[j] = proj.get(j, 0.0) + c * norm * gaussian_moment(lp, i)
    # (a1 p^2 + a2 x^2 + a3) phi- with p^2 = -d^2 and -d^2 phi- = (lm - lm^2 x^2) phi-
    expected = {0: a1 * lm + a3, 2: a2 - a1 * lm * lm}
    keys = set(proj) | set(expected)
    scale = max(1.0, max(abs(v) for v in expected.values()))
    return max(abs(proj.get(k, 0.0) - expected.get(k, 0.0)) for k in keys) / scale


def factorize(p: ModelParams) -> FactorizationResult:
    """Full decomposition; the effective coefficients are NaN when ``lambda+ <= 0``."""
    M = quad_form_matrix(p)
    (lp, lm), (vp, vm), (rp, rm), U = diagonalize_form(M)
    res = FactorizationResult(M, lp, lm, vp, vm, rp, rm, U)
    try:
        res.a1, res.a2, res.a3, res.lambda_plus_positive = effective_hamiltonian(p)
    except NonNormalizable:
        pass
    return res


REGION_COLUMNS = ("nu2", "Omega", "eta", "lambda_plus", "lambda_minus", "a1", "a2", "a3", "normalizable_flag")


def lambda_region_scan(samples: int = 200, seed: int = 42) -> dict:
    """Sign survey of ``lambda+-`` over random parameters, alternating ``eta``.

    The report holds the per-sample rows (see ``REGION_COLUMNS``), the fraction
    with ``lambda+ > 0``, whether ``lambda- < 0`` held everywhere, the largest
    ``lambda+ lambda- - (Omega - nu2)/2`` residual and the samples with the
    smallest ``lambda+``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    rows = []
    det_res = 0.0
    for i in range(samples):
        eta = 1 if i % 2 == 0 else -1
        p = sample_params(rng, eta)
        r = factorize(p)
        det_res = max(det_res, abs(r.lambda_plus * r.lambda_minus - 0.5 * (p.Omega - p.nu2)) / max(1.0, p.gap))
        rows.append({
            "nu2": p.nu2,
            "Omega": p.Omega,
            "eta": eta,
            "lambda_plus": r.lambda_plus,
            "lambda_minus": r.lambda_minus,
            "a1": r.a1,
            "a2": r.a2,
            "a3": r.a3,
            "normalizable_flag": r.lambda_plus_positive,
        })
    closest = sorted(rows, key=lambda row: abs(row["lambda_plus"]))[:5]
    return {
        "samples": samples,
        "seed": seed,
        "fraction_lambda_plus_positive": float(sum(r["lambda_plus"] > 0 for r in rows)) / samples,
        "lambda_minus_always_negative": all(r["lambda_minus"] < 0 for r in rows),
        "product_residual": det_res,
        "closest_to_boundary": [{k: r[k] for k in ("nu2", "Omega", "eta", "lambda_plus")} for r in closest],
        "rows": rows,
    }
