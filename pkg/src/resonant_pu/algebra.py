"""Named operators of the resonant model and the identity-verification suite.

Every operator is a :class:`~resonant_pu.weyl.WeylOp`.  Builders come in two
flavours: ``build_*`` constructs an operator from its algebraic definition
(compositions of ladder operators), ``explicit_*`` transcribes the closed-form
differential-operator expression.  :func:`verify_identity_suite` checks the
commutation relations and compares both flavours.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .params import SQRT2, ModelParams
from .weyl import WeylOp, commutator, linear_substitution, residual


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class Report:
    checks: List[Check] = field(default_factory=list)
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, res: float, tol: float) -> Check:
        c = Check(name, float(res), tol)
        self.checks.append(c)
        return c

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.add(prefix + c.name, c.residual, c.tolerance)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def worst(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def to_dict(self) -> dict:
        return {
            "checks": [c.to_dict() for c in self.checks],
            "params": self.params,
            "pass": self.passed,
        }


# ---------------------------------------------------------------------------
# (x, y) representation, from definitions
# ---------------------------------------------------------------------------

def build_Hg(p: ModelParams) -> WeylOp:
    """Quantised ghost Hamiltonian, ``p -> -i d``."""
    x, y, dx, dy = WeylOp.generators()
    return dy * dy - dx * dx + p.nu2 * x * x + p.Omega * y * y + p.g * x * y


def build_ladder(p: ModelParams):
    """``(a+, a-, b+, b-)``.

    ``b+-`` carries the coefficient ``1/kappa`` on ``(Omega y - nu2 x)``; that
    is the value for which ``[b+, b-] = lambda`` and ``[b+-, a-+] = +-kappa``.
    """
    x, y, dx, dy = WeylOp.generators()
    k = p.kappa
    s = dx + dy
    t = k * (y - x)
    d = dx - dy
    f = (p.Omega * y - p.nu2 * x) / k
    return 0.5 * (s + t), 0.5 * (s - t), 0.5 * (d + f), 0.5 * (d - f)


def _bilinears_from(ap, am, bp, bm):
    R = ap * am
    S = bp * bm
    return R, S, ap * bm + bp * am, ap * bm - bp * am


def build_bilinears(p: ModelParams):
    """``(R, S, T+, T-)`` with ``R = a+a-``, ``S = b+b-``, ``T+- = a+b- +- b+a-``."""
    return _bilinears_from(*build_ladder(p))


def _su2_from(R, S, Tp, Tm, p: ModelParams):
    k, lam = p.kappa, p.lam
    M0 = Tm / (2 * k)
    Mm = -(2 * lam / k) * R
    Mp = (1 / (2 * k)) * (Tp / (2 * k) - S / lam - (lam / (4 * k * k)) * R)
    return M0, Mp, Mm


def build_su2(p: ModelParams):
    """``(M0, M+, M-)``."""
    return _su2_from(*build_bilinears(p), p)


def _K_from(R, Tp, p: ModelParams):
    return (p.lam / p.kappa**2) * R - Tp / p.kappa + WeylOp.identity(R.labels)


def build_K(p: ModelParams) -> WeylOp:
    R, _, Tp, _ = build_bilinears(p)
    return _K_from(R, Tp, p)


def casimir_of(M0: WeylOp, Mp: WeylOp, Mm: WeylOp) -> WeylOp:
    return M0 * M0 + 0.5 * (Mp * Mm + Mm * Mp)


def build_casimir(p: ModelParams) -> WeylOp:
    return casimir_of(*build_su2(p))


def build_intertwiners(p: ModelParams):
    """``(A+, A-, H1)`` with ``H1 = H_g - (alpha - beta)``."""
    x, y, dx, dy = WeylOp.generators()
    a, b, g = p.alpha, p.beta, p.gamma
    Am = (a - g) * dx + (g - b) * dy + 0.5 * p.gap * (x - y)
    Ap = 0.5 * (dx + dy) + 0.5 * (a - g) * (y - x)
    return Ap, Am, build_Hg(p) - (a - b)


def build_H2(p: ModelParams) -> WeylOp:
    """Diagonalisable bi-Hamiltonian partner ``sqrt(2) kappa K``."""
    return SQRT2 * p.kappa * build_K(p)


# ---------------------------------------------------------------------------
# (x, y) representation, closed-form expressions
# ---------------------------------------------------------------------------

def explicit_Hg(p: ModelParams) -> WeylOp:
    x, y, dx, dy = WeylOp.generators()
    return dy * dy - dx * dx + p.nu2 * x * x + p.Omega * y * y - p.total * x * y


def _chi_poly_op(p: ModelParams) -> WeylOp:
    x, y, _, _ = WeylOp.generators()
    return p.nu2 * (3 * x + y) - p.Omega * (x + 3 * y)


def explicit_K(p: ModelParams) -> WeylOp:
    x, y, dx, dy = WeylOp.generators()
    n2, Om, gap = p.nu2, p.Omega, p.gap
    kin = (3 * n2 - Om) * dy * dy + 2 * (n2 + Om) * dx * dy - (n2 - 3 * Om) * dx * dx
    return kin / (2 * SQRT2 * gap**1.5) + (_chi_poly_op(p) * (x - y)) / (4 * SQRT2 * math.sqrt(gap))


def explicit_M0(p: ModelParams) -> WeylOp:
    x, y, dx, dy = WeylOp.generators()
    n2, Om = p.nu2, p.Omega
    body = (n2 * (x + y) + Om * (x - 3 * y)) * dx + (n2 * (3 * x - y) - Om * (x + y)) * dy
    return body / (4 * p.gap)


def explicit_Mminus(p: ModelParams) -> WeylOp:
    x, y, dx, dy = WeylOp.generators()
    body = -2 * (dy * dy + 2 * dx * dy + dx * dx) + p.gap * (x - y) * (x - y)
    return (p.total / (4 * p.gap)) * body


def explicit_Mplus(p: ModelParams) -> WeylOp:
    _, _, dx, dy = WeylOp.generators()
    n2, Om, gap = p.nu2, p.Omega, p.gap
    chi = _chi_poly_op(p)
    D = ((n2 - 3 * Om) / gap) * dx + ((Om - 3 * n2) / gap) * dy
    # the derivative block scales with gap; dropping it is only harmless at gap = 1
    return (chi * chi - (2 * gap) * (D * D)) / (32 * (n2 * n2 - Om * Om))


def mminus_symbol_eigenvalues(p: ModelParams) -> np.ndarray:
    """Eigenvalues of the quadratic symbol of ``M-`` in ``(x, y, px, py)``.

    With ``d -> i p`` the symbol is ``(T/4 gap)[2 (px + py)^2 + gap (x - y)^2]``,
    positive semi-definite when ``nu2 + Omega > 0``.
    """
    Mm = explicit_Mminus(p)
    Q = np.zeros((4, 4))
    # d_u^c d_v^d -> (i p_u)^c (i p_v)^d, i^2 = -1 for the quadratic terms
    table = {
        (2, 0, 0, 0): (0, 0), (0, 2, 0, 0): (1, 1), (1, 1, 0, 0): (0, 1),
        (0, 0, 2, 0): (2, 2), (0, 0, 0, 2): (3, 3), (0, 0, 1, 1): (2, 3),
    }
    for key, (i, j) in table.items():
        c = Mm.coeff(*key)
        if key[2] + key[3] == 2:
            c = -c
        if i == j:
            Q[i, i] += c
        else:
            Q[i, j] += c / 2
            Q[j, i] += c / 2
    return np.linalg.eigvalsh(Q)


# ---------------------------------------------------------------------------
# (q, q'') representation
# ---------------------------------------------------------------------------

def pu_coordinate_matrix(p: ModelParams) -> np.ndarray:
    """Linear map ``(x, y) -> (q, q'')`` at the degenerate coupling.

    Uses ``sqrt(2 |nu2 + Omega|)`` in the denominators so the map stays real;
    for ``nu2 + Omega < 0`` the closed-form ``(q, q'')`` expressions are not
    reached by any real change of variables.
    """
    r = math.sqrt(abs(p.nu2 + p.Omega - p.g))
    cx = 2 * p.nu2 - p.g
    cy = p.g - 2 * p.Omega
    return np.array([
        [-1 / (2 * SQRT2 * r), -1 / (2 * SQRT2 * r)],
        [cx / (SQRT2 * r), cy / (SQRT2 * r)],
    ])


def to_pu(A: WeylOp, p: ModelParams) -> WeylOp:
    return linear_substitution(A, pu_coordinate_matrix(p), labels="pu")


def build_pu_representation(p: ModelParams):
    """``(Hg, K, M0, M-, M+)`` in ``(q, q'')`` variables from the
    ``D_n^+- = d_q +- n gap d_qdd`` and ``q_n^+- = qdd +- n gap q`` forms."""
    q, Q, dq, dQ = WeylOp.generators("pu")
    gap = p.gap

    def D(n, s):
        return dq + (s * n * gap) * dQ

    def qn(n, s):
        return Q + (s * n * gap) * q

    Hg = D(2, -1) * dQ + 0.5 * (qn(2, 1) * qn(2, -1))
    K = ((1 / (2 * gap)) * (D(6, 1) * D(2, -1)) + qn(6, -1) * qn(2, 1)) / (4 * SQRT2 * math.sqrt(gap))
    M0 = -0.25 * ((1 / (2 * gap)) * (qn(2, -1) * dq) + qn(6, 1) * dQ)
    Mm = -0.25 * ((1 / (2 * gap)) * D(2, -1) ** 2 - qn(2, 1) ** 2)
    Mp = -(1 / (32 * gap)) * ((1 / (2 * gap)) * D(6, 1) ** 2 - qn(6, -1) ** 2)
    return Hg, K, M0, Mm, Mp


# ---------------------------------------------------------------------------
# identity suite
# ---------------------------------------------------------------------------

def _relation_checks(rep: Report, ops: dict, p: ModelParams, tol: float) -> None:
    """Commutation relations among ladder, bilinear and su(2) operators."""
    k, lam = p.kappa, p.lam
    labels = ops["Hg"].labels
    one = WeylOp.identity(labels)
    zero = WeylOp.zero(labels)
    ap, am, bp, bm = ops["a+"], ops["a-"], ops["b+"], ops["b-"]
    R, S, Tp, Tm = ops["R"], ops["S"], ops["T+"], ops["T-"]
    Hg, K, M0, Mp, Mm = ops["Hg"], ops["K"], ops["M0"], ops["M+"], ops["M-"]
    Ap, Am, H1 = ops["A+"], ops["A-"], ops["H1"]

    def rel(name, lhs, rhs, *scale):
        rep.add(name, residual(lhs, rhs, *scale), tol)

    C = commutator
    rel("[a+,a-]=0", C(ap, am), zero, ap, am)
    rel("[a+,b+]=0", C(ap, bp), zero, ap, bp)
    rel("[b+,a-]=kappa", C(bp, am), k * one, bp, am)
    rel("[b-,a+]=-kappa", C(bm, ap), -k * one, bm, ap)
    rel("[b+,b-]=lambda", C(bp, bm), lam * one, bp, bm)
    rel("[Hg,a+]=2kappa a+", C(Hg, ap), 2 * k * ap, Hg, ap)
    rel("[Hg,a-]=-2kappa a-", C(Hg, am), -2 * k * am, Hg, am)
    rel("[Hg,b+]=2kappa b+ + 2lambda a+", C(Hg, bp), 2 * k * bp + 2 * lam * ap, Hg, bp)
    rel("[Hg,b-]=-2kappa b- - 2lambda a-", C(Hg, bm), -2 * k * bm - 2 * lam * am, Hg, bm)
    rel("[T+,T-]=2lambda R", C(Tp, Tm), 2 * lam * R, Tp, Tm)
    rel("[R,S]=-kappa T-", C(R, S), -k * Tm, R, S)
    rel("[R,T-]=2kappa R", C(R, Tm), 2 * k * R, R, Tm)
    rel("[S,T-]=lambda T+ - 2kappa S", C(S, Tm), lam * Tp - 2 * k * S, S, Tm)
    rel("[T+,R]=0", C(Tp, R), zero, Tp, R)
    rel("[Hg,R]=0", C(Hg, R), zero, Hg, R)
    rel("[Hg,T+]=0", C(Hg, Tp), zero, Hg, Tp)
    rel("[Hg,S]=2lambda T-", C(Hg, S), 2 * lam * Tm, Hg, S)
    rel("[Hg,T-]=-4lambda R", C(Hg, Tm), -4 * lam * R, Hg, Tm)
    _su2_checks(rep, Hg, K, M0, Mp, Mm, p, tol, "")
    rel("A- H1 = Hg A-", Am * H1, Hg * Am, Am, H1, Hg)
    rel("H1 A+ = A+ Hg", H1 * Ap, Ap * Hg, Ap, H1, Hg)
    rel("[A+,A-]=0", C(Ap, Am), zero, Ap, Am)
    H2 = SQRT2 * k * K
    rel("[H2,M0]=0", C(H2, M0), zero, H2, M0)
    rel("[H2,M+]=0", C(H2, Mp), zero, H2, Mp)
    rel("[H2,M-]=0", C(H2, Mm), zero, H2, Mm)


def _su2_checks(rep: Report, Hg, K, M0, Mp, Mm, p: ModelParams, tol: float, prefix: str) -> None:
    labels = Hg.labels
    one = WeylOp.identity(labels)
    zero = WeylOp.zero(labels)
    C = commutator

    def rel(name, lhs, rhs, *scale):
        rep.add(prefix + name, residual(lhs, rhs, *scale), tol)

    rel("[M0,M+]=M+", C(M0, Mp), Mp, M0, Mp)
    rel("[M0,M-]=-M-", C(M0, Mm), -Mm, M0, Mm)
    rel("[M+,M-]=2M0", C(Mp, Mm), 2 * M0, Mp, Mm)
    rel("[K,M0]=0", C(K, M0), zero, K, M0)
    rel("[K,M+]=0", C(K, Mp), zero, K, Mp)
    rel("[K,M-]=0", C(K, Mm), zero, K, Mm)
    rel("[Hg,K]=0", C(Hg, K), zero, Hg, K)
    Cas = casimir_of(M0, Mp, Mm)
    rel("C=(K^2-1)/4", Cas, 0.25 * (K * K - one), K, M0, Mp, Mm)
    rel("Hg=2kappa K+M-", Hg, 2 * p.kappa * K + Mm, K, Mm)


def xy_operators(p: ModelParams) -> dict:
    ap, am, bp, bm = build_ladder(p)
    R, S, Tp, Tm = _bilinears_from(ap, am, bp, bm)
    M0, Mp, Mm = _su2_from(R, S, Tp, Tm, p)
    Ap, Am, H1 = build_intertwiners(p)
    return {
        "a+": ap, "a-": am, "b+": bp, "b-": bm,
        "R": R, "S": S, "T+": Tp, "T-": Tm,
        "M0": M0, "M+": Mp, "M-": Mm, "K": _K_from(R, Tp, p),
        "Hg": build_Hg(p), "A+": Ap, "A-": Am, "H1": H1,
    }


def verify_identity_suite(p: ModelParams, tol: float = 1e-10,
                          representations=("xy", "pu")) -> Report:
    """Run every named operator identity; one :class:`Check` per identity.

    ``xy`` covers the relations, the closed-form expressions and
    ``A+ = a+`` (eta=+1) or ``A+ = a-`` (eta=-1).  ``pu`` reruns the relations
    on the operators carried to ``(q, q'')`` variables, the su(2) block on the
    ``D_n``/``q_n`` forms, and compares both where the real change of
    variables exists (``nu2 + Omega > 0``).
    """
    rep = Report(params=p.as_dict())
    ops = xy_operators(p)
    if "xy" in representations:
        sub = Report()
        _relation_checks(sub, ops, p, tol)
        for name, built, explicit in (
            ("Hg", ops["Hg"], explicit_Hg(p)),
            ("K", ops["K"], explicit_K(p)),
            ("M0", ops["M0"], explicit_M0(p)),
            ("M-", ops["M-"], explicit_Mminus(p)),
            ("M+", ops["M+"], explicit_Mplus(p)),
        ):
            sub.add(f"{name} closed form", residual(built, explicit), tol)
        twin = ops["a+"] if p.eta == 1 else ops["a-"]
        sub.add("A+ = a+ (eta=+1) / a- (eta=-1)", residual(ops["A+"], twin), tol)
        rep.extend(sub, "xy: ")
    if "pu" in representations:
        sub = Report()
        moved = {name: to_pu(op, p) for name, op in ops.items()}
        _relation_checks(sub, moved, p, tol)
        Hg, K, M0, Mm, Mp = build_pu_representation(p)
        _su2_checks(sub, Hg, K, M0, Mp, Mm, p, tol, "closed form ")
        if p.nu2 + p.Omega > 0:
            for name, op in (("Hg", Hg), ("K", K), ("M0", M0), ("M-", Mm), ("M+", Mp)):
                sub.add(f"{name} closed form = transformed", residual(op, moved[name]), tol)
        rep.extend(sub, "pu: ")
    return rep


def identity_suite_over_samples(params: list[ModelParams], tol: float = 1e-10,
                                representations=("xy", "pu")) -> Report:
    """Aggregate the suite over many parameter points, keeping the worst
    residual per named identity."""
    worst: dict = {}
    tols: dict = {}
    for p in params:
        for c in verify_identity_suite(p, tol, representations).checks:
            worst[c.name] = max(worst.get(c.name, 0.0), c.residual)
            tols[c.name] = c.tolerance
    rep = Report(params={"samples": len(params)})
    for name, res in worst.items():
        rep.add(name, res, tols[name])
    return rep
