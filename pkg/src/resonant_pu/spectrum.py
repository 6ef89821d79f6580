"""Generalised eigenspaces of the ghost Hamiltonian.

Lowest-weight states ``(x - y)^m G`` are genuine eigenstates; raising them
with ``M+`` gives finite Jordan chains on which ``H_g`` acts as
``E + nilpotent``.  For ``eta = -1`` every eigenvalue changes sign
(``K psi = eta k psi``), the chain structure is otherwise the same.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List

from .algebra import Report, build_Hg, build_intertwiners, build_K, build_su2
from .errors import ChainDepthExceeded
from .params import SQRT2, ModelParams
from .states import (
    GaussPolyState,
    apply_to_state,
    chain_seed,
    ground_state,
    multiply_poly,
    proportionality,
    state_difference,
)

MAX_CHAIN = 12


def eigenvalue_E(n: int, p: ModelParams) -> float:
    """``(n + 1)(alpha - beta)``, i.e. ``2 kappa (n + 1)`` for eta = +1."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return (n + 1) * (p.alpha - p.beta)


def _rel(lhs: GaussPolyState, rhs: GaussPolyState, scale: float) -> float:
    return state_difference(lhs, rhs) / max(1.0, scale)


@dataclass
class JordanChainReport:
    k: int
    states: List[GaussPolyState]
    termination_residual: float
    relation_residuals: List[float]
    eigenvalue: float
    h2_residuals: List[float] = field(default_factory=list)
    tol: float = 1e-9

    @property
    def passed(self) -> bool:
        res = [self.termination_residual, *self.relation_residuals, *self.h2_residuals]
        return all(r <= self.tol for r in res)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "eigenvalue": self.eigenvalue,
            "termination_residual": self.termination_residual,
            "relation_residuals": self.relation_residuals,
            "h2_residuals": self.h2_residuals,
            "degrees": [s.degree() for s in self.states],
            "tolerance": self.tol,
            "pass": self.passed,
        }


def build_chain(k: int, p: ModelParams, tol: float = 1e-9) -> JordanChainReport:
    """Jordan chain ``psi_{k,l} = M+^l (x - y)^{k-1} G`` for ``l < k``.

    Checks ``M+^k psi_{k-1} = 0``,
    ``(H_g - E) psi_{k,l} = l (k - l) psi_{k,l-1}`` with ``E = eta 2 kappa k``,
    and ``H_2 psi_{k,l} = eta sqrt(2) kappa k psi_{k,l}``.  Residuals are
    relative to the largest coefficient anywhere in the chain.
    """
    if not 1 <= k <= MAX_CHAIN:
        raise ChainDepthExceeded(f"k={k} outside [1, {MAX_CHAIN}]")
    _, Mp, _ = build_su2(p)
    Hg = build_Hg(p)
    H2 = SQRT2 * p.kappa * build_K(p)
    states = [chain_seed(k - 1, p)]
    for _ in range(k):
        states.append(apply_to_state(Mp, states[-1]))
    tail = states.pop()
    scale = max(s.max_coeff() for s in states)
    E = p.eta * 2.0 * p.kappa * k
    E2 = p.eta * SQRT2 * p.kappa * k
    relations = []
    h2 = []
    for ell, s in enumerate(states):
        hs = apply_to_state(Hg, s)
        if ell:
            relations.append(_rel(hs - E * s, ell * (k - ell) * states[ell - 1], scale))
        else:
            relations.append(_rel(hs, E * s, scale))
        h2.append(_rel(apply_to_state(H2, s), E2 * s, scale))
    return JordanChainReport(
        k=k,
        states=states,
        termination_residual=tail.max_coeff() / max(1.0, scale),
        relation_residuals=relations,
        eigenvalue=E,
        h2_residuals=h2,
        tol=tol,
    )


def verify_sector_actions(k: int, p: ModelParams, tol: float = 1e-10) -> Report:
    """``K psi_{k-1} = eta k psi_{k-1}``, ``M0 psi_k = -(k/2) psi_k`` and
    ``M- psi_k = 0`` on the lowest-weight states."""
    if not 0 <= k <= MAX_CHAIN:
        raise ChainDepthExceeded(f"k={k} outside [0, {MAX_CHAIN}]")
    M0, _, Mm = build_su2(p)
    K = build_K(p)
    rep = Report(params=p.as_dict())
    seed = chain_seed(k, p)
    scale = seed.max_coeff()
    if k >= 1:
        prev = chain_seed(k - 1, p)
        rep.add(f"K psi_{k - 1} = {k * p.eta} psi_{k - 1}",
                _rel(apply_to_state(K, prev), p.eta * k * prev, prev.max_coeff()), tol)
    rep.add(f"M0 psi_{k} = -{k}/2 psi_{k}", _rel(apply_to_state(M0, seed), -0.5 * k * seed, scale), tol)
    rep.add(f"M- psi_{k} = 0", apply_to_state(Mm, seed).max_coeff() / max(1.0, scale), tol)
    return rep


def chi_poly(p: ModelParams) -> dict:
    """Multiplier ``eta [nu2 (3x + y) - Omega (x + 3y)] / (2 sqrt(2) sqrt(gap))``."""
    c = p.eta / (2 * SQRT2 * math.sqrt(p.gap))
    return {(1, 0): c * (3 * p.nu2 - p.Omega), (0, 1): c * (p.nu2 - 3 * p.Omega)}


def verify_mplus_explicit(k: int, p: ModelParams, tol: float = 1e-10) -> Report:
    """Compare ``M+ psi_k`` with ``k/(nu2 + Omega) [chi psi_{k-1} + (1-k) psi_{k-2}]``
    (second term absent for k = 1); ``M+^2 psi_k`` is checked as well for k >= 2."""
    if not 1 <= k <= MAX_CHAIN:
        raise ChainDepthExceeded(f"k={k} outside [1, {MAX_CHAIN}]")
    _, Mp, _ = build_su2(p)
    chi = chi_poly(p)
    psi = [chain_seed(m, p) for m in range(k + 1)]
    rep = Report(params=p.as_dict())

    rhs = multiply_poly(psi[k - 1], chi)
    if k >= 2:
        rhs = rhs + (1 - k) * psi[k - 2]
    rhs = (k / p.total) * rhs
    lhs = apply_to_state(Mp, psi[k])
    rep.add(f"M+ psi_{k} closed form", _rel(lhs, rhs, max(lhs.max_coeff(), rhs.max_coeff())), tol)
    if k >= 2:
        chi2 = multiply_poly(multiply_poly(psi[k - 2], chi), chi)
        rhs2 = chi2
        if k >= 3:
            rhs2 = rhs2 + 2 * (2 - k) * multiply_poly(psi[k - 3], chi)
        if k >= 4:
            rhs2 = rhs2 + (3 - k) * (2 - k) * psi[k - 4]
        rhs2 = (k * (k - 1) / p.total**2) * rhs2
        lhs2 = apply_to_state(Mp, lhs)
        rep.add(f"M+^2 psi_{k} closed form", _rel(lhs2, rhs2, max(lhs2.max_coeff(), rhs2.max_coeff())), tol)
    return rep


@dataclass
class AplusRaise:
    n: int
    state: GaussPolyState
    ratio: float
    magnitude_residual: float
    sign: int
    family_sign: int

    @property
    def sign_agrees(self) -> bool:
        return self.sign == self.family_sign


def raise_with_Aplus(n: int, p: ModelParams) -> AplusRaise:
    """``A+^n psi_0`` and its ratio to ``(x - y)^n G``.

    ``|ratio| = kappa^n``; the measured sign is ``(-eta)^n``.  ``family_sign``
    is ``-eta`` for every n, the sign in the closed-form polynomial family, and
    is kept so reports can show where the two disagree.
    """
    if not 0 <= n <= MAX_CHAIN:
        raise ChainDepthExceeded(f"n={n} outside [0, {MAX_CHAIN}]")
    Ap, _, _ = build_intertwiners(p)
    state = ground_state(p)
    for _ in range(n):
        state = apply_to_state(Ap, state)
    ratio = proportionality(state, chain_seed(n, p), tol=1e-9)
    if ratio is None:
        ratio = float("nan")
    mag = p.kappa**n
    return AplusRaise(
        n=n,
        state=state,
        ratio=ratio,
        magnitude_residual=abs(abs(ratio) - mag) / mag,
        sign=int(math.copysign(1, ratio)),
        family_sign=-p.eta,
    )


def verify_intertwiner_ladder(n_max: int, p: ModelParams, tol: float = 1e-9) -> Report:
    """``H1 psi_n = n (alpha - beta) psi_n`` and
    ``H_g psi_n = (n + 1)(alpha - beta) psi_n`` for ``psi_n = A+^n psi_0``;
    also ``H_2 psi_n = eta sqrt(2) kappa (n + 1) psi_n``."""
    if not 0 <= n_max <= MAX_CHAIN:
        raise ChainDepthExceeded(f"n_max={n_max} outside [0, {MAX_CHAIN}]")
    Ap, Am, H1 = build_intertwiners(p)
    Hg = build_Hg(p)
    H2 = SQRT2 * p.kappa * build_K(p)
    ab = p.alpha - p.beta
    rep = Report(params=p.as_dict())
    psi = ground_state(p)
    rep.add("A- psi_0 = 0", apply_to_state(Am, psi).max_coeff(), tol)
    for n in range(n_max + 1):
        sc = psi.max_coeff()
        rep.add(f"H1 psi_{n} = {n}(alpha-beta) psi_{n}", _rel(apply_to_state(H1, psi), n * ab * psi, sc), tol)
        rep.add(f"Hg psi_{n} = {n + 1}(alpha-beta) psi_{n}", _rel(apply_to_state(Hg, psi), (n + 1) * ab * psi, sc), tol)
        rep.add(f"H2 psi_{n} = {n + 1} eta sqrt2 kappa psi_{n}",
                _rel(apply_to_state(H2, psi), (n + 1) * p.eta * SQRT2 * p.kappa * psi, sc), tol)
        psi = apply_to_state(Ap, psi)
    return rep


def spectrum_table(n_max: int, p: ModelParams) -> list[dict]:
    """Rows ``n, E_n, residual_H1, residual_Hg`` for the intertwiner ladder."""
    rep = verify_intertwiner_ladder(n_max, p)
    h1 = [c.residual for c in rep.checks if c.name.startswith("H1")]
    hg = [c.residual for c in rep.checks if c.name.startswith("Hg")]
    return [
        {"n": n, "E_n": eigenvalue_E(n, p), "residual_H1": h1[n], "residual_Hg": hg[n]}
        for n in range(n_max + 1)
    ]
