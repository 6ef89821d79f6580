"""Polynomial times Gaussian wavefunctions.

``psi(x, y) = P(x, y) * exp(-alpha x^2 / 2 - beta y^2 / 2 + gamma x y)``.
This class is closed under every :class:`~resonant_pu.weyl.WeylOp`, so all
eigenvalue and Jordan-chain relations can be checked exactly on coefficients.
"""

from __future__ import annotations

import math
from collections import defaultdict
from math import comb
from typing import Mapping, Optional, Tuple

from .errors import GaussianMismatch, LabelMismatch
from .params import ModelParams
from .weyl import WeylOp, padd, pderiv, pmul, poly_max

GAUSS_ATOL = 1e-12


class GaussPolyState:
    __slots__ = ("poly", "gauss", "labels")

    def __init__(self, poly: Mapping[Tuple[int, int], float],
                 gauss: Tuple[float, float, float], labels: str = "xy",
                 rtol: float = 1e-14):
        scale = poly_max(poly)
        cut = rtol * scale
        self.poly = {k: float(v) for k, v in poly.items() if abs(v) > cut}
        self.gauss = tuple(float(g) for g in gauss)
        self.labels = labels

    def __repr__(self) -> str:
        return f"GaussPolyState({len(self.poly)} terms, gauss={self.gauss})"

    def degree(self) -> int:
        return max((i + j for i, j in self.poly), default=-1)

    def max_coeff(self) -> float:
        return poly_max(self.poly)

    def same_gauss(self, other: "GaussPolyState") -> bool:
        return all(abs(a - b) <= GAUSS_ATOL * max(1.0, abs(a)) for a, b in zip(self.gauss, other.gauss))

    def _check(self, other: "GaussPolyState") -> None:
        if self.labels != other.labels:
            raise LabelMismatch("states use different variables")
        if not self.same_gauss(other):
            raise GaussianMismatch(f"{self.gauss} != {other.gauss}")

    def __add__(self, other: "GaussPolyState") -> "GaussPolyState":
        self._check(other)
        return GaussPolyState(padd(self.poly, other.poly), self.gauss, self.labels)

    def __sub__(self, other: "GaussPolyState") -> "GaussPolyState":
        self._check(other)
        return GaussPolyState(padd(self.poly, other.poly, -1.0), self.gauss, self.labels)

    def __mul__(self, s: float) -> "GaussPolyState":
        return GaussPolyState({k: s * v for k, v in self.poly.items()}, self.gauss, self.labels)

    __rmul__ = __mul__

    def __neg__(self) -> "GaussPolyState":
        return self * -1.0

    def to_dict(self) -> dict:
        return {
            "gauss": list(self.gauss),
            "poly": [[i, j, self.poly[(i, j)]] for (i, j) in sorted(self.poly)],
        }


def state_add(psi: GaussPolyState, phi: GaussPolyState) -> GaussPolyState:
    return psi + phi


def state_scale(psi: GaussPolyState, s: float) -> GaussPolyState:
    return psi * s


def state_is_zero(psi: GaussPolyState, tol: float = 1e-12, scale: float = 1.0) -> bool:
    return psi.max_coeff() <= tol * max(1.0, scale)


def eval_at(psi: GaussPolyState, x: float, y: float) -> float:
    a, b, g = psi.gauss
    p = sum(c * x**i * y**j for (i, j), c in psi.poly.items())
    return p * math.exp(-0.5 * a * x * x - 0.5 * b * y * y + g * x * y)


def state_difference(psi: GaussPolyState, phi: GaussPolyState) -> float:
    """Max coefficient of ``psi - phi`` without pruning."""
    psi._check(phi)
    keys = set(psi.poly) | set(phi.poly)
    return max((abs(psi.poly.get(k, 0.0) - phi.poly.get(k, 0.0)) for k in keys), default=0.0)


def proportionality(psi: GaussPolyState, phi: GaussPolyState, tol: float = 1e-10) -> Optional[float]:
    """``c`` with ``psi = c * phi``, or ``None`` if no such constant exists."""
    psi._check(phi)
    if not phi.poly:
        return None
    key = max(phi.poly, key=lambda k: abs(phi.poly[k]))
    c = psi.poly.get(key, 0.0) / phi.poly[key]
    scale = max(psi.max_coeff(), abs(c) * phi.max_coeff(), 1e-300)
    keys = set(psi.poly) | set(phi.poly)
    worst = max(abs(psi.poly.get(k, 0.0) - c * phi.poly.get(k, 0.0)) for k in keys)
    return c if worst <= tol * scale else None


def _d_state(poly: Mapping, gauss, var: int) -> dict:
    """Polynomial part of d/dvar (P * G)."""
    a, b, g = gauss
    # dG/dx = (-a x + g y) G ; dG/dy = (-b y + g x) G
    lin = {(1, 0): -a, (0, 1): g} if var == 0 else {(0, 1): -b, (1, 0): g}
    return padd(pderiv(poly, var), pmul(poly, lin))


def apply_to_state(A: WeylOp, psi: GaussPolyState) -> GaussPolyState:
    """Exact image ``A psi``; the Gaussian factor is unchanged."""
    if A.labels != psi.labels:
        raise LabelMismatch(f"operator on {A.labels!r}, state on {psi.labels!r}")
    # derivatives of psi, memoised by derivative orders
    cache: dict = {(0, 0): dict(psi.poly)}

    def deriv(c: int, d: int) -> dict:
        if (c, d) not in cache:
            if d > 0:
                cache[(c, d)] = _d_state(deriv(c, d - 1), psi.gauss, 1)
            else:
                cache[(c, d)] = _d_state(deriv(c - 1, 0), psi.gauss, 0)
        return cache[(c, d)]

    out: dict = defaultdict(float)
    for (a, b, c, d), x in A.terms.items():
        for (i, j), y in deriv(c, d).items():
            out[(i + a, j + b)] += x * y
    return GaussPolyState(out, psi.gauss, psi.labels)


def ground_state(p: ModelParams) -> GaussPolyState:
    """Formal ground state with P = 1 and unit normalisation constant."""
    return GaussPolyState({(0, 0): 1.0}, (p.alpha, p.beta, p.gamma))


def chain_seed(m: int, p: ModelParams) -> GaussPolyState:
    """``(x - y)^m`` times the ground-state Gaussian."""
    if m < 0:
        raise ValueError("m must be >= 0")
    poly = {(m - j, j): float(comb(m, j) * (-1) ** j) for j in range(m + 1)}
    return GaussPolyState(poly, (p.alpha, p.beta, p.gamma))


def multiply_poly(psi: GaussPolyState, poly: Mapping) -> GaussPolyState:
    """Multiply the polynomial prefactor by ``poly``."""
    return GaussPolyState(pmul(psi.poly, poly), psi.gauss, psi.labels)
