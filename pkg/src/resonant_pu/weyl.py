"""Differential operators in two variables with polynomial coefficients.

A :class:`WeylOp` stores terms ``c * u^a v^b d_u^c d_v^d`` keyed by the
multi-index ``(a, b, c, d)``, always in normal order (multiplication operators
to the left of derivatives).  ``u, v`` are abstract: the label ``"xy"`` means
``(x, y)`` and ``"pu"`` means ``(q, q'')``.
"""

from __future__ import annotations

from collections import defaultdict
from math import comb
from numbers import Real
from typing import Dict, Mapping, Tuple

import numpy as np

from .errors import LabelMismatch

Index = Tuple[int, int, int, int]
Poly = Dict[Tuple[int, int], float]

PRUNE_RTOL = 1e-14
LABELS = ("xy", "pu")
_NAMES = {"xy": ("x", "y"), "pu": ("q", "qdd")}


def falling(a: int, j: int) -> int:
    """Falling factorial a (a-1) ... (a-j+1)."""
    out = 1
    for i in range(j):
        out *= a - i
    return out


def _prune(terms: Mapping, rtol: float = PRUNE_RTOL) -> dict:
    if not terms:
        return {}
    scale = max(abs(c) for c in terms.values())
    if scale == 0.0:
        return {}
    cut = rtol * scale
    return {k: float(c) for k, c in terms.items() if abs(c) > cut}


class WeylOp:
    """Immutable normal-ordered operator.

    Arithmetic: ``A + B``, ``A - B``, ``s * A`` for scalars, ``A * B`` for
    composition, ``A ** n`` for repeated composition.  Scalars added to an
    operator act as multiples of the identity.
    """

    __slots__ = ("_terms", "labels")

    def __init__(self, terms: Mapping[Index, float] | None = None, labels: str = "xy"):
        if labels not in LABELS:
            raise ValueError(f"unknown labels {labels!r}")
        self._terms = _prune(terms or {})
        self.labels = labels

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, labels: str = "xy") -> "WeylOp":
        return cls({}, labels)

    @classmethod
    def const(cls, c: float, labels: str = "xy") -> "WeylOp":
        return cls({(0, 0, 0, 0): c}, labels)

    @classmethod
    def identity(cls, labels: str = "xy") -> "WeylOp":
        return cls.const(1.0, labels)

    @classmethod
    def mono(cls, a: int, b: int, c: int = 0, d: int = 0, coeff: float = 1.0,
             labels: str = "xy") -> "WeylOp":
        return cls({(a, b, c, d): coeff}, labels)

    @classmethod
    def var(cls, i: int, labels: str = "xy") -> "WeylOp":
        """Multiplication by the first (i=0) or second (i=1) variable."""
        return cls.mono(1 - i, i, labels=labels)

    @classmethod
    def d(cls, i: int, labels: str = "xy") -> "WeylOp":
        """Partial derivative in the first (i=0) or second (i=1) variable."""
        return cls.mono(0, 0, 1 - i, i, labels=labels)

    @classmethod
    def generators(cls, labels: str = "xy"):
        """``(u, v, d_u, d_v)`` as operators."""
        return cls.var(0, labels), cls.var(1, labels), cls.d(0, labels), cls.d(1, labels)

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def coeff(self, a: int, b: int, c: int = 0, d: int = 0) -> float:
        return self._terms.get((a, b, c, d), 0.0)

    def max_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(k) for k in self._terms), default=0)

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        return f"WeylOp({self.labels!r}, {len(self)} terms)"

    def __str__(self) -> str:
        return " + ".join(line for line in self.describe()) or "0"

    def describe(self) -> list[str]:
        """Sorted human-readable term list."""
        u, v = _NAMES[self.labels]
        out = []
        for (a, b, c, d) in sorted(self._terms):
            factors = []
            for name, p in ((u, a), (v, b), ("d" + u, c), ("d" + v, d)):
                if p == 1:
                    factors.append(name)
                elif p > 1:
                    factors.append(f"{name}^{p}")
            out.append(f"{self._terms[(a, b, c, d)]:.17g}" + "".join("*" + f for f in factors))
        return out

    # -- arithmetic ---------------------------------------------------
    def _check(self, other: "WeylOp") -> None:
        if other.labels != self.labels:
            raise LabelMismatch(f"cannot combine {self.labels!r} with {other.labels!r}")

    def _coerce(self, other) -> "WeylOp":
        if isinstance(other, WeylOp):
            self._check(other)
            return other
        if isinstance(other, (Real, np.floating, np.integer)):
            return WeylOp.const(float(other), self.labels)
        return NotImplemented

    def __add__(self, other) -> "WeylOp":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = defaultdict(float, self._terms)
        for k, c in other._terms.items():
            out[k] += c
        return WeylOp(out, self.labels)

    __radd__ = __add__

    def __neg__(self) -> "WeylOp":
        return WeylOp({k: -c for k, c in self._terms.items()}, self.labels)

    def __sub__(self, other) -> "WeylOp":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "WeylOp":
        return (-self) + other

    def scale(self, s: float) -> "WeylOp":
        return WeylOp({k: s * c for k, c in self._terms.items()}, self.labels)

    def __mul__(self, other) -> "WeylOp":
        if isinstance(other, WeylOp):
            return compose(self, other)
        if isinstance(other, (Real, np.floating, np.integer)):
            return self.scale(float(other))
        return NotImplemented

    def __rmul__(self, other) -> "WeylOp":
        if isinstance(other, (Real, np.floating, np.integer)):
            return self.scale(float(other))
        return NotImplemented

    def __truediv__(self, s) -> "WeylOp":
        return self.scale(1.0 / float(s))

    def __pow__(self, n: int) -> "WeylOp":
        if n < 0:
            raise ValueError("negative power")
        out = WeylOp.identity(self.labels)
        for _ in range(n):
            out = compose(out, self)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeylOp):
            return NotImplemented
        return op_equal(self, other, 0.0)

    __hash__ = None

    # -- actions --------------------------------------------------------
    def apply_poly(self, poly: Mapping[Tuple[int, int], float]) -> Poly:
        return apply_to_poly(self, poly)


def _reorder_1d(c: int, a: int):
    """``d^c u^a`` as a list of ``(coeff, power of u, power of d)``."""
    return [
        (comb(c, j) * falling(a, j), a - j, c - j)
        for j in range(min(a, c) + 1)
    ]


def compose(A: WeylOp, B: WeylOp) -> WeylOp:
    """Normal-ordered product ``A B``."""
    A._check(B)
    out: dict = defaultdict(float)
    for (a1, b1, c1, d1), x in A._terms.items():
        for (a2, b2, c2, d2), y in B._terms.items():
            xy = x * y
            for cu, pu_, du in _reorder_1d(c1, a2):
                for cv, pv, dv in _reorder_1d(d1, b2):
                    key = (a1 + pu_, b1 + pv, du + c2, dv + d2)
                    out[key] += xy * cu * cv
    return WeylOp(out, A.labels)


def commutator(A: WeylOp, B: WeylOp) -> WeylOp:
    return compose(A, B) - compose(B, A)


def op_equal(A: WeylOp, B: WeylOp, tol: float = 1e-10) -> bool:
    """Relative coefficient comparison, scaled by max(1, largest coefficient)."""
    A._check(B)
    diff = A - B
    scale = max(1.0, A.max_coeff(), B.max_coeff())
    return diff.max_coeff() <= tol * scale


def residual(A: WeylOp, B: WeylOp, *scale_ops: WeylOp) -> float:
    """``max|coeff(A - B)| / max(1, largest coefficient of A, B and scale_ops)``."""
    A._check(B)
    scale = max([1.0, A.max_coeff(), B.max_coeff()] + [op.max_coeff() for op in scale_ops])
    # compare unpruned differences so tiny residuals stay visible
    keys = set(A._terms) | set(B._terms)
    diff = max((abs(A._terms.get(k, 0.0) - B._terms.get(k, 0.0)) for k in keys), default=0.0)
    return diff / scale


def apply_to_poly(A: WeylOp, poly: Mapping[Tuple[int, int], float]) -> Poly:
    """Action of ``A`` on a plain polynomial ``{(i, j): coeff}``."""
    out: dict = defaultdict(float)
    for (a, b, c, d), x in A._terms.items():
        for (i, j), y in poly.items():
            if c > i or d > j:
                continue
            out[(i - c + a, j - d + b)] += x * y * falling(i, c) * falling(j, d)
    return {k: v for k, v in out.items() if v != 0.0}


def linear_substitution(A: WeylOp, L, labels: str | None = None) -> WeylOp:
    """Rewrite ``A`` in new variables ``w = L u`` (``L`` invertible 2x2).

    Multiplication operators transform with ``L^{-1}`` and derivatives with
    ``L^T``; normal order is preserved because each group stays together.
    """
    L = np.asarray(L, dtype=float)
    Linv = np.linalg.inv(L)
    labels = labels or A.labels
    # u_i = sum_k Linv[i, k] w_k ;  d_{u_i} = sum_k L[k, i] d_{w_k}
    mult = [{(1, 0): Linv[i, 0], (0, 1): Linv[i, 1]} for i in range(2)]
    der = [{(1, 0): L[0, i], (0, 1): L[1, i]} for i in range(2)]

    def ppow(p, n):
        out = {(0, 0): 1.0}
        for _ in range(n):
            out = pmul(out, p)
        return out

    out: dict = defaultdict(float)
    for (a, b, c, d), x in A._terms.items():
        left = pmul(ppow(mult[0], a), ppow(mult[1], b))
        right = pmul(ppow(der[0], c), ppow(der[1], d))
        for (i, j), y in left.items():
            for (k, l), z in right.items():
                out[(i, j, k, l)] += x * y * z
    return WeylOp(out, labels)


# -- bivariate polynomial helpers ------------------------------------------

def pmul(p: Mapping, q: Mapping) -> Poly:
    out: dict = defaultdict(float)
    for (i1, j1), x in p.items():
        for (i2, j2), y in q.items():
            out[(i1 + i2, j1 + j2)] += x * y
    return dict(out)


def padd(p: Mapping, q: Mapping, s: float = 1.0) -> Poly:
    out = defaultdict(float, p)
    for k, v in q.items():
        out[k] += s * v
    return dict(out)


def pderiv(p: Mapping, var: int) -> Poly:
    out = {}
    for (i, j), c in p.items():
        if var == 0 and i > 0:
            out[(i - 1, j)] = out.get((i - 1, j), 0.0) + i * c
        elif var == 1 and j > 0:
            out[(i, j - 1)] = out.get((i, j - 1), 0.0) + j * c
    return out


def poly_max(p: Mapping) -> float:
    return max((abs(v) for v in p.values()), default=0.0)


# alternative names
op_add = WeylOp.__add__
op_compose = compose
op_commutator = commutator
