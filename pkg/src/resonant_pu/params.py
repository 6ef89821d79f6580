"""Model constants of the resonant Pais-Uhlenbeck oscillator.

The two-dimensional ghost Hamiltonian

    H_g = px^2 - py^2 + nu2 x^2 + Omega y^2 + g x y

has coinciding PU frequencies at ``g = -(nu2 + Omega)``.  Everything here works
at that coupling except :func:`general_ground_params` and
:func:`pu_frequencies`, which accept any ``g`` for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ComplexBranch,
    ComplexFrequency,
    DegenerateGap,
    InvalidSector,
    SingularMap,
    SingularSigma,
)

GUARD = 1e-8

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ModelParams:
    """Scalar constants at the degenerate coupling.

    Build with :func:`derive_params`; the constructor does not validate, which
    lets negative-control tests hand-craft inconsistent instances via
    :func:`dataclasses.replace`.
    """

    nu2: float
    Omega: float
    eta: int
    g: float
    kappa: float
    lam: float
    omega: float
    alpha: float
    beta: float
    gamma: float

    @property
    def gap(self) -> float:
        """nu2 - Omega."""
        return self.nu2 - self.Omega

    @property
    def total(self) -> float:
        """nu2 + Omega (equal to -g)."""
        return self.nu2 + self.Omega

    def as_dict(self) -> dict:
        return {
            "nu2": self.nu2,
            "Omega": self.Omega,
            "eta": self.eta,
            "g": self.g,
            "kappa": self.kappa,
            "lambda": self.lam,
            "omega": self.omega,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
        }


@dataclass(frozen=True)
class PUState:
    q: float
    qdot: float
    qddot: float
    qdddot: float


@dataclass(frozen=True)
class PhaseState:
    x: float
    y: float
    px: float
    py: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.px, self.py], dtype=float)

    @classmethod
    def from_array(cls, z) -> "PhaseState":
        x, y, px, py = (float(v) for v in z)
        return cls(x, y, px, py)


def derive_params(nu2: float, Omega: float, eta: int = 1) -> ModelParams:
    """All constants of the (epsilon=+1, eta) sector at the degenerate coupling.

    Raises
    ------
    DegenerateGap
        If ``nu2 - Omega <= GUARD`` or ``|nu2 + Omega| <= GUARD``.
    InvalidSector
        If ``eta`` is not +1 or -1.
    """
    if eta not in (1, -1):
        raise InvalidSector(f"eta must be +1 or -1, got {eta!r}")
    nu2 = float(nu2)
    Omega = float(Omega)
    gap = nu2 - Omega
    if not gap > GUARD:
        raise DegenerateGap(f"nu2 - Omega = {gap!r} must exceed {GUARD}")
    if abs(nu2 + Omega) <= GUARD:
        raise DegenerateGap(f"|nu2 + Omega| = {abs(nu2 + Omega)!r} must exceed {GUARD}")
    root = math.sqrt(gap)
    denom = 2.0 * SQRT2 * root
    kappa = root / SQRT2
    return ModelParams(
        nu2=nu2,
        Omega=Omega,
        eta=eta,
        g=-(nu2 + Omega),
        kappa=kappa,
        lam=(nu2 + Omega) / (SQRT2 * root),
        omega=2.0 * kappa,
        alpha=eta * (3.0 * nu2 - Omega) / denom,
        beta=-eta * (nu2 - 3.0 * Omega) / denom,
        gamma=eta * (nu2 + Omega) / denom,
    )


def general_ground_params(nu2: float, Omega: float, g: float, eps: int, eta: int):
    """Gaussian ground-state constants ``(alpha, beta, gamma)`` for any coupling.

    ``eps`` picks the branch of ``sigma = eps * sqrt(g^2 - 4 nu2 Omega)`` and
    ``eta`` the sign of the normalising root.
    """
    if eps not in (1, -1) or eta not in (1, -1):
        raise InvalidSector("eps and eta must be +1 or -1")
    disc = g * g - 4.0 * nu2 * Omega
    if disc < 0:
        raise ComplexBranch(f"g^2 - 4 nu2 Omega = {disc!r} < 0")
    sigma = eps * math.sqrt(disc)
    inner = nu2 - Omega + sigma
    if inner <= GUARD:
        raise SingularSigma(f"nu2 - Omega + sigma = {inner!r} is not positive")
    big_sigma = 2.0 * eta * math.sqrt(inner)
    return (
        (2.0 * nu2 + sigma) / big_sigma,
        (2.0 * Omega - sigma) / big_sigma,
        -g / big_sigma,
    )


def pu_frequencies(nu2: float, Omega: float, g: float) -> tuple[float, float]:
    """The two PU frequencies for a general coupling ``g``."""
    outer = (nu2 + Omega) ** 2 - g * g
    # (nu2+Omega)^2 - g^2 is exactly zero at g = -(nu2+Omega); only reject real negatives
    if outer < -1e-14 * max(1.0, (nu2 + Omega) ** 2):
        raise ComplexFrequency(f"(nu2+Omega)^2 - g^2 = {outer!r} < 0")
    root = math.sqrt(max(outer, 0.0))
    lo = nu2 - Omega - root
    hi = nu2 - Omega + root
    if lo < 0 or hi < 0:
        raise ComplexFrequency(f"negative radicand: {lo!r}, {hi!r}")
    return SQRT2 * math.sqrt(lo), SQRT2 * math.sqrt(hi)


def pu_from_ghost(s: PhaseState, p: ModelParams) -> PUState:
    """Map a ghost phase-space point to the PU variables (q, q', q'', q''').

    Momentum signs follow the flow of ``H_g`` (``ydot = -2 py``), so ``qdot``
    and ``qdddot`` are the time derivatives of ``q`` and ``qddot`` along it.
    """
    shift = p.nu2 + p.Omega - p.g
    if shift <= 0:
        raise SingularMap(f"nu2 + Omega - g = {shift!r} must be positive")
    r = math.sqrt(shift)
    cx = 2.0 * p.nu2 - p.g
    cy = p.g - 2.0 * p.Omega
    return PUState(
        q=-(s.x + s.y) / (2.0 * SQRT2 * r),
        qdot=-(s.px - s.py) / (SQRT2 * r),
        qddot=(cx * s.x + cy * s.y) / (SQRT2 * r),
        qdddot=SQRT2 * (cx * s.px - cy * s.py) / r,
    )


def hpu_value(s: PUState, p: ModelParams) -> float:
    """Higher-derivative PU energy with both frequencies equal to ``p.omega``."""
    w2 = p.omega**2
    return (
        0.5 * s.qddot**2
        - w2 * s.qdot**2
        - 0.5 * w2 * w2 * s.q**2
        - s.qdot * s.qdddot
    )


def hg_value(s: PhaseState, p: ModelParams) -> float:
    return (
        s.px**2
        - s.py**2
        + p.nu2 * s.x**2
        + p.Omega * s.y**2
        + p.g * s.x * s.y
    )


def is_normalizable(alpha: float, beta: float, gamma: float) -> bool:
    """Whether ``exp(-alpha x^2/2 - beta y^2/2 + gamma x y)`` is square integrable."""
    return alpha > 0 and beta > 0 and alpha * beta - gamma**2 > 0


def sample_params(rng: np.random.Generator, eta: int = 1) -> ModelParams:
    """Draw one parameter point with the package-wide sampling convention.

    Omega ~ U[-2, 2], nu2 = Omega + delta with delta ~ U[0.1, 10]; redrawn
    while |nu2 + Omega| < 0.05.
    """
    while True:
        Omega = rng.uniform(-2.0, 2.0)
        nu2 = Omega + rng.uniform(0.1, 10.0)
        if abs(nu2 + Omega) >= 0.05:
            return derive_params(nu2, Omega, eta)


def sample_param_list(n: int, seed: int = 42, eta: int = 1) -> list[ModelParams]:
    rng = np.random.default_rng(seed)
    return [sample_params(rng, eta) for _ in range(n)]
