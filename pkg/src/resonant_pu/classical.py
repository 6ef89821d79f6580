"""Classical phase-space dynamics on ``z = (x, y, px, py)``.

Quadratic Hamiltonians are symmetric matrices ``H`` with ``H(z) = z^T H z``,
so ``grad H = 2 H z`` and the flow is ``zdot = J (2 H z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ForbiddenRay
from .params import SQRT2, ModelParams, PhaseState, pu_from_ghost, sample_params

RAY_RTOL = 1e-6


@dataclass(frozen=True)
class PoissonTensor:
    J: np.ndarray

    def __post_init__(self):
        J = np.asarray(self.J, dtype=float)
        object.__setattr__(self, "J", 0.5 * (J - J.T))


@dataclass(frozen=True)
class QuadHamiltonian:
    Hmat: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.Hmat, dtype=float)
        object.__setattr__(self, "Hmat", 0.5 * (H + H.T))

    def __call__(self, z) -> float:
        z = _vec(z)
        return float(z @ self.Hmat @ z)

    def kinetic(self) -> np.ndarray:
        return self.Hmat[2:, 2:]

    def potential(self) -> np.ndarray:
        return self.Hmat[:2, :2]


def _vec(z) -> np.ndarray:
    if isinstance(z, PhaseState):
        return z.as_array()
    return np.asarray(z, dtype=float)


def build_Jg() -> PoissonTensor:
    J = np.zeros((4, 4))
    J[0, 2] = J[1, 3] = 1.0
    J[2, 0] = J[3, 1] = -1.0
    return PoissonTensor(J)


def build_J2(p: ModelParams) -> PoissonTensor:
    n2, Om = p.nu2, p.Omega
    B = np.array([[3 * n2 - Om, -n2 - Om], [n2 + Om, n2 - 3 * Om]])
    J = np.zeros((4, 4))
    J[:2, 2:] = B
    J[2:, :2] = -B.T
    return PoissonTensor(J / (SQRT2 * p.gap))


def build_Hg_classical(p: ModelParams) -> QuadHamiltonian:
    H = np.zeros((4, 4))
    H[0, 0] = p.nu2
    H[1, 1] = p.Omega
    H[0, 1] = H[1, 0] = 0.5 * p.g
    H[2, 2] = 1.0
    H[3, 3] = -1.0
    return QuadHamiltonian(H)


def build_H2_classical(p: ModelParams) -> QuadHamiltonian:
    n2, Om, gap, T = p.nu2, p.Omega, p.gap, p.total
    H = np.zeros((4, 4))
    H[0, 0] = 0.5 * (3 * n2 - Om)
    H[1, 1] = 0.5 * (3 * Om - n2)
    H[0, 1] = H[1, 0] = -0.5 * T
    H[2, 2] = (n2 - 3 * Om) / gap
    H[3, 3] = (Om - 3 * n2) / gap
    H[2, 3] = H[3, 2] = -T / gap
    return QuadHamiltonian(H / (2 * SQRT2))


def flow_matrix(J: PoissonTensor, H: QuadHamiltonian) -> np.ndarray:
    return J.J @ (2.0 * H.Hmat)


def flow_field(J: PoissonTensor, H: QuadHamiltonian, z) -> np.ndarray:
    return flow_matrix(J, H) @ _vec(z)


@dataclass(frozen=True)
class CombinedPair:
    c1: float
    c2: float
    c3: float
    c4: float
    Delta: float
    Jbar: PoissonTensor
    Hbar: QuadHamiltonian


def _check_ray(c1: float, c2: float) -> None:
    if abs(c1 + SQRT2 * c2) < RAY_RTOL * (abs(c1) + abs(c2) + 1.0):
        raise ForbiddenRay(f"c1 = -sqrt(2) c2 (c1={c1!r}, c2={c2!r})")


def combined_pair(c1: float, c2: float, p: ModelParams) -> CombinedPair:
    """``Jbar = c1 Jg + c2 J2`` and ``Hbar = c3 Hg + c4 H2`` generating the same flow."""
    _check_ray(c1, c2)
    delta = c1 * c1 + 2 * SQRT2 * c1 * c2 + 2 * c2 * c2
    c3 = c1 / delta
    c4 = 2 * c2 / delta
    Jbar = PoissonTensor(c1 * build_Jg().J + c2 * build_J2(p).J)
    Hbar = QuadHamiltonian(c3 * build_Hg_classical(p).Hmat + c4 * build_H2_classical(p).Hmat)
    return CombinedPair(c1, c2, c3, c4, delta, Jbar, Hbar)


def build_Mp_Mv(c1: float, c2: float, p: ModelParams):
    """Momentum and position blocks of ``Hbar`` from their closed forms."""
    _check_ray(c1, c2)
    n2, Om, gap, T = p.nu2, p.Omega, p.gap, p.total
    delta = c1 * c1 + 2 * SQRT2 * c1 * c2 + 2 * c2 * c2
    Mp = np.array([
        [SQRT2 * gap * c1 + (n2 - 3 * Om) * c2, -T * c2],
        [-T * c2, -SQRT2 * gap * c1 + (Om - 3 * n2) * c2],
    ]) / (SQRT2 * gap * delta)
    off = -(2 * c1 + SQRT2 * c2) * T
    Mv = np.array([
        [4 * n2 * c1 + SQRT2 * (3 * n2 - Om) * c2, off],
        [off, 4 * Om * c1 - SQRT2 * (n2 - 3 * Om) * c2],
    ]) / (4 * delta)
    return Mp, Mv


def block_eigenvalues(c1: float, c2: float, p: ModelParams):
    """Closed-form eigenvalues ``(E_p, E_v)`` of the two blocks, each sorted ascending."""
    _check_ray(c1, c2)
    n2, Om, gap, T = p.nu2, p.Omega, p.gap, p.total
    delta = c1 * c1 + 2 * SQRT2 * c1 * c2 + 2 * c2 * c2
    quart = 5 * n2**2 - 6 * n2 * Om + 5 * Om**2
    rp = math.sqrt(2 * c1**2 * gap**2 + 4 * SQRT2 * c1 * c2 * gap**2 + c2**2 * quart)
    rv = math.sqrt(
        8 * c1**2 * (n2**2 + Om**2)
        + 4 * SQRT2 * c1 * c2 * (3 * n2**2 - 2 * n2 * Om + 3 * Om**2)
        + 2 * c2**2 * quart
    )
    Ep = sorted(-(c2 * T + s * rp) / (SQRT2 * delta * gap) for s in (1, -1))
    Ev = sorted(((2 * c1 + SQRT2 * c2) * T + s * rv) / (4 * delta) for s in (1, -1))
    return np.array(Ep), np.array(Ev)


# -- trajectories -----------------------------------------------------------

def integrate(J: PoissonTensor, H: QuadHamiltonian, z0, t_max: float, dt: float):
    """Fixed-step classical RK4; returns ``(t, Z)`` with ``Z[i]`` the state at ``t[i]``."""
    if not dt > 0 or not t_max > 0:
        raise ValueError("dt and t_max must be positive")
    A = flow_matrix(J, H)
    n = int(round(t_max / dt))
    z = _vec(z0).copy()
    Z = np.empty((n + 1, 4))
    Z[0] = z
    for i in range(n):
        k1 = A @ z
        k2 = A @ (z + 0.5 * dt * k1)
        k3 = A @ (z + 0.5 * dt * k2)
        k4 = A @ (z + dt * k3)
        z = z + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        Z[i + 1] = z
    return np.arange(n + 1) * dt, Z


def ghost_flow_matrix(p: ModelParams) -> np.ndarray:
    return flow_matrix(build_Jg(), build_Hg_classical(p))


def propagator(p: ModelParams, t: float) -> np.ndarray:
    """``exp(A t)`` in closed form.

    With ``B = A^2 + omega^2`` (``B^2 = 0``) the nilpotent part is
    ``N = -A B / (2 omega^2)`` and ``S = A - N`` satisfies ``S^2 = -omega^2``, so
    ``exp(A t) = [cos(w t) + sin(w t) S / w] (1 + t N)``.
    """
    A = ghost_flow_matrix(p)
    w = p.omega
    eye = np.eye(4)
    B = A @ A + w * w * eye
    N = -(A @ B) / (2 * w * w)
    S = A - N
    return (math.cos(w * t) * eye + (math.sin(w * t) / w) * S) @ (eye + t * N)


def exact_solution(z0, t: float, p: ModelParams) -> PhaseState:
    return PhaseState.from_array(propagator(p, t) @ _vec(z0))


def jordan_structure(p: ModelParams) -> dict:
    """Characteristic polynomial, minimal-polynomial and geometric-multiplicity data."""
    A = ghost_flow_matrix(p)
    w2 = p.omega**2
    charpoly = np.poly(A).real
    expected = np.array([1.0, 0.0, 2 * w2, 0.0, w2 * w2])
    B = A @ A + w2 * np.eye(4)
    scale = np.linalg.norm(A, 2)
    sv = np.linalg.svd(A - 1j * p.omega * np.eye(4), compute_uv=False)
    rank = int(np.sum(sv > 1e-8 * scale))
    return {
        "A": A,
        "charpoly": charpoly,
        "charpoly_expected": expected,
        "charpoly_residual": float(np.max(np.abs(charpoly - expected)) / max(1.0, w2 * w2)),
        "B_norm": float(np.max(np.abs(B)) / max(1.0, scale**2)),
        "B2_residual": float(np.max(np.abs(B @ B)) / max(1.0, scale**4)),
        "rank_A_minus_iw": rank,
        "minimal_degree": 4 if np.max(np.abs(B)) > 1e-8 * max(1.0, scale**2) else 2,
    }


def conserved_Q(z, p: ModelParams) -> float:
    """``(T/gap) [(px + py)^2 / gap + (x - y)^2 / 2]`` with ``T = nu2 + Omega``.

    Equals ``w^2 (q + q''/w^2)^2 + (q' + q'''/w^2)^2`` evaluated through
    :func:`~resonant_pu.params.pu_from_ghost`.
    """
    x, y, px, py = _vec(z)
    return p.total / p.gap * ((px + py) ** 2 / p.gap + 0.5 * (x - y) ** 2)


def conserved_Q_pu(z, p: ModelParams) -> float:
    s = pu_from_ghost(PhaseState.from_array(_vec(z)), p)
    w2 = p.omega**2
    return w2 * (s.q + s.qddot / w2) ** 2 + (s.qdot + s.qdddot / w2) ** 2


def Q_matrix(p: ModelParams) -> QuadHamiltonian:
    """``conserved_Q`` as a quadratic form."""
    c = p.total / p.gap
    H = np.zeros((4, 4))
    H[:2, :2] = 0.5 * c * np.array([[1.0, -1.0], [-1.0, 1.0]])
    H[2:, 2:] = (c / p.gap) * np.array([[1.0, 1.0], [1.0, 1.0]])
    return QuadHamiltonian(H)


def Q_as_hamiltonian(p: ModelParams, z) -> dict:
    """Mismatch between ``J grad Q`` and the ghost flow for ``J = Jg`` and ``J = J2``."""
    target = ghost_flow_matrix(p) @ _vec(z)
    Q = Q_matrix(p)
    out = {}
    for name, J in (("Jg", build_Jg()), ("J2", build_J2(p))):
        diff = flow_field(J, Q, z) - target
        out[name] = float(np.max(np.abs(diff)) / max(1e-300, np.max(np.abs(target))))
    return out


# -- definiteness no-go -----------------------------------------------------

def _blocks_batch(C1: np.ndarray, C2: np.ndarray, p: ModelParams):
    """Vectorised :func:`build_Mp_Mv` over arrays of coefficients."""
    n2, Om, gap, T = p.nu2, p.Omega, p.gap, p.total
    delta = C1 * C1 + 2 * SQRT2 * C1 * C2 + 2 * C2 * C2
    Mp = np.empty(C1.shape + (2, 2))
    Mp[..., 0, 0] = SQRT2 * gap * C1 + (n2 - 3 * Om) * C2
    Mp[..., 1, 1] = -SQRT2 * gap * C1 + (Om - 3 * n2) * C2
    Mp[..., 0, 1] = Mp[..., 1, 0] = -T * C2
    Mp /= (SQRT2 * gap * delta)[..., None, None]
    Mv = np.empty(C1.shape + (2, 2))
    Mv[..., 0, 0] = 4 * n2 * C1 + SQRT2 * (3 * n2 - Om) * C2
    Mv[..., 1, 1] = 4 * Om * C1 - SQRT2 * (n2 - 3 * Om) * C2
    Mv[..., 0, 1] = Mv[..., 1, 0] = -(2 * C1 + SQRT2 * C2) * T
    Mv /= (4 * delta)[..., None, None]
    return Mp, Mv


def definiteness_scan(grid_c: int = 100, grid_p: int = 20, seed: int = 42,
                      abs_momentum: bool = False, abs_position: bool = False) -> dict:
    """Count grid points where both blocks of ``Hbar`` are positive definite.

    ``(c1, c2)`` runs over a ``grid_c x grid_c`` grid on ``[-5, 5]^2``; points
    within the forbidden-ray guard are skipped.  ``abs_momentum`` and
    ``abs_position`` replace the eigenvalues of the respective block by their
    absolute values; they exist as negative controls for the counter.  Each
    block has negative determinant on its own, so only the combination of both
    flags can produce a nonzero count.
    """
    if grid_c < 1 or grid_p < 1:
        raise ValueError("grid sizes must be >= 1")
    rng = np.random.default_rng(seed)
    params = [sample_params(rng) for _ in range(grid_p)]
    axis = np.linspace(-5.0, 5.0, grid_c)
    C1, C2 = (a.ravel() for a in np.meshgrid(axis, axis, indexing="ij"))
    keep = np.abs(C1 + SQRT2 * C2) >= RAY_RTOL * (np.abs(C1) + np.abs(C2) + 1.0)
    C1, C2 = C1[keep], C2[keep]
    count = 0
    best = -math.inf
    best_point = None
    per_param = []
    for p in params:
        Mp, Mv = _blocks_batch(C1, C2, p)
        ep = np.linalg.eigvalsh(Mp)
        if abs_momentum:
            ep = np.sort(np.abs(ep), axis=-1)
        ev = np.linalg.eigvalsh(Mv)
        if abs_position:
            ev = np.sort(np.abs(ev), axis=-1)
        n_pd = int(np.sum((ep[:, 0] > 0) & (ev[:, 0] > 0)))
        count += n_pd
        per_param.append(n_pd)
        worst = np.minimum(ep[:, 0], ev[:, 0])
        i = int(np.argmax(worst))
        if worst[i] > best:
            best = float(worst[i])
            best_point = {"c1": float(C1[i]), "c2": float(C2[i]), "nu2": p.nu2, "Omega": p.Omega}
    return {
        "count": count,
        "points": int(C1.size) * len(params),
        "skipped": int((~keep).sum()) * len(params),
        "max_min_eigenvalue": best,
        "argmax": best_point,
        "per_param_counts": per_param,
        "grid_c": grid_c,
        "grid_p": grid_p,
        "seed": seed,
    }
