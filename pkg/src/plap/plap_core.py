"""The p-Laplacian for 1 < p < inf: Rayleigh quotients, residuals, gradients, linear index.

Norm conventions: ``||Kf||_p^p`` sums ``|Kf|^p`` once per undirected edge (the 1/2
of the directed sum), ``||f||_{nu,p}^p = sum nu |f|^p``.  ``R_p = ||Kf||_p / ||f||_{nu,p}``
and an eigenpair satisfies ``Delta_p f = lambda nu |f|^{p-2} f`` with ``lambda = R_p^p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .graph_core import Graph, divergence_apply, incidence_apply

INF = math.inf

__all__ = [
    "Kind",
    "Eigenpair",
    "WeightedLinearSpectrum",
    "Gradient",
    "phi",
    "parse_p",
    "edge_norm",
    "node_norm",
    "rayleigh_p",
    "p_laplacian_apply",
    "eigen_residual",
    "rayleigh_gradient",
    "weighted_linear_spectrum",
    "linear_index_of_eigenpair",
]


class Kind(str, Enum):
    CLASSICAL = "classical"
    GENERALIZED = "generalized"
    VISCOSITY = "viscosity"
    CONSTRUCTED = "constructed"


@dataclass
class Eigenpair:
    """Candidate eigenpair ``(f, lambda, p)``.

    ``lam`` is the unnormalized value ``lambda = Lambda^p`` for ``1 < p < inf``.  For the
    degenerate exponents ``p in {1, inf}`` there is no meaningful power, and ``lam``
    stores ``Lambda`` itself.
    """

    f: np.ndarray
    lam: float
    p: float
    kind: Kind = Kind.CLASSICAL
    residual: float = math.nan
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=float)
        if not np.any(self.f):
            raise ValueError("eigenfunction must be nonzero")
        self.kind = Kind(self.kind)

    @property
    def degenerate(self) -> bool:
        return self.p == 1 or math.isinf(self.p)

    @property
    def Lambda(self) -> float:
        if self.degenerate:
            return self.lam
        return max(self.lam, 0.0) ** (1.0 / self.p)

    def to_json(self, g: Graph) -> dict:
        return {
            "f": g.as_dict(self.f),
            "lambda": self.lam,
            "Lambda": self.Lambda,
            "p": self.p,
            "kind": self.kind.value,
            "residual": self.residual,
        }


def parse_p(text) -> float:
    """Parse an exponent; ``'inf'`` gives ``math.inf``. Values below 1 are rejected."""
    p = float(text)
    if math.isnan(p) or p < 1:
        raise ValueError(f"p must lie in [1, inf], got {text!r}")
    return p


def phi(x, p: float) -> np.ndarray:
    """``|x|^{p-2} x`` with the continuous value 0 at 0."""
    x = np.asarray(x, dtype=float)
    if p == 2:
        return x.copy()
    ax = np.abs(x)
    out = np.zeros_like(x)
    nz = ax > 0
    out[nz] = ax[nz] ** (p - 1) * np.sign(x[nz])
    return out


def edge_norm(G, p: float) -> float:
    """``||G||_p`` with one term per undirected edge."""
    G = np.abs(np.asarray(G, dtype=float))
    if G.size == 0:
        return 0.0
    if math.isinf(p):
        return float(G.max())
    return float(np.sum(G ** p) ** (1.0 / p))


def node_norm(g: Graph, f, p: float) -> float:
    """``||f||_{nu,p}``; the sup norm ignores ``nu``."""
    f = np.abs(np.asarray(f, dtype=float))
    if math.isinf(p):
        return float(f.max())
    return float(np.sum(g.nu_vec * f ** p) ** (1.0 / p))


def rayleigh_p(g: Graph, f, p: float) -> float:
    """``R_p(f) = ||Kf||_p / ||f||_{nu,p}`` for any ``p in [1, inf]``."""
    f = np.asarray(f, dtype=float)
    if not np.any(f):
        raise ValueError("Rayleigh quotient of the zero function")
    return edge_norm(incidence_apply(g, f), p) / node_norm(g, f, p)


def p_laplacian_apply(g: Graph, f, p: float) -> np.ndarray:
    """``(Delta_p f)(u) = sum_v omega^p |f(u)-f(v)|^{p-2} (f(u)-f(v))`` with ``f = 0`` on ``B``."""
    if not p > 1 or math.isinf(p):
        raise ValueError("p_laplacian_apply needs 1 < p < inf")
    return -divergence_apply(g, phi(incidence_apply(g, f), p))


def eigen_residual(g: Graph, f, lam: float, p: float) -> float:
    """Scaled sup-norm defect of ``Delta_p f = lambda nu phi_p(f)``."""
    f = np.asarray(f, dtype=float)
    if not np.any(f):
        raise ValueError("residual of the zero function")
    lap = p_laplacian_apply(g, f, p)
    defect = lap - lam * g.nu_vec * phi(f, p)
    return float(np.max(np.abs(defect)) / max(1.0, float(np.max(np.abs(lap)))))


class Gradient(NamedTuple):
    value: np.ndarray
    differentiable: bool


def rayleigh_gradient(g: Graph, f, p: float) -> Gradient:
    """Gradient of ``R_p^p`` at ``f``: ``p (Delta_p f - R_p^p nu phi_p(f)) / ||f||_{nu,p}^p``.

    It vanishes exactly at eigenfunctions.  For ``p < 2`` the flag ``differentiable``
    is False whenever some ``f(u)`` or ``Kf(e)`` is zero, where the gradient is only
    Hoelder continuous and the returned vector is one selection.
    """
    f = np.asarray(f, dtype=float)
    Kf = incidence_apply(g, f)
    denom = float(np.sum(g.nu_vec * np.abs(f) ** p))
    if denom == 0:
        raise ValueError("gradient at the zero function")
    rp = float(np.sum(np.abs(Kf) ** p)) / denom
    grad = p * (-divergence_apply(g, phi(Kf, p)) - rp * g.nu_vec * phi(f, p)) / denom
    smooth = p >= 2 or (bool(np.all(f != 0)) and bool(np.all(Kf != 0)))
    return Gradient(grad, smooth)


# ---------------------------------------------------------------------------
# constrained linear reformulation


@dataclass
class WeightedLinearSpectrum:
    """Generalized eigenvalues of ``-div(theta Kx) = lambda nu* x``.

    ``eigenvalues`` holds the finite values in increasing order followed by ``+inf``
    entries.  ``indeterminate`` counts directions where both sides vanish (singular
    pencil); they carry no eigenvalue and are excluded from the list.
    """

    eigenvalues: list[float]
    index_of_query: int | None = None
    multiplicity: int | None = None
    indeterminate: int = 0

    @property
    def n_infinite(self) -> int:
        return sum(math.isinf(x) for x in self.eigenvalues)


def _stiffness(g: Graph, theta) -> np.ndarray:
    """Matrix of the form ``sum_e theta_e omega_e^2 (x_a - x_b)^2`` on interior nodes."""
    n = g.n
    L = np.zeros((n, n))
    ti = g._full_to_interior[g.tails]
    hi = g._full_to_interior[g.heads]
    c = np.asarray(theta, dtype=float) * g.w ** 2
    for a, b, ce in zip(ti, hi, c):
        if a >= 0:
            L[a, a] += ce
        if b >= 0:
            L[b, b] += ce
        if a >= 0 and b >= 0:
            L[a, b] -= ce
            L[b, a] -= ce
    return L


def weighted_linear_spectrum(g: Graph, theta, nu_star, query: float | None = None,
                             rtol: float = 1e-8) -> WeightedLinearSpectrum:
    """Spectrum of the ``(theta, nu*)``-weighted Laplacian pencil.

    Nodes with ``nu* = 0`` are eliminated by a Schur complement.  Each such node adds a
    ``+inf`` eigenvalue unless it lies in the null space of the stiffness block on the
    zero set, in which case the pencil is singular there (counted as indeterminate).
    When ``query`` is given, ``index_of_query`` is the 1-based position of the last
    eigenvalue in the cluster matching it and ``multiplicity`` the cluster size.
    """
    theta = np.asarray(theta, dtype=float)
    nu_star = np.asarray(nu_star, dtype=float)
    if theta.shape != (g.m,) or nu_star.shape != (g.n,):
        raise ValueError("theta must be an edge function and nu_star a node function")
    if np.any(theta < 0) or np.any(nu_star < 0):
        raise ValueError("weights must be nonnegative")
    if not np.any(theta) and not np.any(nu_star):
        raise ValueError("both weights are identically zero")
    L = _stiffness(g, theta)
    S = np.flatnonzero(nu_star > 0)
    Z = np.flatnonzero(nu_star == 0)
    n_indet = 0
    if Z.size:
        LZZ = L[np.ix_(Z, Z)]
        w = np.linalg.eigvalsh(LZZ)
        tol = 1e-12 * max(1.0, float(np.abs(LZZ).max()))
        n_indet = int(np.sum(w <= tol))
        LSZ = L[np.ix_(S, Z)]
        schur = L[np.ix_(S, S)] - LSZ @ np.linalg.pinv(LZZ, rcond=1e-12, hermitian=True) @ LSZ.T
    else:
        schur = L
    finite = []
    if S.size:
        schur = 0.5 * (schur + schur.T)
        finite = scipy.linalg.eigh(schur, np.diag(nu_star[S]), eigvals_only=True).tolist()
        finite = [max(x, 0.0) if x > -1e-12 else x for x in finite]
    vals = sorted(finite) + [INF] * (Z.size - n_indet)
    spec = WeightedLinearSpectrum(vals, indeterminate=n_indet)
    if query is not None:
        close = [i for i, x in enumerate(vals)
                 if math.isfinite(x) and abs(x - query) <= rtol * max(1.0, abs(query))]
        if not close:
            raise ValueError(f"{query} is not an eigenvalue of the weighted problem")
        spec.index_of_query = close[-1] + 1
        spec.multiplicity = len(close)
    return spec


def linear_index_of_eigenpair(g: Graph, e: Eigenpair, tol: float = 1e-8) -> tuple[int, int]:
    """Position ``(h, m)`` of ``lambda`` in the spectrum with ``theta = |Kf|^{p-2}``, ``nu* = nu|f|^{p-2}``.

    The Morse index of ``R_p`` at ``f`` is then ``h - m`` for ``p > 2``.
    """
    p = e.p
    if not 1 < p < INF:
        raise ValueError("linear index needs 1 < p < inf")
    res = eigen_residual(g, e.f, e.lam, p)
    if res > tol:
        raise ValueError(f"eigen residual {res:.3g} exceeds {tol}")
    f = e.f / np.max(np.abs(e.f))
    Kf = incidence_apply(g, f)
    if p < 2 and (np.any(f == 0) or np.any(Kf == 0)):
        raise ValueError("weights |f|^{p-2} are singular for p < 2 at zeros of f or Kf")
    with np.errstate(divide="ignore"):
        theta = np.where(Kf != 0, np.abs(Kf) ** (p - 2), 0.0) if p != 2 else np.ones_like(Kf)
        nu_star = g.nu_vec * (np.where(f != 0, np.abs(f) ** (p - 2), 0.0) if p != 2 else 1.0)
    spec = weighted_linear_spectrum(g, theta, nu_star, query=e.lam, rtol=1e-6)
    return spec.index_of_query, spec.multiplicity
