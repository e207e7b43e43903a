"""Edge q-Laplacian and the node-to-edge duality transform.

With ``K^T = -div`` (adjoint for the stored-edge inner product) and
``Khat^T = nu^{-1} K^T``, an edge function ``G`` is a q-eigenfunction when

    K phi_q(Khat^T G) = eta phi_q(G),

and ``R_q^E(G) = ||Khat^T G||_{nu,q} / ||G||_q``.  A node pair ``(f, lambda)`` at
exponent ``p`` maps to ``(phi_p(Kf), lambda^{q-1})`` with ``q = p/(p-1)``, and the
edge quotient of the image equals the node value ``Lambda``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .degenerate import _div_matrix, _lp_phase1, verify_1_eigenpair, verify_inf_eigenpair
from .graph_core import Graph, divergence_apply, incidence_apply
from .plap_core import Eigenpair, edge_norm, eigen_residual, node_norm, phi

INF = math.inf

__all__ = [
    "EdgeEigenpair",
    "DegenerateDual",
    "khat_transpose",
    "edge_rayleigh",
    "edge_qlap_apply",
    "edge_residual",
    "node_to_edge_dual",
    "degenerate_dual",
    "kernel_dims",
]


@dataclass
class EdgeEigenpair:
    G: np.ndarray
    Lambda: float
    q: float
    eta: float
    residual: float = math.nan

    def to_json(self, g: Graph) -> dict:
        return {"G": g.edge_dict(self.G), "Lambda": self.Lambda, "q": self.q,
                "eta": self.eta, "residual": self.residual}


def khat_transpose(g: Graph, G) -> np.ndarray:
    """``Khat^T G = nu^{-1} (-div G)``."""
    return -divergence_apply(g, G) / g.nu_vec


def edge_rayleigh(g: Graph, G, q: float) -> float:
    """``R_q^E(G) = ||Khat^T G||_{nu,q} / ||G||_q`` for ``q in [1, inf]``."""
    G = np.asarray(G, dtype=float)
    if not np.any(G):
        raise ValueError("edge Rayleigh quotient of the zero function")
    return node_norm(g, khat_transpose(g, G), q) / edge_norm(G, q)


def edge_qlap_apply(g: Graph, G, q: float) -> np.ndarray:
    """``K phi_q(Khat^T G)``, an edge function (antisymmetric by storage)."""
    if not 1 < q < INF:
        raise ValueError("edge q-Laplacian needs 1 < q < inf")
    return incidence_apply(g, phi(khat_transpose(g, G), q))


def edge_residual(g: Graph, G, eta: float, q: float) -> float:
    """Scaled sup-norm defect of ``K phi_q(Khat^T G) = eta phi_q(G)``."""
    lhs = edge_qlap_apply(g, G, q)
    defect = lhs - eta * phi(G, q)
    return float(np.max(np.abs(defect)) / max(1.0, float(np.max(np.abs(lhs)))))


def node_to_edge_dual(g: Graph, e: Eigenpair, tol: float = 1e-8) -> EdgeEigenpair:
    """Map a node eigenpair with ``lambda > 0`` to its dual edge eigenpair."""
    p = e.p
    if not 1 < p < INF:
        raise ValueError("smooth duality needs 1 < p < inf; use degenerate_dual for p in {1, inf}")
    if e.lam <= 0:
        raise ValueError("eigenvalue 0 (kernel of K) has no dual edge pair")
    res = eigen_residual(g, e.f, e.lam, p)
    if res > tol:
        raise ValueError(f"node pair residual {res:.3g} exceeds {tol}")
    q = p / (p - 1)
    G = phi(incidence_apply(g, e.f), p)
    eta = e.lam ** (q - 1)
    return EdgeEigenpair(G, edge_rayleigh(g, G, q), q, eta, edge_residual(g, G, eta, q))


@dataclass
class DegenerateDual:
    """Dual edge pair ``(Xi, Lambda)`` of a certified 1- or inf-eigenpair and its edge certificate."""

    feasible: bool
    edge: EdgeEigenpair | None
    y: np.ndarray | None = None
    theta: np.ndarray | None = None
    reason: str = ""

    def __bool__(self):
        return self.feasible

    def to_json(self, g: Graph) -> dict:
        return {"feasible": self.feasible, "reason": self.reason,
                "edge": self.edge.to_json(g) if self.edge else None,
                "y": g.as_dict(self.y) if self.y is not None else None,
                "theta": g.edge_dict(self.theta) if self.theta is not None else None}


def degenerate_dual(g: Graph, f, Lambda: float, p: float, tol: float = 1e-9) -> DegenerateDual:
    """Dual of a degenerate node pair via its subgradient certificate.

    The node certificate ``(xi, Xi)`` is computed first; ``Xi`` is the dual edge
    function with value ``Lambda``.  It is then checked against the edge subgradient
    equation ``K y = Lambda theta`` by a second LP: for ``p = 1`` the edge exponent is
    inf (``y`` and ``theta`` are sup-norm subgradients), for ``p = inf`` it is 1 (sign
    selections).
    """
    if p == 1:
        cert = verify_1_eigenpair(g, f, Lambda, tol)
        qe = INF
    elif math.isinf(p):
        cert = verify_inf_eigenpair(g, f, Lambda, tol)
        qe = 1.0
    else:
        raise ValueError("degenerate_dual needs p in {1, inf}")
    if not cert:
        return DegenerateDual(False, None, reason=f"node certificate: {cert.reason}")
    Xi = cert.Xi
    if not np.any(np.abs(Xi) > 1e-12):
        return DegenerateDual(False, None, reason="Xi vanishes (Lambda = 0 has no dual)")
    x = khat_transpose(g, Xi)
    edge = EdgeEigenpair(Xi.copy(), edge_rayleigh(g, Xi, qe), qe, Lambda)
    Kmat = -_div_matrix(g).T  # K as a matrix on interior nodes
    nu = g.nu_vec
    if qe == INF:
        xm = float(np.max(np.abs(x)))
        Xm = float(np.max(np.abs(Xi)))
        vs = np.flatnonzero(np.abs(x) >= xm * (1 - 1e-9))
        es = np.flatnonzero(np.abs(Xi) >= Xm * (1 - 1e-9))
        sv, se = np.sign(x[vs]), np.sign(Xi[es])
        A = np.vstack([
            np.hstack([Kmat[:, vs] * sv, -Lambda * np.eye(g.m)[:, es] * se]),
            np.concatenate([nu[vs], np.zeros(es.size)])[None, :],
            np.concatenate([np.zeros(vs.size), np.ones(es.size)])[None, :],
        ])
        b = np.concatenate([np.zeros(g.m), [1.0, 1.0]])
        sol, slack = _lp_phase1(A, b, [(0.0, None)] * A.shape[1])
        if sol is None or slack > tol:
            return DegenerateDual(False, edge, reason="edge certificate infeasible")
        y = np.zeros(g.n)
        th = np.zeros(g.m)
        y[vs] = sv * sol[: vs.size]
        th[es] = se * sol[vs.size:]
    else:
        xs = np.where(np.abs(x) <= 1e-12 * max(1.0, float(np.max(np.abs(x)))), 0.0, np.sign(x))
        Xs = np.where(np.abs(Xi) <= 1e-12, 0.0, np.sign(Xi))
        fv = np.flatnonzero(xs == 0)
        fe = np.flatnonzero(Xs == 0)
        rhs = -(Kmat @ xs - Lambda * Xs)
        A = np.hstack([Kmat[:, fv], -Lambda * np.eye(g.m)[:, fe]])
        sol, slack = _lp_phase1(A, rhs, [(-1.0, 1.0)] * A.shape[1])
        if sol is None or slack > tol:
            return DegenerateDual(False, edge, reason="edge certificate infeasible")
        y, th = xs.copy(), Xs.copy()
        y[fv] = sol[: fv.size]
        th[fe] = sol[fv.size:]
    edge.residual = float(np.max(np.abs(Kmat @ y - Lambda * th))) if g.m else 0.0
    return DegenerateDual(True, edge, y, th)


def kernel_dims(g: Graph) -> tuple[int, int]:
    """``(dim ker K, dim ker K^T)``.

    ``ker K`` has one constant per component without boundary nodes; the edge kernel
    follows from rank-nullity on the ``|E| x N`` matrix.
    """
    d1 = sum(1 for comp in g.components if not any(v in g.boundary for v in comp))
    n_edges = g.m
    return d1, n_edges - (g.n - d1)
