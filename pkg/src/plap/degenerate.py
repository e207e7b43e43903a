"""Eigenpairs for the degenerate exponents p = 1 and p = inf.

Certification reduces to small linear feasibility problems over subgradient
selections ``(xi, Xi)``; these are solved as phase-1 LPs with HiGHS.  The module
also provides the shortest-path characterization of inf-eigenfunctions, the
pointwise viscosity check and the standard constructions (cones, span samples,
nodal-domain generators, perfect nodal functions).

Throughout, ``Eigenpair.lam`` stores ``Lambda`` itself when ``p`` is 1 or inf.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .graph_core import Graph, divergence_apply, incidence_apply
from .plap_core import Eigenpair, Kind, rayleigh_p

INF = math.inf
LP_TOL = 1e-9
RAYLEIGH_RTOL = 1e-10

__all__ = [
    "Certificate1",
    "CertificateInf",
    "SPWitness",
    "ViscosityReport",
    "verify_1_eigenpair",
    "verify_inf_eigenpair",
    "sp_witness",
    "verify_viscosity",
    "cone_eigenfunction",
    "inf_eigenspace_span",
    "one_lap_nodal_generators",
    "sp_l_check",
    "perfect_nodal_constructor",
]


# ---------------------------------------------------------------------------
# certificates


@dataclass
class Certificate1:
    """Subgradient pair for a 1-eigenpair: ``-div Xi = Lambda nu xi``."""

    feasible: bool
    xi: np.ndarray | None = None
    Xi: np.ndarray | None = None
    residual: float = math.nan
    reason: str = ""
    Lambda: float = math.nan

    def __bool__(self):
        return self.feasible

    def to_json(self, g: Graph) -> dict:
        return {
            "feasible": self.feasible,
            "reason": self.reason,
            "Lambda": self.Lambda,
            "residual": self.residual,
            "xi": g.as_dict(self.xi) if self.xi is not None else None,
            "Xi": g.edge_dict(self.Xi) if self.Xi is not None else None,
        }


@dataclass
class CertificateInf(Certificate1):
    """Subgradient pair for an inf-eigenpair: ``-div Xi = Lambda xi``.

    ``xi`` is sign-aligned on ``argmax |f|`` with ``sum |xi| = 1`` and ``Xi`` is
    sign-aligned on ``argmax |Kf|`` with ``sum |Xi| = 1`` over undirected edges.
    """


def _lp_phase1(A: np.ndarray, b: np.ndarray, bounds: list[tuple]) -> tuple[np.ndarray | None, float]:
    """Minimize the total slack of ``A x = b`` subject to ``bounds``.

    Returns ``(x, slack)``; ``x`` is None when there are no rows.
    """
    m, n = A.shape
    if m == 0:
        return np.zeros(n), 0.0
    if n == 0:
        return np.zeros(0), float(np.abs(b).sum())
    A_eq = np.hstack([A, np.eye(m), -np.eye(m)])
    c = np.concatenate([np.zeros(n), np.ones(2 * m)])
    res = linprog(c, A_eq=A_eq, b_eq=b, bounds=list(bounds) + [(0, None)] * (2 * m), method="highs")
    if res.status != 0:  # pragma: no cover - phase 1 is always feasible
        return None, INF
    return res.x[:n], float(res.fun)


def _div_matrix(g: Graph) -> np.ndarray:
    """Dense matrix ``D`` with ``D @ G = div G`` on interior nodes."""
    D = np.zeros((g.n, g.m))
    ti = g._full_to_interior[g.tails]
    hi = g._full_to_interior[g.heads]
    for e, (a, b, w) in enumerate(zip(ti, hi, g.w)):
        if a >= 0:
            D[a, e] += w
        if b >= 0:
            D[b, e] -= w
    return D


def _rayleigh_mismatch(value: float, Lambda: float) -> bool:
    return abs(value - Lambda) > RAYLEIGH_RTOL * max(1.0, abs(value))


def verify_1_eigenpair(g: Graph, f, Lambda: float, tol: float = LP_TOL) -> Certificate1:
    """Certify ``(f, Lambda)`` as a 1-eigenpair or report why not.

    Entries of ``xi`` where ``f != 0`` and of ``Xi`` where ``Kf != 0`` are forced to the
    sign; the rest are free in ``[-1, 1]``.  Feasibility of the node equations
    ``-div Xi = Lambda nu xi`` is decided by a phase-1 LP.
    """
    f = np.asarray(f, dtype=float)
    if not np.any(f):
        raise ValueError("f must be nonzero")
    R = rayleigh_p(g, f, 1)
    if _rayleigh_mismatch(R, Lambda):
        return Certificate1(False, reason="rayleigh-mismatch", Lambda=R)
    scale = np.max(np.abs(f))
    Kf = incidence_apply(g, f / scale)
    fz = np.abs(f) <= 1e-12 * scale
    kz = np.abs(Kf) <= 1e-12 * max(1.0, float(np.max(g.w)))
    xi = np.where(fz, 0.0, np.sign(f))
    Xi = np.where(kz, 0.0, np.sign(Kf))
    D = _div_matrix(g)
    lam_nu = Lambda * g.nu_vec
    # -D Xi - Lambda nu xi = 0, split into fixed and free parts
    rhs = D @ Xi + lam_nu * xi
    free_e = np.flatnonzero(kz)
    free_v = np.flatnonzero(fz)
    A = np.hstack([-D[:, free_e], -np.diag(lam_nu)[:, free_v]])
    x, slack = _lp_phase1(A, rhs, [(-1.0, 1.0)] * A.shape[1])
    if x is None or slack > tol:
        return Certificate1(False, reason="infeasible", residual=slack, Lambda=R)
    Xi[free_e] = x[: free_e.size]
    xi[free_v] = x[free_e.size:]
    resid = float(np.max(np.abs(-divergence_apply(g, Xi) - lam_nu * xi)))
    return Certificate1(True, xi, Xi, resid, "", R)


def _warn_nu(g: Graph):
    if np.any(g.nu_vec != 1.0):
        warnings.warn("inf-mode uses nu = 1 semantics; the graph's node measure is ignored", stacklevel=3)


def verify_inf_eigenpair(g: Graph, f, Lambda: float, tol: float = LP_TOL) -> CertificateInf:
    """Certify ``(f, Lambda)`` as an inf-eigenpair by a phase-1 LP over subgradients of the sup norms."""
    f = np.asarray(f, dtype=float)
    if not np.any(f):
        raise ValueError("f must be nonzero")
    _warn_nu(g)
    R = rayleigh_p(g, f, INF)
    if _rayleigh_mismatch(R, Lambda):
        return CertificateInf(False, reason="rayleigh-mismatch", Lambda=R)
    scale = float(np.max(np.abs(f)))
    fn = f / scale
    Kf = incidence_apply(g, fn)
    kmax = float(np.max(np.abs(Kf))) if g.m else 0.0
    if kmax <= 1e-12:
        # Kf = 0 forces Lambda = 0 and Xi = 0 solves the equation
        return CertificateInf(True, np.zeros(g.n), np.zeros(g.m), 0.0, "", R)
    vmax = np.flatnonzero(np.abs(fn) >= 1 - 1e-12)
    emax = np.flatnonzero(np.abs(Kf) >= kmax * (1 - 1e-12))
    sv = np.sign(fn[vmax])
    se = np.sign(Kf[emax])
    D = _div_matrix(g)
    # unknowns: a (on vmax), b (on emax); equations -D Xi - Lambda xi = 0, sum a = 1, sum b = 1
    A_node = np.hstack([-Lambda * np.eye(g.n)[:, vmax] * sv, -D[:, emax] * se])
    A_norm = np.zeros((2, vmax.size + emax.size))
    A_norm[0, : vmax.size] = 1.0
    A_norm[1, vmax.size:] = 1.0
    A = np.vstack([A_node, A_norm])
    b = np.concatenate([np.zeros(g.n), [1.0, 1.0]])
    x, slack = _lp_phase1(A, b, [(0.0, None)] * A.shape[1])
    if x is None or slack > tol:
        return CertificateInf(False, reason="infeasible", residual=slack, Lambda=R)
    xi = np.zeros(g.n)
    Xi = np.zeros(g.m)
    xi[vmax] = sv * x[: vmax.size]
    Xi[emax] = se * x[vmax.size:]
    resid = float(np.max(np.abs(-divergence_apply(g, Xi) - Lambda * xi)))
    return CertificateInf(True, xi, Xi, resid, "", R)


# ---------------------------------------------------------------------------
# shortest-path witness


@dataclass
class SPWitness:
    path: list[str]
    endpoint_kinds: tuple[str, str]
    Lambda: float
    length: float

    def to_json(self) -> dict:
        return {"path": self.path, "endpoints": list(self.endpoint_kinds),
                "Lambda": self.Lambda, "length": self.length}


def sp_witness(g: Graph, f, tol: float = 1e-12) -> SPWitness | None:
    """Find a shortest path realizing the inf-eigenfunction characterization, if any.

    The path runs along edges where ``Kf`` attains ``+||Kf||_inf`` in the direction
    of travel, from a node in ``{f = -||f||} cup B`` to a node in ``{f = +||f||} cup B``,
    and must be a shortest path between its endpoints.
    """
    f = np.asarray(f, dtype=float)
    M = float(np.max(np.abs(f)))
    if M == 0:
        return None
    F = g.extend(f / M)
    Kf = incidence_apply(g, f / M)
    G = float(np.max(np.abs(Kf))) if g.m else 0.0
    if G <= tol:
        return None
    succ: dict[int, list[int]] = {i: [] for i in range(len(g.node_ids))}
    for a, b, k in zip(g.tails, g.heads, Kf):
        if k >= G * (1 - 1e-12):
            succ[int(a)].append(int(b))
        elif k <= -G * (1 - 1e-12):
            succ[int(b)].append(int(a))
    is_b = np.array([v in g.boundary for v in g.node_ids])
    starts = [i for i in range(len(F)) if is_b[i] or F[i] <= -1 + tol]
    ends = {i for i in range(len(F)) if is_b[i] or F[i] >= 1 - tol}
    for s in starts:
        parent = {s: None}
        queue = [s]
        for u in queue:
            for v in succ[u]:
                if v not in parent:
                    parent[v] = u
                    queue.append(v)
        for t in sorted(ends & parent.keys()):
            if t == s:
                continue
            walk = [t]
            while parent[walk[-1]] is not None:
                walk.append(parent[walk[-1]])
            walk.reverse()
            # every directed path s -> t has length (F[t] - F[s]) / G
            length = sum(1.0 / g.w[g.edge_of(g.node_ids[a], g.node_ids[b])[0]]
                         for a, b in zip(walk, walk[1:]))
            if abs(length - g.dist[s, t]) > 1e-9 * max(1.0, length):
                continue
            lam = (abs(F[s]) + abs(F[t])) / length
            kinds = tuple("boundary" if is_b[i] else "max" for i in (s, t))
            return SPWitness([g.node_ids[i] for i in walk], kinds, float(lam), float(length))
    return None


# ---------------------------------------------------------------------------
# viscosity equations


@dataclass
class ViscosityReport:
    ok: bool
    residuals: dict[str, float] = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "residuals": self.residuals}


def local_gradients(g: Graph, f) -> list[np.ndarray]:
    """For each interior ``u`` the values ``Kf(u, v) = omega_uv (f(v) - f(u))`` over ``v ~ u``."""
    F = g.extend(f)
    out = []
    for u in g.interior:
        fu = F[g.index[u]]
        out.append(np.array([w * (F[g.index[v]] - fu) for v, w in g.neighbors[u]]))
    return out


def verify_viscosity(g: Graph, f, Lambda: float, tol: float = 1e-10) -> ViscosityReport:
    """Check the limiting inf-eigenvalue equations pointwise (``f`` scaled to unit sup norm)."""
    f = np.asarray(f, dtype=float)
    if not np.any(f):
        raise ValueError("f must be nonzero")
    fn = f / np.max(np.abs(f))
    residuals = {}
    for u, grad, fu in zip(g.interior, local_gradients(g, fn), fn):
        if grad.size == 0:
            gnorm = dplus = dminus = 0.0
        else:
            gnorm = float(np.max(np.abs(grad)))
            dplus = float(np.max(np.maximum(grad, 0.0)))
            dminus = float(np.max(np.maximum(-grad, 0.0)))
        lap = dminus - dplus
        if fu > 1e-12:
            r = min(gnorm - Lambda * fu, lap)
        elif fu < -1e-12:
            r = max(-gnorm - Lambda * fu, lap)
        else:
            r = lap
        residuals[u] = abs(r)
    return ViscosityReport(max(residuals.values()) <= tol, residuals)


# ---------------------------------------------------------------------------
# constructions


def _cone(g: Graph, w: str, Lambda: float) -> np.ndarray:
    d = g.dist[g.index[w]][g._interior_mask]
    return np.maximum(1.0 - Lambda * d, 0.0)


def cone_eigenfunction(g: Graph, centers) -> Eigenpair:
    """Cone ``max(1 - Lambda d(., u), 0)`` or difference of two cones.

    A single center ``u`` gives ``Lambda = 1/d_B(u)``; a pair gives ``Lambda = 2/d(v1, v2)``.
    """
    if isinstance(centers, (str, int)):
        centers = (centers,)
    centers = [str(c) for c in centers]
    for c in centers:
        if c not in g.interior_index:
            raise ValueError(f"center {c} is not an interior node")
    if len(centers) == 1:
        (u,) = centers
        dB = g.boundary_dist[g.interior_index[u]]
        if not math.isfinite(dB):
            raise ValueError("a single cone needs a reachable boundary")
        lam = 1.0 / dB
        f = _cone(g, u, lam)
    elif len(centers) == 2:
        v1, v2 = centers
        d = g.dist[g.index[v1], g.index[v2]]
        if not (0 < d < INF):
            raise ValueError("pair centers must be distinct and connected")
        slack = min(g.boundary_dist[g.interior_index[v1]], g.boundary_dist[g.interior_index[v2]])
        if d / 2 > slack * (1 + 1e-12):
            raise ValueError(f"pair distance {d} exceeds twice the boundary distance {slack}")
        lam = 2.0 / d
        f = _cone(g, v1, lam) - _cone(g, v2, lam)
    else:
        raise ValueError("centers must be one node or a pair")
    return Eigenpair(f, lam, INF, Kind.CONSTRUCTED, info={"centers": centers})


def _check_span_conditions(g: Graph, pairs, singles, Lambda):
    r = 1.0 / Lambda
    flat = [str(v) for pr in pairs for v in pr] + [str(u) for u in singles]
    if len(set(flat)) != len(flat):
        raise ValueError("centers must be distinct")
    for a, b in itertools.combinations(flat, 2):
        if g.dist[g.index[a], g.index[b]] < 2 * r * (1 - 1e-12):
            raise ValueError(f"d({a},{b}) < 2/Lambda")
    for a, b in pairs:
        if abs(g.dist[g.index[str(a)], g.index[str(b)]] - 2 * r) > 1e-12 * max(1.0, r):
            raise ValueError(f"d({a},{b}) != 2/Lambda")
    for v in [str(v) for pr in pairs for v in pr]:
        if g.boundary_dist[g.interior_index[v]] < r * (1 - 1e-12):
            raise ValueError(f"d_B({v}) < 1/Lambda")
    for u in singles:
        if abs(g.boundary_dist[g.interior_index[str(u)]] - r) > 1e-12 * max(1.0, r):
            raise ValueError(f"d_B({u}) != 1/Lambda")


def inf_eigenspace_span(g: Graph, pairs: Sequence, singles: Sequence, Lambda: float,
                        samples: int = 20, seed: int = 0) -> list[Eigenpair]:
    """Random members of the span of cone differences and boundary cones for ``Lambda``.

    Every returned sample has been certified by :func:`verify_inf_eigenpair`.
    """
    _check_span_conditions(g, pairs, singles, Lambda)
    basis = [_cone(g, str(a), Lambda) - _cone(g, str(b), Lambda) for a, b in pairs]
    basis += [_cone(g, str(u), Lambda) for u in singles]
    if not basis:
        raise ValueError("need at least one pair or single")
    B = np.array(basis)
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < samples:
        t = rng.uniform(-1, 1, size=len(basis))
        if np.max(np.abs(t)) < 1e-3:
            continue
        f = t @ B
        cert = verify_inf_eigenpair(g, f, Lambda)
        if not cert:
            raise RuntimeError(f"span sample failed certification ({cert.reason})")
        out.append(Eigenpair(f, Lambda, INF, Kind.GENERALIZED, info={"coefficients": t.tolist()}))
    return out


def one_lap_nodal_generators(g: Graph, f, Lambda: float, t: float,
                             alphas: Sequence[float], betas: Sequence[float]) -> np.ndarray:
    """Convex recombination of normalized indicators of the strong nodal domains of ``f``.

    ``alphas`` weight the positive domains and ``betas`` the negative ones, both in node order.
    """
    from .nodal import strong_domains

    if not verify_1_eigenpair(g, f, Lambda):
        raise ValueError("(f, Lambda) is not a certified 1-eigenpair")
    alphas = np.asarray(alphas, dtype=float)
    betas = np.asarray(betas, dtype=float)
    if not 0 <= t <= 1 or np.any(alphas < 0) or np.any(betas < 0):
        raise ValueError("t must lie in [0, 1] and coefficients must be nonnegative")
    pos, neg = strong_domains(g, f)
    if t > 0:
        if not pos:
            raise ValueError("f has no positive strong nodal domain")
        if alphas.size != len(pos) or abs(alphas.sum() - 1) > 1e-12:
            raise ValueError(f"alphas must have {len(pos)} entries summing to 1")
    if t < 1:
        if not neg:
            raise ValueError("f has no negative strong nodal domain")
        if betas.size != len(neg) or abs(betas.sum() - 1) > 1e-12:
            raise ValueError(f"betas must have {len(neg)} entries summing to 1")
    out = np.zeros(g.n)

    def chi(A):
        x = g.indicator(A)
        return x / float(np.dot(g.nu_vec, x))

    if t > 0:
        for a, A in zip(alphas, pos):
            out += t * a * chi(A)
    if t < 1:
        for b, A in zip(betas, neg):
            out -= (1 - t) * b * chi(A)
    return out


def _require_unweighted_boundaryless(g: Graph):
    if not g.is_unweighted:
        raise ValueError("graph must be unweighted (omega = 1, nu = 1)")
    if g.boundary:
        raise ValueError("graph must have empty boundary")


def sp_l_check(g: Graph, f, l: int, tol: float = 1e-12) -> bool:
    """Whether ``f`` satisfies the ``SP_l`` condition on an unweighted graph without boundary."""
    _require_unweighted_boundaryless(g)
    if int(l) != l or l < 1:
        raise ValueError("l must be a positive integer")
    l = int(l)
    diam = g.diameter()
    if l > diam:
        raise ValueError(f"l = {l} exceeds the diameter {diam:g}")
    f = np.asarray(f, dtype=float)
    M = float(np.max(np.abs(f)))
    if M == 0:
        return False
    fn = f / M
    Kf = incidence_apply(g, fn)
    if Kf.size and np.max(np.abs(Kf)) > 2.0 / l + tol:
        return False
    idx = g.interior_index
    nbrs = {u: [idx[v] for v, _ in g.neighbors[u]] for u in g.interior}

    def extend(path):
        i = len(path) - 1
        if i == l:
            return g.dist_interior[path[0], path[-1]] >= l - tol
        target = 1.0 - 2.0 * (i + 1) / l
        for v in nbrs[g.interior[path[-1]]]:
            if v not in path and abs(fn[v] - target) <= tol and extend(path + [v]):
                return True
        return False

    return any(extend([s]) for s in np.flatnonzero(fn >= 1 - tol))


def perfect_nodal_constructor(g: Graph, l: int) -> Eigenpair:
    """An inf-eigenfunction for ``Lambda = 2/l`` with many perfect nodal domains.

    Cones of radius ``l/2`` are placed on a maximum ``l``-independent set containing a
    pair at distance exactly ``l``.  For even ``l`` the supports are pairwise
    non-adjacent and any signs work; for odd ``l`` touching cones are signed by a
    2-coloring of a spanning forest of their contact graph, so only cycles of that graph
    can merge domains.
    """
    from .geometry import maximum_independent_sets
    from .nodal import nodal_domains

    _require_unweighted_boundaryless(g)
    if int(l) != l or l < 1:
        raise ValueError("l must be a positive integer")
    l = int(l)
    if l > g.diameter():
        raise ValueError("l exceeds the diameter")
    D = g.dist_interior
    chosen = pair = None
    for S in maximum_independent_sets(g, l):
        for a, b in itertools.combinations(S, 2):
            if abs(D[a, b] - l) < 1e-12:
                chosen, pair = S, (a, b)
                break
        if chosen is not None:
            break
    if chosen is None:
        raise ValueError(f"no maximum {l}-independent set contains a pair at distance exactly {l}")
    lam = 2.0 / l
    v1, v2 = pair
    # contact graph: cones touch when centers are exactly l apart
    contact = {s: [t for t in chosen if t != s and abs(D[s, t] - l) < 1e-12] for s in chosen}
    sign = {v1: 1.0, v2: -1.0}
    roots = [v1] + [s for s in chosen if s != v1]
    for root in roots:
        if root in sign and root != v1:
            continue
        sign.setdefault(root, 1.0)
        queue = [root] if root != v1 else [v1, v2]
        for s in queue:
            for t in contact[s]:
                if t not in sign:
                    sign[t] = -sign[s]
                    queue.append(t)
    f = np.zeros(g.n)
    for s in chosen:
        f += sign[s] * _cone(g, g.interior[s], lam)
    report = nodal_domains(g, f)
    n_comp = len(g.components)
    beta_loops = g.m - len(g.node_ids) + n_comp
    info = {"centers": [g.interior[s] for s in chosen], "pair": [g.interior[v1], g.interior[v2]],
            "alpha": len(chosen), "PN": report.PN, "beta_loops": beta_loops}
    return Eigenpair(f, lam, INF, Kind.CONSTRUCTED, info=info)
