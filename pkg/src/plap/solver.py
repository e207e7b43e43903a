"""Eigenpair computation for 1 < p < inf.

The workhorse is a projected gradient flow for ``R_p^p`` on the unit ``(nu, p)``-sphere
with Armijo backtracking.  Limits are polished by a Levenberg-Marquardt solve of the
eigen-equation itself.  The same solve started from random or recombined points
("root mode") reaches saddle points that neither descent nor ascent can.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .graph_core import Graph
from .plap_core import (
    Eigenpair,
    Kind,
    eigen_residual,
    node_norm,
    p_laplacian_apply,
    phi,
    rayleigh_gradient,
    rayleigh_p,
)

__all__ = [
    "FlowConfig",
    "SpectrumEstimate",
    "NonConvergence",
    "ground_state",
    "critical_point_flow",
    "estimate_spectrum",
    "p_scan",
    "complete_graph_spectrum",
]

CERT_TOL = 1e-8


class NonConvergence(RuntimeError):
    """The flow or the polish did not reach the requested residual."""


@dataclass(frozen=True)
class FlowConfig:
    tol: float = 1e-10
    max_iters: int = 50000
    restarts: int = 64
    seed: int = 0
    step0: float = 1.0
    shrink: float = 0.5
    armijo: float = 1e-4
    dedup_tol: float = 1e-6
    threads: int = 1
    # try the polish once |grad| <= polish_below * max(1, R_p^p)
    polish_below: float = 1e-2

    def __post_init__(self):
        if self.tol <= 0 or self.restarts < 1 or self.max_iters < 1:
            raise ValueError("tol must be positive; restarts and max_iters at least 1")


@dataclass
class SpectrumEstimate:
    """Deduplicated critical values with one witness each (no completeness claim)."""

    critical_values: list[float]
    witnesses: list[Eigenpair]
    dedup_tol: float = 1e-6

    def to_json(self, g: Graph) -> dict:
        return {"critical_values": self.critical_values,
                "witnesses": [w.to_json(g) for w in self.witnesses],
                "dedup_tol": self.dedup_tol}


# ---------------------------------------------------------------------------
# single trajectories


def _normalize(g: Graph, f, p: float) -> np.ndarray:
    return f / node_norm(g, f, p)


def _energy(g: Graph, f, p: float) -> float:
    return rayleigh_p(g, f, p) ** p


def _finish(g: Graph, p: float, f, kind=Kind.CLASSICAL, **info) -> Eigenpair:
    f = _normalize(g, f, p)
    i = int(np.argmax(np.abs(f)))
    f = f * np.sign(f[i])
    lam = _energy(g, f, p)
    return Eigenpair(f, lam, p, kind, eigen_residual(g, f, lam, p), info=dict(info))


def _lm(g: Graph, p: float, x0, P: np.ndarray | None, max_nfev: int) -> np.ndarray:
    """Least-squares solve of the eigen-equation, optionally over ``f = P y``."""
    nu = g.nu_vec

    def F(y):
        x = y if P is None else P @ y
        if not np.any(x):
            return np.concatenate([np.ones(g.n), [1.0]])
        lam = _energy(g, x, p)
        return np.concatenate([p_laplacian_apply(g, x, p) - lam * nu * phi(x, p),
                               [float(np.sum(nu * np.abs(x) ** p)) - 1.0]])

    y0 = x0 if P is None else np.linalg.lstsq(P, x0, rcond=None)[0]
    res = least_squares(F, y0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                        max_nfev=max_nfev * (y0.size + 1))
    return res.x if P is None else P @ res.x


def _tie_basis(f: np.ndarray, tol: float) -> np.ndarray | None:
    """Basis tying together entries of ``f`` closer than ``tol * max|f|`` and pinning near-zeros to 0."""
    M = float(np.max(np.abs(f)))
    order = np.argsort(f)
    groups, cur = [], [order[0]]
    for a, b in zip(order, order[1:]):
        if f[b] - f[a] <= tol * M:
            cur.append(b)
        else:
            groups.append(cur)
            cur = [b]
    groups.append(cur)
    cols = []
    for grp in groups:
        if np.max(np.abs(f[grp])) <= tol * M:
            continue
        c = np.zeros(f.size)
        c[grp] = 1.0
        cols.append(c)
    if not cols or len(cols) == f.size:
        return None
    return np.array(cols).T


def _polish(g: Graph, p: float, f, max_nfev: int = 400) -> np.ndarray:
    """Solve ``Delta_p f = R_p^p(f) nu phi(f)`` with ``||f||_{nu,p} = 1`` by least squares.

    For ``p < 2`` the equation is not Lipschitz where ``f`` or ``Kf`` vanishes, and
    Levenberg-Marquardt stalls next to such points.  There the near-ties of the first
    solve are made exact (equal entries merged, tiny entries set to 0) and the reduced
    system is solved again, at a few increasing tie tolerances.  For ``p >= 2`` only
    the tightest tolerances are tried: the node residual is already fine there, but
    entries of size 1e-10 that should be 0 spoil the dual edge pair.
    """
    x = _lm(g, p, _normalize(g, f, p), None, max_nfev)
    if not np.any(x):
        return x
    best, best_res = x, eigen_residual(g, x, _energy(g, x, p), p)
    tols, target = ((1e-8, 1e-6), 1e-14) if p >= 2 else ((1e-8, 1e-6, 1e-4, 1e-3, 1e-2), CERT_TOL / 10)
    for tol in tols:
        if best_res <= target:
            break
        P = _tie_basis(x, tol)
        if P is None:
            continue
        y = _lm(g, p, x, P, max_nfev // 4)
        if not np.any(y):
            continue
        r = eigen_residual(g, y, _energy(g, y, p), p)
        if r < best_res:
            best, best_res = y, r
    return best


def critical_point_flow(g: Graph, p: float, init, cfg: FlowConfig = FlowConfig(), *,
                        ascent: bool = False, polish: bool = True) -> Eigenpair:
    """Projected gradient descent (or ascent) of ``R_p^p`` on the sphere, then polish.

    ``R_p^p`` is 0-homogeneous, so its gradient is already tangent to the sphere; each
    step moves along it and renormalizes.  The first trial step is ``cfg.step0`` and
    later ones start from twice the last accepted step, so flat regions (large ``p``
    near a minimum) are crossed quickly.  Accepted descent steps never increase
    ``R_p`` (asserted).
    """
    if not 1 < p < math.inf:
        raise ValueError("the flow needs 1 < p < inf")
    f = np.asarray(init, dtype=float)
    if not np.any(f):
        raise ValueError("init must be nonzero")
    f = _normalize(g, f, p)
    E = _energy(g, f, p)
    if eigen_residual(g, f, E, p) <= cfg.tol:
        return _finish(g, p, f, iterations=0)
    sgn = 1.0 if ascent else -1.0
    step = cfg.step0
    it = 0
    nonsmooth = False
    attempts = 3  # polish tries during the flow, at gradients shrinking tenfold each time
    threshold = cfg.polish_below
    for it in range(1, cfg.max_iters + 1):
        grad, smooth = rayleigh_gradient(g, f, p)
        nonsmooth |= not smooth
        gn2 = float(grad @ grad)
        gnorm = math.sqrt(gn2)
        if gnorm <= cfg.tol or eigen_residual(g, f, E, p) <= cfg.tol:
            break
        if polish and attempts and gnorm <= threshold * max(1.0, E):
            cand = _finish(g, p, _polish(g, p, f, max_nfev=50), iterations=it,
                           mode="ascent" if ascent else "descent", nonsmooth=nonsmooth)
            if cand.residual <= CERT_TOL:
                return cand
            attempts -= 1
            threshold *= 0.1
        step = cfg.step0 if it == 1 else 2 * step
        while True:
            trial = f + sgn * step * grad
            if np.any(trial):
                trial = _normalize(g, trial, p)
                Et = _energy(g, trial, p)
                if sgn * (Et - E) >= cfg.armijo * step * gn2:
                    break
            step *= cfg.shrink
            if step < 1e-18:
                break
        if step < 1e-18:
            break  # stalled; leave it to the polish
        assert ascent or Et <= E, "descent step increased the Rayleigh quotient"
        f, E = trial, Et
    if polish and eigen_residual(g, f, E, p) > cfg.tol:
        f = _polish(g, p, f)
    e = _finish(g, p, f, iterations=it, mode="ascent" if ascent else "descent", nonsmooth=nonsmooth)
    if e.residual > CERT_TOL:
        raise NonConvergence(f"flow ended with residual {e.residual:.3g} after {it} iterations")
    return e


def _root_solve(g: Graph, p: float, init) -> Eigenpair:
    e = _finish(g, p, _polish(g, p, init), mode="root")
    if e.residual > CERT_TOL:
        raise NonConvergence(f"root solve ended with residual {e.residual:.3g}")
    return e


def _constant_pair(g: Graph, p: float) -> Eigenpair | None:
    """Constant function with eigenvalue 0 when ``B`` is empty and ``g`` is connected."""
    if g.boundary or not g.is_connected():
        return None
    f = np.ones(g.n)
    return _finish(g, p, f, mode="kernel")


def ground_state(g: Graph, p: float, cfg: FlowConfig = FlowConfig()) -> Eigenpair:
    """First eigenpair: constant with ``lambda = 0`` if ``B`` is empty, else the positive minimizer."""
    if not g.is_connected():
        raise ValueError("ground_state needs a connected graph")
    if not g.boundary:
        return _constant_pair(g, p)
    e = critical_point_flow(g, p, np.ones(g.n), cfg)
    f = np.abs(e.f)
    e = _finish(g, p, _polish(g, p, f), mode="ground")
    if e.residual > CERT_TOL or np.any(e.f <= 0):
        raise NonConvergence("ground state polish lost positivity or accuracy")
    return e


# ---------------------------------------------------------------------------
# spectrum estimates


def _random_sphere(g: Graph, p: float, rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal(g.n)
    return _normalize(g, x, p)


def _try(fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except (NonConvergence, ValueError, FloatingPointError):
        return None


def _dedup(pairs: Sequence[Eigenpair], rtol: float) -> SpectrumEstimate:
    pairs = sorted((e for e in pairs if e is not None), key=lambda e: (e.lam, e.residual))
    values: list[float] = []
    wits: list[Eigenpair] = []
    for e in pairs:
        if values and abs(e.lam - values[-1]) <= rtol * max(1.0, abs(values[-1])):
            if e.residual < wits[-1].residual:
                wits[-1] = e
            continue
        values.append(e.lam)
        wits.append(e)
    return SpectrumEstimate([float(v) for v in values], wits, rtol)


def _run_all(tasks, threads: int):
    if threads <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: t(), tasks))


def estimate_spectrum(g: Graph, p: float, cfg: FlowConfig = FlowConfig(), *,
                      extra_inits: Sequence[np.ndarray] = ()) -> SpectrumEstimate:
    """Union of critical values reached from ``cfg.restarts`` random starts.

    Restart ``i`` uses the RNG stream ``(seed, i)`` and cycles through descent, ascent
    and root mode.  A second round starts root solves from sign-perturbed sums and
    differences of the witnesses found so far, which is how most saddles are reached.
    The result is an under-approximation of the spectrum.
    """
    if not 1 < p < math.inf:
        raise ValueError("estimate_spectrum needs 1 < p < inf")

    def restart(i: int):
        rng = np.random.default_rng([cfg.seed, i])
        x = _random_sphere(g, p, rng)
        mode = i % 3
        if mode == 0:
            return _try(critical_point_flow, g, p, x, cfg)
        if mode == 1:
            return _try(critical_point_flow, g, p, x, cfg, ascent=True)
        return _try(_root_solve, g, p, x)

    tasks = [lambda i=i: restart(i) for i in range(cfg.restarts)]
    tasks += [lambda x=x: _try(_root_solve, g, p, x) for x in extra_inits]
    found = _run_all(tasks, cfg.threads)
    found.append(_constant_pair(g, p))
    first = _dedup(found, cfg.dedup_tol)

    # saddle round: recombine witnesses
    rng = np.random.default_rng([cfg.seed, cfg.restarts, 1])
    inits = []
    W = [w.f for w in first.witnesses]
    for a, b in itertools.combinations(range(len(W)), 2):
        for s in (1.0, -1.0):
            inits.append(W[a] + s * W[b])
    for w in W:
        flips = np.where(rng.random((3, g.n)) < 0.3, -1.0, 1.0)
        inits.extend(w * fl for fl in flips)
    inits = [x for x in inits if np.any(np.abs(x) > 1e-9)][: 4 * cfg.restarts]
    perturb = [x + 1e-3 * rng.standard_normal(g.n) for x in inits]
    second = _run_all([lambda x=x: _try(_root_solve, g, p, x) for x in perturb], cfg.threads)
    return _dedup(list(first.witnesses) + second, cfg.dedup_tol)


# ---------------------------------------------------------------------------
# continuation in p


@dataclass
class ScanRow:
    p: float
    values: list[float]
    tracked: float
    edge_normalized: float
    measure_normalized: float


def linear_pairs(g: Graph) -> tuple[list[float], np.ndarray]:
    """p = 2 eigenvalues with multiplicity and their eigenvectors."""
    import scipy.linalg

    from .plap_core import _stiffness

    L = _stiffness(g, np.ones(g.m))
    vals, vecs = scipy.linalg.eigh(L, np.diag(g.nu_vec))
    return vals.tolist(), vecs.T


def p_scan(g: Graph, p_grid: Sequence[float], k_track: int, cfg: FlowConfig = FlowConfig(),
           random_inits: int = 12) -> list[ScanRow]:
    """Track the ``k``-th eigenvalue over ``p_grid`` and emit both normalized sequences.

    At ``p = 2`` the tracked value is the ``k``-th linear eigenvalue counted with
    multiplicity, which is exactly the variational one.  Elsewhere it is the ``k``-th
    smallest distinct value found by root solves warm-started from the neighbouring
    grid point's witnesses, the linear eigenvectors and a few random points.
    The sequences are ``(|E|/2)^{-1/p} lambda^{1/p}`` (``|E|/2`` undirected edges) and
    ``|nu|^{1/p} lambda^{1/p}``.
    """
    grid = [float(p) for p in p_grid]
    if any(p <= 1 or math.isinf(p) for p in grid) or grid != sorted(grid):
        raise ValueError("p_grid must be increasing with 1 < p < inf")
    lin_vals, lin_vecs = linear_pairs(g)
    if not 1 <= k_track <= g.n:
        raise ValueError(f"k_track must lie in 1..{g.n}")
    start = min(range(len(grid)), key=lambda i: abs(grid[i] - 2.0))
    order = list(range(start, len(grid))) + list(range(start - 1, -1, -1))
    spectra: dict[int, SpectrumEstimate] = {}
    for j, i in enumerate(order):
        p = grid[i]
        prev = i - 1 if i > start else i + 1
        warm = [w.f for w in spectra[prev].witnesses] if prev in spectra else []
        rng = np.random.default_rng([cfg.seed, i, 7])
        inits = warm + list(lin_vecs) + [rng.standard_normal(g.n) for _ in range(random_inits)]
        found = _run_all([lambda x=x: _try(_root_solve, g, p, x) for x in inits], cfg.threads)
        found.append(_try(ground_state, g, p, cfg) if g.is_connected() else None)
        spectra[i] = _dedup(found, cfg.dedup_tol)
    m_half = g.m
    nu_tot = float(g.nu_vec.sum())
    rows = []
    for i, p in enumerate(grid):
        vals = spectra[i].critical_values
        if abs(p - 2.0) < 1e-12:
            lam = lin_vals[k_track - 1]
        else:
            lam = vals[k_track - 1] if len(vals) >= k_track else math.nan
        root = max(lam, 0.0) ** (1 / p) if not math.isnan(lam) else math.nan
        rows.append(ScanRow(p, vals, lam, m_half ** (-1 / p) * root, nu_tot ** (1 / p) * root))
    return rows


# ---------------------------------------------------------------------------
# complete graphs


def complete_graph_spectrum(N: int, p: float) -> list[tuple[float, int, int, np.ndarray]]:
    """All eigenvalues of the unweighted complete graph ``K_N`` with witnesses.

    Each unordered pair ``alpha <= beta`` with ``alpha + beta <= N`` contributes
    ``N - alpha - beta + (alpha^{1/(p-1)} + beta^{1/(p-1)})^{p-1}`` witnessed by
    ``a 1_A - b 1_B`` with ``|A| = alpha``, ``|B| = beta``, ``a = beta^{1/(p-1)}``,
    ``b = alpha^{1/(p-1)}``.  Zero is added with a constant witness.  Entries are sorted
    by value; ties between different ``(alpha, beta)`` are kept.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    if not 1 < p < math.inf:
        raise ValueError("needs 1 < p < inf")
    q1 = 1.0 / (p - 1)
    out = [(0.0, 0, 0, np.ones(N))]
    for alpha in range(1, N):
        for beta in range(alpha, N - alpha + 1):
            lam = N - alpha - beta + (alpha ** q1 + beta ** q1) ** (p - 1)
            f = np.zeros(N)
            f[:alpha] = beta ** q1
            f[alpha:alpha + beta] = -(alpha ** q1)
            out.append((float(lam), alpha, beta, f))
    out.sort(key=lambda t: (t[0], t[1], t[2]))
    return out
