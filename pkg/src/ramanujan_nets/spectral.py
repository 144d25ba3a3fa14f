"""Adjacency spectra, Ramanujan verdicts, girth and expansion bounds."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Optional

import numba
import numpy as np
import scipy.sparse as sp

DENSE_CAP = 4000
RAMANUJAN_TOL = 1e-6
INFINITE_GIRTH = -1


class DenseCapExceeded(ValueError):
    pass


def adjacency_matrix(adj: np.ndarray, n: Optional[int] = None) -> sp.csr_matrix:
    """Sparse symmetric adjacency with multiplicities from an (n, r) neighbor array."""
    n = adj.shape[0] if n is None else n
    r = adj.shape[1]
    rows = np.repeat(np.arange(n), r)
    data = np.ones(n * r)
    return sp.csr_matrix((data, (rows, adj.ravel())), shape=(n, n))


@numba.njit(cache=True)
def _one_sided_jacobi(b, target, max_sweeps):
    """Orthogonalize the rows of the positive definite symmetric b in place.

    Each rotation acts on two rows only. gamma / (d_p + d_q) estimates the
    (p, q) entry of the implicitly rotated two-sided matrix, so off tracks
    its off-diagonal Frobenius norm.
    """
    n = b.shape[0]
    norms = np.empty(n)
    off = 0.0
    sweeps = 0
    for sweep in range(max_sweeps):
        for i in range(n):
            acc = 0.0
            for k in range(n):
                acc += b[i, k] * b[i, k]
            norms[i] = acc
        off2 = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = 0.0
                for k in range(n):
                    g += b[p, k] * b[q, k]
                if g == 0.0:
                    continue
                al = norms[p]
                be = norms[q]
                e = g / (math.sqrt(al) + math.sqrt(be))
                off2 += e * e
                if abs(g) <= 1e-17 * math.sqrt(al * be):
                    continue
                zeta = (be - al) / (2.0 * g)
                t = 1.0 / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                if zeta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                for k in range(n):
                    x = b[p, k]
                    y = b[q, k]
                    b[p, k] = c * x - s * y
                    b[q, k] = s * x + c * y
                norms[p] = al - t * g
                norms[q] = be + t * g
        sweeps += 1
        off = math.sqrt(2.0 * off2)
        if off <= target:
            break
    for i in range(n):
        acc = 0.0
        for k in range(n):
            acc += b[i, k] * b[i, k]
        norms[i] = acc
    return np.sqrt(norms), off, sweeps


@dataclass
class DenseSpectrum:
    eigenvalues: np.ndarray  # descending
    off_norm: float
    sweeps: int


def jacobi_eigenvalues(a: np.ndarray, tol: float = 1e-10, max_sweeps: int = 60) -> DenseSpectrum:
    """All eigenvalues of a real symmetric matrix by Jacobi rotations.

    The one-sided (Hestenes) variant runs on a + sigma*I with sigma one more
    than the Gershgorin bound, so the converged row norms are the eigenvalues
    shifted by sigma. Stops once the off-diagonal norm of the implicitly
    diagonalized matrix falls below tol * ||a||_F; off_norm is the value
    measured on the last sweep.
    """
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    if n == 0:
        return DenseSpectrum(np.zeros(0), 0.0, 0)
    if not np.allclose(a, a.T):
        raise ValueError("matrix is not symmetric")
    sigma = float(np.abs(a).sum(axis=1).max()) + 1.0
    work = a + sigma * np.eye(n)
    target = tol * float(np.linalg.norm(a))
    norms, off, sweeps = _one_sided_jacobi(work, target, max_sweeps)
    return DenseSpectrum(np.sort(norms - sigma)[::-1], off, sweeps)


def spectrum_dense(graph, color, cap: int = DENSE_CAP) -> DenseSpectrum:
    adj = graph.adjacency(color)
    n = adj.shape[0]
    if n > cap:
        raise DenseCapExceeded(f"{n} vertices exceeds the dense cap {cap}; use spectrum_extremes")
    return jacobi_eigenvalues(adjacency_matrix(adj).toarray())


@dataclass
class ExtremesResult:
    top: np.ndarray
    bottom: np.ndarray
    top_residuals: np.ndarray
    bottom_residuals: np.ndarray
    converged: bool
    matvecs: int

    @property
    def max_residual(self) -> float:
        return float(max(self.top_residuals.max(initial=0.0), self.bottom_residuals.max(initial=0.0)))


def _orthonormalize_against(v: np.ndarray, basis: np.ndarray) -> np.ndarray:
    for _ in range(2):
        if basis.shape[1]:
            v = v - basis @ (basis.T @ v)
    return v


def lanczos_extremes(
    op,
    n: int,
    k: int = 3,
    deflate: Optional[np.ndarray] = None,
    tol: float = 1e-9,
    subspace: int = 120,
    max_restarts: int = 200,
    seed: int = 0,
) -> ExtremesResult:
    """Largest and smallest k eigenpairs of a symmetric operator.

    Thick-restart Lanczos with full reorthogonalization; the columns of
    `deflate` (orthonormal) are projected out of every Krylov vector.
    """
    rng = np.random.default_rng(seed)
    D = np.zeros((n, 0)) if deflate is None else np.asarray(deflate, dtype=np.float64)
    m = min(subspace, n - D.shape[1])
    k = min(k, max(1, m // 4))
    V = np.zeros((n, m + 1))
    W = np.zeros((n, m + 1))
    v = _orthonormalize_against(rng.standard_normal(n), D)
    V[:, 0] = v / np.linalg.norm(v)
    kept = 0
    matvecs = 0
    theta = top_idx = bot_idx = res = None
    for _restart in range(max_restarts):
        for j in range(kept, m):
            W[:, j] = op(V[:, j])
            matvecs += 1
            w = W[:, j].copy()
            w = _orthonormalize_against(w, np.hstack([D, V[:, : j + 1]]))
            beta = np.linalg.norm(w)
            if beta < 1e-12:
                w = _orthonormalize_against(rng.standard_normal(n), np.hstack([D, V[:, : j + 1]]))
                beta = np.linalg.norm(w)
            V[:, j + 1] = w / beta
        H = V[:, :m].T @ W[:, :m]
        H = (H + H.T) / 2
        theta, Y = np.linalg.eigh(H)
        X = V[:, :m] @ Y
        AX = W[:, :m] @ Y
        R = AX - X * theta
        res = np.linalg.norm(R, axis=0)
        top_idx = np.arange(m - 1, m - 1 - k, -1)
        bot_idx = np.arange(k)
        want = np.concatenate([bot_idx, top_idx])
        if np.all(res[want] <= tol):
            break
        # keep a margin of Ritz vectors beyond the wanted ones
        keep = np.unique(np.concatenate([np.arange(min(2 * k, m // 3)), np.arange(m - min(2 * k, m // 3), m)]))
        kept = len(keep)
        last = V[:, m].copy()
        V[:, :kept] = X[:, keep]
        W[:, :kept] = AX[:, keep]
        # the Krylov continuation vector is orthogonal to every kept Ritz vector
        nxt = _orthonormalize_against(last, np.hstack([D, V[:, :kept]]))
        nrm = np.linalg.norm(nxt)
        if nrm < 1e-12:
            nxt = _orthonormalize_against(rng.standard_normal(n), np.hstack([D, V[:, :kept]]))
            nrm = np.linalg.norm(nxt)
        V[:, kept] = nxt / nrm
    converged = bool(np.all(res[np.concatenate([bot_idx, top_idx])] <= tol))
    return ExtremesResult(theta[top_idx], theta[bot_idx], res[top_idx], res[bot_idx], converged, matvecs)


def trivial_vectors(n: int, bipartition: Optional[np.ndarray] = None) -> np.ndarray:
    """Orthonormal eigenvectors for r (constant) and, if bipartite, -r (signed)."""
    cols = [np.full(n, 1 / math.sqrt(n))]
    if bipartition is not None:
        s = np.where(bipartition == 0, 1.0, -1.0)
        cols.append(s / math.sqrt(n))
    return np.stack(cols, axis=1)


def spectrum_extremes(graph, color, k: int = 3, deflate_trivial: bool = False, bipartition=None, tol_scale: float = 1e-9, seed: int = 0) -> ExtremesResult:
    """Extremal eigenvalues of one color's adjacency by Krylov iteration.

    With deflate_trivial the constant vector (and the bipartition sign vector
    when given) are removed, so the results are the nontrivial extremes.
    """
    adj = graph.adjacency(color)
    A = adjacency_matrix(adj)
    n = A.shape[0]
    r = adj.shape[1]
    D = trivial_vectors(n, bipartition) if deflate_trivial else None
    return lanczos_extremes(lambda x: A @ x, n, k=k, deflate=D, tol=tol_scale * r, seed=seed)


def ramanujan_verdict(evs, r: int, bipartite: bool, tol: float = RAMANUJAN_TOL) -> bool:
    """All eigenvalues other than r (and -r if bipartite) satisfy |l| <= 2 sqrt(r-1) + tol.

    One copy of each trivial eigenvalue is discarded.
    """
    vals = sorted((float(x) for x in evs), reverse=True)
    bound = 2 * math.sqrt(r - 1) + tol
    vals = _drop_one(vals, r, tol)
    if bipartite:
        vals = _drop_one(vals, -r, tol)
    return all(abs(v) <= bound for v in vals)


def _drop_one(vals: list, target: float, tol: float) -> list:
    for i, v in enumerate(vals):
        if abs(v - target) <= max(tol, 1e-8):
            return vals[:i] + vals[i + 1:]
    return vals


def girth_and_diameter(graph, color, sources=None) -> tuple[int, int, bool]:
    """(girth, diameter, exact) of one color class.

    girth uses BFS from every root with the parent edge excluded once, so a
    doubled edge is a 2-cycle and a loop a 1-cycle. INFINITE_GIRTH marks a
    forest. The diameter is exact up to EXACT_DIAMETER_CAP vertices, else a
    lower bound from a deterministic sample.
    """
    from .cayley import DIAMETER_SAMPLE, EXACT_DIAMETER_CAP, bfs_levels

    adj = graph.adjacency(color)
    n = adj.shape[0]
    exact = n <= EXACT_DIAMETER_CAP
    if sources is None:
        if exact:
            sources = range(n)
        else:
            rng = np.random.default_rng(0)
            sources = np.sort(rng.choice(n, size=min(DIAMETER_SAMPLE, n), replace=False)).tolist()
    nbrs = adj.tolist()
    best = math.inf
    diameter = 0
    for root in sources:
        if any(w == root for w in nbrs[root]):
            best = 1
        dist = {root: 0}
        parent = {root: -1}
        q = deque([root])
        while q:
            u = q.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            skipped = False
            for w in nbrs[u]:
                if w == parent[u] and not skipped:
                    skipped = True
                    continue
                if w in dist:
                    best = min(best, dist[u] + dist[w] + 1)
                else:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    q.append(w)
        levels = bfs_levels(adj, root)
        diameter = max(diameter, int(levels.max()))
    girth = INFINITE_GIRTH if best is math.inf else int(best)
    return girth, diameter, exact


def edge_expansion_exact(adj: np.ndarray) -> float:
    """min |E(S, S^c)| / |S| over nonempty S with |S| <= n/2 (n <= 24)."""
    n = adj.shape[0]
    if n > 24:
        raise ValueError("exhaustive cut enumeration is limited to 24 vertices")
    u = np.repeat(np.arange(n), adj.shape[1])
    v = adj.ravel()
    keep = u < v
    u, v = u[keep], v[keep]
    best = math.inf
    chunk = 1 << 16
    for start in range(1, 1 << n, chunk):
        masks = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        bits = (masks[:, None] >> np.arange(n)) & 1
        size = bits.sum(axis=1)
        ok = size <= n // 2
        if not ok.any():
            continue
        cut = (bits[:, u] != bits[:, v]).sum(axis=1)
        ratio = cut[ok] / size[ok]
        best = min(best, float(ratio.min()))
    return best


def vertex_expansion_exact(adj: np.ndarray) -> float:
    """Largest c with |N(A) minus A| >= c|A| for all |A| <= n/2 (n <= 20)."""
    n = adj.shape[0]
    if n > 20:
        raise ValueError("exhaustive subset enumeration is limited to 20 vertices")
    nbr_mask = np.zeros(n, dtype=np.int64)
    for x in range(n):
        for y in adj[x].tolist():
            nbr_mask[x] |= 1 << y
    best = math.inf
    for mask in range(1, 1 << n):
        size = bin(mask).count("1")
        if size > n // 2:
            continue
        reach = 0
        for x in range(n):
            if mask >> x & 1:
                reach |= int(nbr_mask[x])
        best = min(best, bin(reach & ~mask).count("1") / size)
    return best


@dataclass
class SpectralReport:
    color: str
    r: int
    n: int
    lambda_max_nontrivial: float
    lambda_min: float
    ramanujan_bound: float
    verdict: bool
    girth: int
    diameter: int
    diameter_exact: bool
    cheeger_lower: float
    method: str
    residual: float
    bipartite: bool
    trace_sum: Optional[float] = None
    trace_sq_sum: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schema_version"] = 1
        return d


def spectral_report(graph, color, bipartite: bool = False, bipartition=None, method: Optional[str] = None, tol: float = RAMANUJAN_TOL, girth_sources=None) -> SpectralReport:
    """Spectrum (dense below DENSE_CAP, Krylov above), verdict, girth and diameter."""
    adj = graph.adjacency(color)
    n, r = adj.shape
    label = str(graph.color(color).label) if hasattr(graph, "color") else str(color)
    method = method or ("dense" if n <= DENSE_CAP else "iterative")
    extra = {}
    if method == "dense":
        spec = spectrum_dense(graph, color)
        evs = spec.eigenvalues
        verdict = ramanujan_verdict(evs, r, bipartite, tol)
        rest = _drop_one(list(evs), r, 1e-6)
        if bipartite:
            rest = _drop_one(rest, -r, 1e-6)
        lam2 = max(rest) if rest else float("nan")
        lmin = float(evs[-1])
        residual = spec.off_norm
        trace_sum, trace_sq = float(evs.sum()), float((evs ** 2).sum())
        extra["sweeps"] = spec.sweeps
    else:
        res = spectrum_extremes(graph, color, k=3, deflate_trivial=True, bipartition=bipartition if bipartite else None)
        lam2 = float(res.top[0])
        lmin = float(res.bottom[0])
        evs = np.concatenate([res.top, res.bottom])
        bound = 2 * math.sqrt(r - 1) + tol
        verdict = bool(np.all(np.abs(evs) <= bound))
        residual = res.max_residual
        A = adjacency_matrix(adj)
        # matrix-level identities: sum of eigenvalues and of their squares
        trace_sum = float(A.diagonal().sum())
        trace_sq = float(A.multiply(A).sum())
        extra["converged"] = res.converged
        extra["matvecs"] = res.matvecs
    girth, diameter, exact = girth_and_diameter(graph, color, girth_sources)
    return SpectralReport(
        color=label,
        r=r,
        n=n,
        lambda_max_nontrivial=float(lam2),
        lambda_min=lmin,
        ramanujan_bound=2 * math.sqrt(r - 1),
        verdict=bool(verdict),
        girth=girth,
        diameter=diameter,
        diameter_exact=exact,
        cheeger_lower=(r - float(lam2)) / 2,
        method=method,
        residual=float(residual),
        bipartite=bipartite,
        trace_sum=trace_sum,
        trace_sq_sum=trace_sq,
        extra=extra,
    )
