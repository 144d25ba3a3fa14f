"""Colored Cayley graphs on PSL(2, F_N) and graph-level checks of the square property."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra import reduce_mod_N
from .generators import GeneratorSet, SquareTable
from .numbertheory import is_prime, legendre, sqrt_mod


class DegenerateGeneratorError(ValueError):
    pass


class NonResidueNormError(ValueError):
    pass


@dataclass(frozen=True)
class GroupContext:
    N: int
    sqrt_m1: int
    sqrt_5: Optional[int] = None
    quotient: str = "PSL2"

    def __post_init__(self):
        N = self.N
        if N <= 2 or not is_prime(N):
            raise ValueError(f"N={N} must be an odd prime")
        if (self.sqrt_m1 ** 2 + 1) % N:
            raise ValueError(f"{self.sqrt_m1} is not a square root of -1 mod {N}")
        if self.sqrt_5 is not None and (self.sqrt_5 ** 2 - 5) % N:
            raise ValueError(f"{self.sqrt_5} is not a square root of 5 mod {N}")
        if self.quotient != "PSL2":
            raise ValueError("only the PSL2 quotient is supported")

    @classmethod
    def rational(cls, N: int) -> "GroupContext":
        if N % 4 != 1 or not is_prime(N):
            raise ValueError(f"N={N} must be a prime congruent to 1 mod 4")
        return cls(N, sqrt_mod(N - 1, N))

    @classmethod
    def from_certificate(cls, cert) -> "GroupContext":
        return cls(cert.N, cert.sqrt_m1, cert.sqrt_5)

    @property
    def order(self) -> int:
        return self.N * (self.N ** 2 - 1) // 2


def canonicalize(m: np.ndarray, N: int) -> np.ndarray:
    """Rows (a, b, c, d) of det-1 matrices, sign fixed so the first nonzero entry is <= (N-1)/2."""
    m = np.asarray(m, dtype=np.int64) % N
    lead = np.where(m[..., 0] != 0, m[..., 0], m[..., 1])
    lead = np.where(lead != 0, lead, np.where(m[..., 2] != 0, m[..., 2], m[..., 3]))
    flip = lead > (N - 1) // 2
    out = m.copy()
    out[flip] = (-out[flip]) % N
    return out


def encode(m: np.ndarray, N: int) -> np.ndarray:
    return ((m[..., 0] * N + m[..., 1]) * N + m[..., 2]) * N + m[..., 3]


def matmul_mod(v: np.ndarray, s: Sequence[int], N: int) -> np.ndarray:
    """Row-wise product V @ S for V of shape (n, 4) and a single matrix S."""
    s0, s1, s2, s3 = (int(x) for x in s)
    a, b, c, d = v[:, 0], v[:, 1], v[:, 2], v[:, 3]
    return np.stack([(a * s0 + b * s2) % N, (a * s1 + b * s3) % N, (c * s0 + d * s2) % N, (c * s1 + d * s3) % N], axis=1)


def build_group(ctx: GroupContext) -> np.ndarray:
    """All canonical PSL(2, F_N) elements as rows (a, b, c, d), sorted by code."""
    N = ctx.N
    inv = np.zeros(N, dtype=np.int64)
    inv[1:] = [pow(x, -1, N) for x in range(1, N)]
    a, b, c = np.meshgrid(np.arange(1, N), np.arange(N), np.arange(N), indexing="ij")
    a, b, c = a.ravel(), b.ravel(), c.ravel()
    d = (1 + b * c) % N * inv[a] % N
    part1 = np.stack([a, b, c, d], axis=1)
    # a = 0 forces c = -1/b
    b0, d0 = np.meshgrid(np.arange(1, N), np.arange(N), indexing="ij")
    b0, d0 = b0.ravel(), d0.ravel()
    part2 = np.stack([np.zeros_like(b0), b0, (-inv[b0]) % N, d0], axis=1)
    allm = canonicalize(np.concatenate([part1, part2]), N)
    codes, idx = np.unique(encode(allm, N), return_index=True)
    verts = allm[idx]
    if len(verts) != ctx.order:
        raise AssertionError("PSL2 enumeration has the wrong size")
    return verts


@dataclass
class Color:
    label: str
    matrices: np.ndarray  # (r, 4) normalized generator images
    adj: np.ndarray  # (n, r) neighbor indices

    @property
    def r(self) -> int:
        return self.adj.shape[1]


@dataclass
class ColoredCayleyGraph:
    ctx: Optional[GroupContext]
    vertices: Optional[np.ndarray]
    colors: list[Color]
    n: int = 0
    codes: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.vertices is not None:
            self.n = len(self.vertices)
            self.codes = encode(self.vertices, self.ctx.N)

    def color(self, label) -> Color:
        if isinstance(label, int):
            return self.colors[label]
        for c in self.colors:
            if c.label == label:
                return c
        raise KeyError(label)

    def adjacency(self, label) -> np.ndarray:
        return self.color(label).adj

    @property
    def labels(self) -> list[str]:
        return [c.label for c in self.colors]

    def index_of(self, m: Sequence[int]) -> int:
        row = canonicalize(np.asarray(m, dtype=np.int64).reshape(1, 4), self.ctx.N)
        code = encode(row, self.ctx.N)[0]
        k = int(np.searchsorted(self.codes, code))
        if k >= self.n or self.codes[k] != code:
            raise KeyError("matrix is not a canonical PSL2 element")
        return k

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        codes = encode(canonicalize(rows, self.ctx.N), self.ctx.N)
        idx = np.searchsorted(self.codes, codes)
        if np.any(idx >= self.n) or np.any(self.codes[np.minimum(idx, self.n - 1)] != codes):
            raise KeyError("product left the vertex set")
        return idx

    def edge_lines(self) -> list[str]:
        """One "u v color" line per undirected edge (u < v), sorted."""
        lines = []
        for c in self.colors:
            u = np.repeat(np.arange(self.n), c.r)
            v = c.adj.ravel()
            keep = u < v
            pairs = np.stack([u[keep], v[keep]], axis=1)
            order = np.lexsort((pairs[:, 1], pairs[:, 0]))
            lines.extend(f"{a} {b} {c.label}" for a, b in pairs[order].tolist())
        return lines

    def to_dot(self) -> str:
        out = ["graph X {"]
        for line in self.edge_lines():
            u, v, col = line.split()
            out.append(f'  {u} -- {v} [color="{col}"];')
        out.append("}")
        return "\n".join(out) + "\n"

    def summary(self, components: Optional[dict] = None) -> dict:
        d = {
            "schema_version": 1,
            "N": self.ctx.N if self.ctx else None,
            "vertex_count": self.n,
            "colors": [{"label": c.label, "regularity": c.r} for c in self.colors],
        }
        if components is not None:
            d["components"] = components
        return d


def normalized_generator(m: tuple, N: int) -> np.ndarray:
    """Scale a generator image into SL2 by the deterministic square root of its determinant."""
    (a, b), (c, d) = m
    det = (a * d - b * c) % N
    if det == 0 or legendre(det, N, certified=True) != 1:
        raise NonResidueNormError(f"generator determinant {det} is not a nonzero square mod {N}")
    inv = pow(sqrt_mod(det, N, certified=True), -1, N)
    row = np.array([[a * inv % N, b * inv % N, c * inv % N, d * inv % N]], dtype=np.int64)
    row = canonicalize(row, N)[0]
    if row[1] == 0 and row[2] == 0 and row[0] == row[3]:
        raise DegenerateGeneratorError("generator reduces to a scalar matrix")
    return row


def build_colored_cayley(ctx: GroupContext, sets: Sequence[GeneratorSet], vertices: Optional[np.ndarray] = None) -> ColoredCayleyGraph:
    """Cayley graph with an edge v -- v*s for every reduced generator s of each color."""
    N = ctx.N
    if vertices is None:
        vertices = build_group(ctx)
    graph = ColoredCayleyGraph(ctx, vertices, [])
    for gs in sets:
        if gs.prime % N == 0:
            raise ValueError(f"N={N} divides the norm of color {gs.color}")
        mats = np.array([normalized_generator(reduce_mod_N(g, ctx), N) for g in gs.gens], dtype=np.int64)
        adj = np.empty((graph.n, len(mats)), dtype=np.int64)
        for k, s in enumerate(mats):
            adj[:, k] = graph.lookup(matmul_mod(vertices, s, N))
        graph.colors.append(Color(gs.color, mats, adj))
    return graph


def graph_from_edge_lines(lines: Sequence[str]) -> ColoredCayleyGraph:
    """Rebuild per-color adjacency from "u v color" lines; raises ValueError if a color is irregular."""
    edges: dict[str, list[tuple[int, int]]] = {}
    n = 0
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        u, v, col = line.split()
        u, v = int(u), int(v)
        edges.setdefault(col, []).append((u, v))
        n = max(n, u + 1, v + 1)
    colors = []
    for col, es in edges.items():
        nbrs: list[list[int]] = [[] for _ in range(n)]
        for u, v in es:
            nbrs[u].append(v)
            nbrs[v].append(u)
        degs = {len(x) for x in nbrs}
        if len(degs) != 1:
            raise ValueError(f"color {col} is not regular: degrees {sorted(degs)}")
        adj = np.array([sorted(x) for x in nbrs], dtype=np.int64)
        colors.append(Color(col, np.zeros((0, 4), dtype=np.int64), adj))
    return ColoredCayleyGraph(None, None, colors, n=n)


@dataclass
class SquareReport:
    colors: tuple[str, str]
    method: str
    vertices_audited: int
    pairs_checked: int
    failures: int
    failing_examples: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "colors": list(self.colors),
            "method": self.method,
            "vertices_audited": self.vertices_audited,
            "pairs_checked": self.pairs_checked,
            "failures": self.failures,
            "failing_examples": self.failing_examples[:10],
        }


def _audit_vertices(n: int, mode) -> np.ndarray:
    if mode == "exhaustive":
        return np.arange(n)
    kind, k = mode
    if kind != "sample":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(0)
    return np.sort(rng.choice(n, size=min(k, n), replace=False))


def verify_square_property(
    graph: ColoredCayleyGraph,
    colors: tuple,
    mode="exhaustive",
    table: Optional[SquareTable] = None,
) -> SquareReport:
    """Check that each (red, blue) edge pair at a vertex closes to a unique square.

    mode is "exhaustive" or ("sample", k). With a table the completion comes
    from the quaternion factorization; without one it is found by search.
    """
    red_label, blue_label = colors
    if red_label == blue_label:
        raise ValueError("square property needs two distinct colors")
    R = graph.adjacency(red_label)
    B = graph.adjacency(blue_label)
    vs = _audit_vertices(graph.n, mode)
    failures = 0
    examples = []
    checked = 0
    if table is not None:
        for (i, j), comp in table.table.items():
            lhs = B[R[vs, i], j]
            rhs = R[B[vs, comp.j2], comp.i2]
            bad = np.flatnonzero(lhs != rhs)
            failures += len(bad)
            examples.extend((int(vs[k]), i, j) for k in bad[:3])
            checked += len(vs)
        return SquareReport((red_label, blue_label), "table", len(vs), checked, failures, examples)
    for s in range(R.shape[1]):
        after_red = B[R[vs, s]]  # (m, r_blue): v s t'
        for t in range(B.shape[1]):
            after_blue = R[B[vs, t]]  # (m, r_red): v t s'
            matches = (after_red[:, :, None] == after_blue[:, None, :]).sum(axis=(1, 2))
            bad = np.flatnonzero(matches != 1)
            failures += len(bad)
            examples.extend((int(vs[k]), s, t, int(matches[k])) for k in bad[:3])
            checked += len(vs)
    return SquareReport((red_label, blue_label), "search", len(vs), checked, failures, examples)


@dataclass
class ComponentReport:
    label: str
    count: int
    labels: np.ndarray
    bipartite: list[bool]
    diameters: list[int]
    diameter_exact: bool

    @property
    def connected(self) -> bool:
        return self.count == 1

    @property
    def is_bipartite(self) -> bool:
        return all(self.bipartite)

    def to_dict(self) -> dict:
        return {
            "color": self.label,
            "components": self.count,
            "bipartite": self.bipartite,
            "diameters": self.diameters,
            "diameter_exact": self.diameter_exact,
        }


def bfs_levels(adj: np.ndarray, src: int) -> np.ndarray:
    """Distances from src (-1 where unreachable), frontier-at-a-time."""
    n = adj.shape[0]
    dist = np.full(n, -1, dtype=np.int64)
    dist[src] = 0
    frontier = np.array([src])
    level = 0
    while frontier.size and adj.shape[1]:
        level += 1
        nb = np.unique(adj[frontier].ravel())
        nb = nb[dist[nb] < 0]
        dist[nb] = level
        frontier = nb
    return dist


EXACT_DIAMETER_CAP = 5000
DIAMETER_SAMPLE = 64


def parity_components(graph: ColoredCayleyGraph, color) -> ComponentReport:
    """Connected components, 2-colorability and diameter of one color class."""
    adj = graph.adjacency(color)
    n = graph.n
    comp = np.full(n, -1, dtype=np.int64)
    side = np.zeros(n, dtype=np.int64)
    bip = []
    ncomp = 0
    for root in range(n):
        if comp[root] >= 0:
            continue
        comp[root] = ncomp
        side[root] = 0
        ok = True
        q = deque([root])
        while q:
            u = q.popleft()
            for w in adj[u].tolist():
                if comp[w] < 0:
                    comp[w] = ncomp
                    side[w] = side[u] ^ 1
                    q.append(w)
                elif side[w] == side[u]:
                    ok = False
        bip.append(ok)
        ncomp += 1
    exact = n <= EXACT_DIAMETER_CAP
    diam = [0] * ncomp
    for c in range(ncomp):
        members = np.flatnonzero(comp == c)
        if exact:
            sources = members
        else:
            rng = np.random.default_rng(0)
            sources = rng.choice(members, size=min(DIAMETER_SAMPLE, len(members)), replace=False)
        best = 0
        for s in sources.tolist():
            best = max(best, int(bfs_levels(adj, s).max()))
        diam[c] = best
    return ComponentReport(str(graph.color(color).label), ncomp, comp, bip, diam, exact)


def write_exports(graph: ColoredCayleyGraph, prefix: str, components: Optional[dict] = None) -> dict:
    """Write <prefix>.edges, <prefix>.dot and <prefix>.json; return the paths."""
    paths = {"edges": f"{prefix}.edges", "dot": f"{prefix}.dot", "summary": f"{prefix}.json"}
    with open(paths["edges"], "w") as fh:
        fh.write("\n".join(graph.edge_lines()) + "\n")
    with open(paths["dot"], "w") as fh:
        fh.write(graph.to_dot())
    with open(paths["summary"], "w") as fh:
        json.dump(graph.summary(components), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths
