"""Demonstration transport over the colored networks: cross-checked sends and XOR dispersal.

Not a security artifact: the digest chain only exercises the square
property end to end.
"""
from __future__ import annotations

import hashlib
import struct
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

HASH_NAME = "sha256"
_CHAIN_SEED = b"ramanujan-nets/digest-chain/v1"


class RoutingError(RuntimeError):
    pass


class MissingShareError(RuntimeError):
    def __init__(self, color: str, index: int):
        super().__init__(f"share {index} (color {color}) was not received")
        self.color = color
        self.index = index


def H(data: bytes) -> bytes:
    return hashlib.new(HASH_NAME, data).digest()


@dataclass(frozen=True)
class Hop:
    vertex: int
    color: str
    gen: int


@dataclass
class Transmission:
    payload: bytes
    src: int
    dst: int
    path: list[Hop]
    check_color: Optional[str]
    check_gens: list[int]
    digests: list[bytes]

    def to_dict(self) -> dict:
        return {
            "src": self.src,
            "dst": self.dst,
            "payload_sha256": hashlib.sha256(self.payload).hexdigest(),
            "payload_len": len(self.payload),
            "path": [[h.vertex, h.color, h.gen] for h in self.path],
            "check_color": self.check_color,
            "check_gens": list(self.check_gens),
            "digests": [d.hex() for d in self.digests],
        }


@dataclass
class Verification:
    accepted: bool
    reason: str = "ok"
    hop: Optional[int] = None


def bfs_path(adj: np.ndarray, src: int, dst: int) -> list[tuple[int, int]]:
    """Shortest path as (vertex, generator slot) hops; lowest slot wins ties."""
    if src == dst:
        return []
    prev = {src: (-1, -1)}
    q = deque([src])
    while q:
        u = q.popleft()
        for slot, w in enumerate(adj[u].tolist()):
            if w in prev:
                continue
            prev[w] = (u, slot)
            if w == dst:
                hops = []
                x = dst
                while x != src:
                    pu, ps = prev[x]
                    hops.append((pu, ps))
                    x = pu
                return hops[::-1]
            q.append(w)
    raise RoutingError(f"no path from {src} to {dst}")


def chunks(payload: bytes, k: int) -> list[bytes]:
    """Split payload into k contiguous pieces whose sizes differ by at most one."""
    if k <= 0:
        return [payload]
    q, r = divmod(len(payload), k)
    out, pos = [], 0
    for i in range(k):
        size = q + (1 if i < r else 0)
        out.append(payload[pos:pos + size])
        pos += size
    return out


def square_completion(graph, red: str, blue: str, v: int, s: int, t: int) -> tuple[int, int, int]:
    """(t', s', corner) with v*s*t' = v*t*s' = corner, found by search; unique or ValueError."""
    R = graph.adjacency(red)
    B = graph.adjacency(blue)
    after_red = B[R[v, s]]
    after_blue = R[B[v, t]]
    hits = np.argwhere(after_red[:, None] == after_blue[None, :])
    if len(hits) != 1:
        raise ValueError(f"square at vertex {v} for ({s}, {t}) has {len(hits)} completions")
    t2, s2 = (int(x) for x in hits[0])
    return t2, s2, int(after_red[t2])


def _table_completion(graph, table, v: int, s: int, t: int) -> tuple[int, int, int]:
    # red[s] blue[j] = blue[t] red[i2] u  -- read off (j, i2) from the table
    for (i, j), comp in table.table.items():
        if i == s and comp.j2 == t:
            corner = int(graph.adjacency(table.blue.color)[graph.adjacency(table.red.color)[v, s], j])
            return j, comp.i2, corner
    raise ValueError("table has no entry")


def _label(v: int, s: int, extra: Sequence[int]) -> bytes:
    return struct.pack(f">{2 + len(extra)}I", v, s, *extra)


def _chain(payload: bytes, labels: list[bytes]) -> list[bytes]:
    pieces = chunks(payload, max(1, len(labels)))
    labels = labels or [b""]
    d = H(_CHAIN_SEED)
    out = []
    for piece, lab in zip(pieces, labels):
        d = H(d + piece + lab)
        out.append(d)
    return out


def send_with_cross_check(
    graph,
    payload: bytes,
    src: int,
    dst: int,
    data_color: str,
    check_color: str,
    rng_seed: int = 0,
    table=None,
) -> Transmission:
    """Route payload on data_color and bind every hop to its check_color square."""
    if data_color == check_color:
        raise ValueError("data and check colors must differ")
    R = graph.adjacency(data_color)
    B = graph.adjacency(check_color)
    rng = np.random.default_rng(rng_seed)
    hops = bfs_path(R, src, dst)
    labels, path, checks = [], [], []
    for v, s in hops:
        t = int(rng.integers(B.shape[1]))
        if table is not None and table.red.color == data_color:
            t2, s2, corner = _table_completion(graph, table, v, s, t)
        else:
            t2, s2, corner = square_completion(graph, data_color, check_color, v, s, t)
        labels.append(_label(v, s, (t, t2, s2, corner)))
        path.append(Hop(v, data_color, s))
        checks.append(t)
    return Transmission(payload, src, dst, path, check_color, checks, _chain(payload, labels))


def verify_transmission(graph, tx: Transmission) -> Verification:
    """Replay the data path and the check-channel squares; accept iff every digest matches."""
    labels = []
    cur = tx.src
    for k, hop in enumerate(tx.path):
        if hop.vertex != cur:
            return Verification(False, "path is not contiguous", k)
        adj = graph.adjacency(hop.color)
        if not 0 <= hop.gen < adj.shape[1]:
            return Verification(False, "generator index out of range", k)
        if tx.check_color is None:
            labels.append(_label(hop.vertex, hop.gen, ()))
        else:
            t = tx.check_gens[k]
            try:
                t2, s2, corner = square_completion(graph, hop.color, tx.check_color, hop.vertex, hop.gen, t)
            except (ValueError, IndexError):
                return Verification(False, "square completion failed", k)
            labels.append(_label(hop.vertex, hop.gen, (t, t2, s2, corner)))
        cur = int(adj[hop.vertex, hop.gen])
    if cur != tx.dst:
        return Verification(False, "path does not end at the destination", len(tx.path))
    replay = _chain(tx.payload, labels)
    if len(replay) != len(tx.digests):
        return Verification(False, "digest count mismatch")
    for k, (a, b) in enumerate(zip(replay, tx.digests)):
        if a != b:
            return Verification(False, "digest mismatch", k)
    return Verification(True)


def random_walk(adj: np.ndarray, src: int, length: int, rng) -> list[tuple[int, int]]:
    hops, v = [], src
    for _ in range(length):
        s = int(rng.integers(adj.shape[1]))
        hops.append((v, s))
        v = int(adj[v, s])
    return hops


@dataclass
class DispersalSet:
    g: int
    colors: list[str]
    shares: list[bytes]
    routes: list[Transmission] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "g": self.g,
            "colors": self.colors,
            "share_sha256": [hashlib.sha256(s).hexdigest() for s in self.shares],
            "routes": [r.to_dict() for r in self.routes],
        }


def _xor(chunks_: Sequence[bytes]) -> bytes:
    acc = np.zeros(len(chunks_[0]), dtype=np.uint8)
    for c in chunks_:
        acc ^= np.frombuffer(c, dtype=np.uint8)
    return acc.tobytes()


def disperse(graph, payload: bytes, g: int, rng_seed: int = 0, src: int = 0, walk_length: int = 8) -> DispersalSet:
    """Split payload into g XOR shares, each sent along a random walk in its own color."""
    labels = graph.labels
    if g < 1 or g > len(labels):
        raise ValueError(f"g={g} needs between 1 and {len(labels)} colors")
    rng = np.random.default_rng(rng_seed)
    shares = [rng.bytes(len(payload)) for _ in range(g - 1)]
    shares.append(_xor(shares + [payload]) if shares else bytes(payload))
    routes = []
    for share, color in zip(shares, labels):
        adj = graph.adjacency(color)
        hops = random_walk(adj, src, walk_length, rng)
        dst = int(adj[hops[-1][0], hops[-1][1]]) if hops else src
        path = [Hop(v, color, s) for v, s in hops]
        digests = _chain(share, [_label(v, s, ()) for v, s in hops])
        routes.append(Transmission(share, src, dst, path, None, [], digests))
    return DispersalSet(g, labels[:g], shares, routes)


def reconstruct(ds: DispersalSet, received: Optional[Sequence[Optional[bytes]]] = None) -> bytes:
    """XOR of all received shares; raises MissingShareError naming the first absent color."""
    got = list(ds.shares if received is None else received)
    if len(got) < ds.g:
        got += [None] * (ds.g - len(got))
    for i, share in enumerate(got):
        if share is None:
            raise MissingShareError(ds.colors[i], i)
    return _xor(got)
