"""Independent reference implementations used only by the tests.

Nothing here imports the package's arithmetic: elements of Q(sqrt 5) are
pairs of Fractions in the basis 1, sqrt 5, and the maximal order is treated
as a rank-8 Z-lattice in Q^8.
"""
from __future__ import annotations

import math
from fractions import Fraction as Fr
from itertools import product

import numpy as np

SQ5 = math.sqrt(5.0)


# --- four squares over Z ------------------------------------------------------


def four_squares_oracle(p: int) -> list[tuple[int, int, int, int]]:
    """All (a, b, c, d) with a^2+b^2+c^2+d^2 = p, a > 0 odd, b, c, d even."""
    r = math.isqrt(p)
    rng = range(-r, r + 1)
    out = []
    for a, b, c, d in product(rng, repeat=4):
        if a * a + b * b + c * c + d * d != p:
            continue
        if a > 0 and a % 2 == 1 and b % 2 == 0 and c % 2 == 0 and d % 2 == 0:
            out.append((a, b, c, d))
    return sorted(out)


# --- Q(sqrt 5) as Fraction pairs --------------------------------------------


def fmul(u, v):
    return (u[0] * v[0] + 5 * u[1] * v[1], u[0] * v[1] + u[1] * v[0])


def fadd(u, v):
    return (u[0] + v[0], u[1] + v[1])


def fsub(u, v):
    return (u[0] - v[0], u[1] - v[1])


def emb(u, sign=1):
    return float(u[0]) + sign * float(u[1]) * SQ5


TAU_F = (Fr(1, 2), Fr(1, 2))
TAU_INV_F = (Fr(-1, 2), Fr(1, 2))
ONE_F = (Fr(1), Fr(0))
ZERO_F = (Fr(0), Fr(0))


def qmul(x, y):
    a1, b1, c1, d1 = x
    a2, b2, c2, d2 = y
    m = fmul
    return (
        fsub(fsub(fsub(m(a1, a2), m(b1, b2)), m(c1, c2)), m(d1, d2)),
        fsub(fadd(fadd(m(a1, b2), m(b1, a2)), m(c1, d2)), m(d1, c2)),
        fadd(fadd(fsub(m(a1, c2), m(b1, d2)), m(c1, a2)), m(d1, b2)),
        fadd(fsub(fadd(m(a1, d2), m(b1, c2)), m(c1, b2)), m(d1, a2)),
    )


def qnorm(x):
    acc = ZERO_F
    for c in x:
        acc = fadd(acc, fmul(c, c))
    return acc


def _half(u):
    return (u[0] / 2, u[1] / 2)


ORDER_BASIS = [
    tuple(_half(c) for c in (ONE_F, TAU_INV_F, TAU_F, ZERO_F)),
    tuple(_half(c) for c in (ZERO_F, TAU_INV_F, ONE_F, TAU_F)),
    tuple(_half(c) for c in (ZERO_F, TAU_F, TAU_INV_F, ONE_F)),
    tuple(_half(c) for c in (ZERO_F, ONE_F, TAU_F, TAU_INV_F)),
]


def _flat(q):
    return [x for c in q for x in c]


def _lattice_rows():
    rows = []
    for e in ORDER_BASIS:
        rows.append(_flat(e))
        rows.append(_flat(tuple(fmul(TAU_F, c) for c in e)))
    return rows


def solve_rational(rows, target):
    """Coordinates lam with sum lam_i rows_i = target (exact, Gauss-Jordan)."""
    n = len(rows)
    # columns of the system are the lattice vectors
    mat = [[Fr(rows[j][i]) for j in range(n)] + [Fr(target[i])] for i in range(len(target))]
    m = len(mat)
    piv_row = 0
    pivots = []
    for col in range(n):
        sel = next((r for r in range(piv_row, m) if mat[r][col] != 0), None)
        if sel is None:
            continue
        mat[piv_row], mat[sel] = mat[sel], mat[piv_row]
        pv = mat[piv_row][col]
        mat[piv_row] = [v / pv for v in mat[piv_row]]
        for r in range(m):
            if r != piv_row and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[piv_row])]
        pivots.append(col)
        piv_row += 1
    lam = [Fr(0)] * n
    for r, col in enumerate(pivots):
        lam[col] = mat[r][n]
    return lam


_ROWS = _lattice_rows()


def in_order(q) -> bool:
    lam = solve_rational(_ROWS, _flat(q))
    return all(x.denominator == 1 for x in lam)


def integers_in_box(b1: float, b2: float):
    """(m + n sqrt5)/2 with m = n mod 2 and |sigma_1| <= b1, |sigma_2| <= b2."""
    out = []
    nmax = int((b1 + b2) / SQ5) + 2
    mmax = int(2 * (b1 + b2)) + 2
    for n in range(-nmax, nmax + 1):
        for m in range(-mmax, mmax + 1):
            if (m - n) % 2:
                continue
            s1 = (m + n * SQ5) / 2
            s2 = (m - n * SQ5) / 2
            if abs(s1) <= b1 + 1e-9 and abs(s2) <= b2 + 1e-9:
                out.append((Fr(m, 2), Fr(n, 2)))
    return out


def pell_oracle(target: int, scale: int):
    """Least b >= 0 with scale*target + 20 b^2 a square, by plain search."""
    b = 0
    while True:
        t = scale * target + 20 * b * b
        a = math.isqrt(t)
        if a * a == t and (scale == 4 and (a - b) % 2 == 0 or scale == 1 and a % 2 == 1):
            return a, b
        b += 1


TAU6 = (Fr(9), Fr(4))  # tau^6 = 9 + 4 sqrt5
TAU6_INV = (Fr(9), Fr(-4))


def _window(u) -> bool:
    lo, hi = ((1 + SQ5) / 2) ** -3, ((1 + SQ5) / 2) ** 3
    return emb(u) > 0 and emb(u, -1) > 0 and lo < 2 * emb(u) <= hi + 1e-12


def hilbert_oracle(p: int, conjugate: bool = False, shifts=range(-4, 5)):
    """Normal-form elements of norm pi (or pi_bar) up to tau^(6Z), by meet-in-the-middle.

    The window test is applied to a, or to the first nonzero of b, c, d when
    a = 0.  Returned as 4-tuples of (x, y) meaning x + y tau.
    """
    A, B = pell_oracle(p, 4)
    base = (Fr(A, 2), Fr(B if not conjugate else -B))  # (A + 2B sqrt5)/2
    out = set()
    for m in shifts:
        pi = base
        for _ in range(abs(m)):
            pi = fmul(pi, TAU6 if m > 0 else TAU6_INV)
        box = integers_in_box(math.sqrt(emb(pi)), math.sqrt(emb(pi, -1)))
        pairs: dict = {}
        for c, d in product(box, repeat=2):
            pairs.setdefault(fadd(fmul(c, c), fmul(d, d)), []).append((c, d))
        for a in box:
            if a != ZERO_F and not _window(a):
                continue
            for b in box:
                rest = fsub(fsub(pi, fmul(a, a)), fmul(b, b))
                for c, d in pairs.get(rest, ()):
                    x = (a, b, c, d)
                    lead = next((v for v in x if v != ZERO_F), ZERO_F)
                    if not _window(lead):
                        continue
                    shifted = tuple(_half(fsub(v, ONE_F if k == 0 else ZERO_F)) for k, v in enumerate(x))
                    if in_order(shifted):
                        out.add(tuple(to_tau_basis(v) for v in x))
    return sorted(out)


def to_tau_basis(u):
    """r + s sqrt5 = (r - s) + 2s tau, as integers."""
    r, s = u
    x, y = r - s, 2 * s
    assert x.denominator == 1 and y.denominator == 1
    return int(x), int(y)


# --- dense eigenvalues via a characteristic-polynomial method ----------------


def householder_tridiagonal(a: np.ndarray):
    a = np.array(a, dtype=float)
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        alpha = -np.copysign(np.linalg.norm(x), x[0] if x[0] != 0 else 1.0)
        v = x.copy()
        v[0] -= alpha
        nv = np.linalg.norm(v)
        if nv < 1e-300:
            continue
        v /= nv
        a[k + 1:, :] -= 2 * np.outer(v, v @ a[k + 1:, :])
        a[:, k + 1:] -= 2 * np.outer(a[:, k + 1:] @ v, v)
    return np.diag(a).copy(), np.diag(a, 1).copy()


def _sturm_count(d, e, x):
    """Number of eigenvalues of the tridiagonal (d, e) strictly below x."""
    count = 0
    q = d[0] - x
    if q < 0:
        count += 1
    for i in range(1, len(d)):
        if q == 0:
            q = 1e-300
        q = d[i] - x - e[i - 1] ** 2 / q
        if q < 0:
            count += 1
    return count


def sturm_eigenvalues(a: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """All eigenvalues (descending) by bisection on the Sturm sequence of the tridiagonal form."""
    d, e = householder_tridiagonal(a)
    n = len(d)
    radius = np.max(np.abs(d) + np.r_[np.abs(e), 0] + np.r_[0, np.abs(e)]) + 1
    out = []
    for k in range(n):
        lo, hi = -radius, radius
        while hi - lo > tol * max(1.0, radius):
            mid = (lo + hi) / 2
            if _sturm_count(d, e, mid) > k:
                hi = mid
            else:
                lo = mid
        out.append((lo + hi) / 2)
    return np.sort(np.array(out))[::-1]


# --- small graph fixtures ----------------------------------------------------


class ArrayGraph:
    """Minimal stand-in exposing the adjacency(color) interface."""

    def __init__(self, **colors):
        self._adj = {k: np.asarray(v, dtype=np.int64) for k, v in colors.items()}
        self.n = next(iter(self._adj.values())).shape[0]

    def adjacency(self, color):
        return self._adj[color]

    def color(self, color):
        class _C:
            label = color
            r = self._adj[color].shape[1]

        return _C

    @property
    def labels(self):
        return list(self._adj)


def complete_graph(n: int) -> np.ndarray:
    return np.array([[j for j in range(n) if j != i] for i in range(n)])


def cycle_graph(n: int) -> np.ndarray:
    return np.array([[(i - 1) % n, (i + 1) % n] for i in range(n)])


def petersen_graph() -> np.ndarray:
    outer = [[(i + 1) % 5, (i - 1) % 5, i + 5] for i in range(5)]
    inner = [[5 + (i + 2) % 5, 5 + (i - 2) % 5, i] for i in range(5)]
    return np.array(outer + inner)


def bipartite_double_cover(adj: np.ndarray) -> np.ndarray:
    n = adj.shape[0]
    top = adj + n
    bottom = adj
    return np.vstack([top, bottom])
