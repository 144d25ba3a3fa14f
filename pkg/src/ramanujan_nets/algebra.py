"""Exact arithmetic in Z[tau] (tau = golden ratio) and in Hamilton quaternions over Z and Z[tau].

Quaternions carry a single positive integer denominator so that the
half-integral elements of the maximal order stay in integer coordinates.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Optional, Union

PHI = (1 + math.sqrt(5)) / 2
PSI = (1 - math.sqrt(5)) / 2


@dataclass(frozen=True, slots=True)
class OFElem:
    """x + y*tau in the ring of integers of Q(sqrt 5), with tau^2 = tau + 1."""

    x: int
    y: int = 0

    @staticmethod
    def coerce(v) -> "OFElem":
        if isinstance(v, OFElem):
            return v
        if isinstance(v, int):
            return OFElem(v, 0)
        return NotImplemented

    def __add__(self, other):
        o = OFElem.coerce(other)
        if o is NotImplemented:
            return o
        return OFElem(self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __sub__(self, other):
        o = OFElem.coerce(other)
        if o is NotImplemented:
            return o
        return OFElem(self.x - o.x, self.y - o.y)

    def __rsub__(self, other):
        return OFElem.coerce(other) - self

    def __neg__(self):
        return OFElem(-self.x, -self.y)

    def __mul__(self, other):
        o = OFElem.coerce(other)
        if o is NotImplemented:
            return o
        # (x1 + y1 t)(x2 + y2 t) = x1x2 + y1y2 + (x1y2 + x2y1 + y1y2) t
        yy = self.y * o.y
        return OFElem(self.x * o.x + yy, self.x * o.y + self.y * o.x + yy)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.unit_inverse() ** (-k)
        out = OFElem(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return bool(self.x or self.y)

    def __repr__(self):
        return f"OFElem({self.x}, {self.y})"

    def conj(self) -> "OFElem":
        """Galois conjugate: tau -> 1 - tau."""
        return OFElem(self.x + self.y, -self.y)

    def norm(self) -> int:
        return self.x * self.x + self.x * self.y - self.y * self.y

    def trace(self) -> int:
        return 2 * self.x + self.y

    def unit_inverse(self) -> "OFElem":
        n = self.norm()
        if n not in (1, -1):
            raise ZeroDivisionError(f"{self!r} is not a unit")
        c = self.conj()
        return OFElem(c.x * n, c.y * n)

    def sigma1(self) -> float:
        return self.x + self.y * PHI

    def sigma2(self) -> float:
        return self.x + self.y * PSI

    def is_totally_positive(self) -> bool:
        # exact: sigma2 > 0 and norm > 0  <=>  both embeddings positive
        return self.norm() > 0 and self.trace() > 0

    def content(self) -> int:
        return math.gcd(self.x, self.y)

    def divisible_by(self, k: int) -> bool:
        return self.x % k == 0 and self.y % k == 0

    def exact_div(self, other) -> "OFElem":
        """Quotient in Z[tau]; raises ValueError when it is not integral."""
        if isinstance(other, int):
            if not self.divisible_by(other):
                raise ValueError(f"{self!r} not divisible by {other}")
            return OFElem(self.x // other, self.y // other)
        n = other.norm()
        num = self * other.conj()
        if not num.divisible_by(n):
            raise ValueError(f"{self!r} not divisible by {other!r}")
        return OFElem(num.x // n, num.y // n)

    def mod2(self) -> tuple[int, int]:
        """Image in F_4 = Z[tau]/2, as the pair (x mod 2, y mod 2)."""
        return (self.x % 2, self.y % 2)

    @classmethod
    def from_sqrt5(cls, a: int, b: int) -> "OFElem":
        """a + b*sqrt(5) (sqrt 5 = 2 tau - 1)."""
        return cls(a - b, 2 * b)


TAU = OFElem(0, 1)
TAU_INV = OFElem(-1, 1)

Scalar = Union[int, OFElem]


def _content(c: Scalar) -> int:
    return abs(c) if isinstance(c, int) else c.content()


def _div(c: Scalar, k: int) -> Scalar:
    if isinstance(c, int):
        return c // k
    return OFElem(c.x // k, c.y // k)


def _is_zero(c: Scalar) -> bool:
    return not c


@dataclass(frozen=True, slots=True, init=False, eq=False)
class Quaternion:
    """(a + b i + c j + d k) / den with i^2 = j^2 = -1, ij = -ji = k."""

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar
    den: int

    def __init__(self, a, b=0, c=0, d=0, den: int = 1):
        if den <= 0:
            raise ValueError("denominator must be positive")
        coeffs = (a, b, c, d)
        if any(isinstance(v, OFElem) for v in coeffs):
            coeffs = tuple(OFElem.coerce(v) for v in coeffs)
        g = math.gcd(den, reduce(math.gcd, (_content(v) for v in coeffs), 0))
        if g > 1:
            coeffs = tuple(_div(v, g) for v in coeffs)
            den //= g
        for name, v in zip("abcd", coeffs):
            object.__setattr__(self, name, v)
        object.__setattr__(self, "den", den)

    @property
    def coeffs(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    @property
    def over_of(self) -> bool:
        return isinstance(self.a, OFElem)

    def _key(self) -> tuple:
        # integer and Z[tau] coefficients compare equal when they agree
        return (self.den,) + tuple(OFElem.coerce(v) for v in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Quaternion):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __add__(self, other: "Quaternion") -> "Quaternion":
        d1, d2 = self.den, other.den
        return Quaternion(*(x * d2 + y * d1 for x, y in zip(self.coeffs, other.coeffs)), den=d1 * d2)

    def __neg__(self):
        return Quaternion(*(-x for x in self.coeffs), den=self.den)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Quaternion):
            return Quaternion(*(x * other for x in self.coeffs), den=self.den)
        a1, b1, c1, d1 = self.coeffs
        a2, b2, c2, d2 = other.coeffs
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            den=self.den * other.den,
        )

    def __rmul__(self, other):
        # scalars are central
        return self * other

    def conj(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d, den=self.den)

    def galois(self) -> "Quaternion":
        """Apply tau -> 1 - tau to every coefficient."""
        if not self.over_of:
            return self
        return Quaternion(*(x.conj() for x in self.coeffs), den=self.den)

    def norm(self) -> Scalar:
        s = self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
        return _exact(s, self.den * self.den)

    def trace(self) -> Scalar:
        return _exact(2 * self.a, self.den)

    def is_zero(self) -> bool:
        return all(_is_zero(v) for v in self.coeffs)

    def sort_key(self) -> tuple:
        if self.over_of:
            return (self.den,) + tuple(v for x in self.coeffs for v in (x.x, x.y))
        return (self.den,) + tuple(self.coeffs)

    def __repr__(self):
        body = ", ".join(repr(x) for x in self.coeffs)
        return f"Quaternion({body}, den={self.den})" if self.den != 1 else f"Quaternion({body})"


def _exact(s: Scalar, k: int) -> Scalar:
    if isinstance(s, int):
        if s % k:
            raise ValueError(f"{s}/{k} is not integral")
        return s // k
    return s.exact_div(k)


ONE = Quaternion(1)
I = Quaternion(0, 1)
J = Quaternion(0, 0, 1)
K = Quaternion(0, 0, 0, 1)


def _det(m: list[list[OFElem]]) -> OFElem:
    n = len(m)
    if n == 1:
        return m[0][0]
    total = OFElem(0)
    for col in range(n):
        minor = [row[:col] + row[col + 1:] for row in m[1:]]
        term = m[0][col] * _det(minor)
        total = total + term if col % 2 == 0 else total - term
    return total


class MaximalOrder:
    """The Z[tau]-order spanned by e1..e4 inside the quaternions over Q(sqrt 5)."""

    def __init__(self):
        z = OFElem(0)
        one = OFElem(1)
        rows = [
            (one, TAU_INV, TAU, z),
            (z, TAU_INV, one, TAU),
            (z, TAU, TAU_INV, one),
            (z, one, TAU, TAU_INV),
        ]
        self._rows = rows
        self.basis = tuple(Quaternion(*r, den=2) for r in rows)
        self._det = _det([list(r) for r in rows])
        # adj[i][j] = cofactor(j, i)
        self._adj = [
            [
                (-1) ** (i + j) * _det([[rows[r][c] for c in range(4) if c != i] for r in range(4) if r != j])
                for j in range(4)
            ]
            for i in range(4)
        ]

    def order_coords(self, q: Quaternion) -> Optional[tuple[OFElem, ...]]:
        """Coordinates of q in the basis e1..e4, or None if q is not in the order."""
        if not q.over_of:
            q = Quaternion(*(OFElem(v) for v in q.coeffs), den=q.den)
        # q = lam . (R / 2)  =>  lam = 2 q R^{-1} = 2 q adj(R) / det(R)
        divisor = self._det * q.den
        out = []
        for j in range(4):
            num = OFElem(0)
            for i in range(4):
                num = num + q.coeffs[i] * self._adj[i][j]
            try:
                out.append((num * 2).exact_div(divisor))
            except ValueError:
                return None
        return tuple(out)

    def contains(self, q: Quaternion) -> bool:
        return self.order_coords(q) is not None

    def from_coords(self, lam: Iterable[Scalar]) -> Quaternion:
        acc = Quaternion(OFElem(0))
        for coef, e in zip(lam, self.basis):
            acc = acc + e * OFElem.coerce(coef)
        return acc

    def congruent_one_mod2(self, q: Quaternion) -> bool:
        """q - 1 lies in 2M."""
        diff = q - ONE
        return self.contains(Quaternion(*diff.coeffs, den=diff.den * 2))

    def in_suborder(self, q: Quaternion) -> bool:
        """Membership in O_F + 2M: integral q with b + tau c + tau^-1 d in 2 O_F."""
        if q.den != 1:
            return False
        b, c, d = (OFElem.coerce(v) for v in (q.b, q.c, q.d))
        return (b + TAU * c + TAU_INV * d).divisible_by(2)

    def mod2_image(self, q: Quaternion) -> tuple[tuple[int, int], ...]:
        lam = self.order_coords(q)
        if lam is None:
            raise ValueError(f"{q!r} is not in the order")
        return tuple(x.mod2() for x in lam)

    def projective_class_mod2(self, q: Quaternion) -> tuple:
        """Image of q in (M/2M) modulo the scalars F_4^x, as a canonical tuple."""
        lam = self.order_coords(q)
        if lam is None:
            raise ValueError(f"{q!r} is not in the order")
        return min(tuple((x * TAU ** k).mod2() for x in lam) for k in range(3))

    def unit_group(self) -> list[Quaternion]:
        """All norm-one elements, by exhaustive search.

        Total definiteness bounds every coordinate of a norm-one element by 1
        at both real places, so 2*coeff ranges over a finite set of Z[tau].
        """
        box = small_elements(2.0, 2.0)
        sq = {v: v * v for v in box}
        four = OFElem(4)
        units = []
        for a, b, c in itertools.product(box, repeat=3):
            rest = four - sq[a] - sq[b] - sq[c]
            if rest.sigma1() < -1e-9 or rest.sigma2() < -1e-9:
                continue
            for d in box:
                if sq[d] == rest:
                    q = Quaternion(a, b, c, d, den=2)
                    if self.contains(q):
                        units.append(q)
        return sorted(units, key=Quaternion.sort_key)


def small_elements(bound1: float, bound2: float) -> list[OFElem]:
    """Elements u + v tau with |sigma1| <= bound1 and |sigma2| <= bound2."""
    eps = 1e-9
    out = []
    vmax = int((bound1 + bound2) / math.sqrt(5)) + 1
    for v in range(-vmax, vmax + 1):
        lo = math.ceil(max(-bound1 - v * PHI, -bound2 - v * PSI) - eps)
        hi = math.floor(min(bound1 - v * PHI, bound2 - v * PSI) + eps)
        for u in range(lo, hi + 1):
            e = OFElem(u, v)
            if abs(e.sigma1()) <= bound1 + eps and abs(e.sigma2()) <= bound2 + eps:
                out.append(e)
    return out


def residue(c: Scalar, ctx) -> int:
    """Image of an integer or Z[tau] element in F_N via ctx.sqrt_5."""
    N = ctx.N
    if isinstance(c, int):
        return c % N
    if c.y % N == 0:
        return c.x % N
    if ctx.sqrt_5 is None:
        raise ValueError("a square root of 5 is required to reduce Z[tau] coefficients")
    tau = (1 + ctx.sqrt_5) * pow(2, -1, N) % N
    return (c.x + c.y * tau) % N


def reduce_mod_N(q: Quaternion, ctx) -> tuple[tuple[int, int], tuple[int, int]]:
    """Image of q in Mat_2(F_N) under i -> diag(s, -s), j -> [[0, -1], [1, 0]]."""
    N = ctx.N
    if N <= 2:
        raise ValueError("N must be an odd prime")
    i = ctx.sqrt_m1
    if i is None or (i * i + 1) % N:
        raise ValueError("context lacks a square root of -1")
    if ctx.sqrt_5 is not None and (ctx.sqrt_5 ** 2 - 5) % N:
        raise ValueError("context square root of 5 is wrong")
    if q.den % N == 0:
        raise ValueError("denominator not invertible mod N")
    a, b, c, d = (residue(v, ctx) for v in q.coeffs)
    inv = pow(q.den, -1, N)
    # a + b diag(i,-i) + c [[0,-1],[1,0]] + d [[0,-i],[-i,0]]
    m00 = (a + b * i) * inv % N
    m01 = (-c - d * i) * inv % N
    m10 = (c - d * i) * inv % N
    m11 = (a - b * i) * inv % N
    return ((m00, m01), (m10, m11))
