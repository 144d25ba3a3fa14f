"""Normal-form generator sets for each color and the square-completion table."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .algebra import (
    PHI,
    TAU,
    MaximalOrder,
    OFElem,
    Quaternion,
    small_elements,
)
from .numbertheory import is_prime, pell_rep

# tau^-3 < Tr(x) <= tau^3 at the identity embedding
TRACE_WINDOW = (PHI ** -3, PHI ** 3)

# u = sign * tau^(3k), |k| <= UNIT_WINDOW
UNIT_WINDOW = 4

_EPS = 1e-9


class GeneratorCountError(RuntimeError):
    """The enumeration did not produce p + 1 normal-form elements."""


class SquareTableError(RuntimeError):
    """Some product has zero or several square completions."""


@dataclass(frozen=True)
class GeneratorSet:
    color: str
    ring: str  # "Z" or "OF"
    prime: int
    norm_value: object  # int or OFElem
    gens: tuple[Quaternion, ...]

    @property
    def count(self) -> int:
        return len(self.gens)

    def __len__(self):
        return len(self.gens)

    def __getitem__(self, i):
        return self.gens[i]

    def to_dict(self) -> dict:
        def enc(c):
            return [c.x, c.y] if isinstance(c, OFElem) else c

        return {
            "color": self.color,
            "ring": "Z" if self.ring == "Z" else "Z[tau]",
            "prime": self.prime,
            "norm_value": enc(self.norm_value),
            "count": self.count,
            "generators": [{"coeffs": [enc(c) for c in g.coeffs], "den": g.den} for g in self.gens],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSet":
        ring = "Z" if d["ring"] == "Z" else "OF"

        def dec(c):
            return OFElem(*c) if ring == "OF" else c

        gens = tuple(Quaternion(*(dec(c) for c in g["coeffs"]), den=g["den"]) for g in d["generators"])
        return cls(d["color"], ring, d["prime"], dec(d["norm_value"]), gens)


def lps_generators(p: int, color: str = "red") -> GeneratorSet:
    """The p+1 quaternions a+bi+cj+dk of norm p with a odd positive and b, c, d even."""
    if not is_prime(p) or p % 4 != 1:
        raise ValueError(f"p={p} must be a prime congruent to 1 mod 4")
    r = math.isqrt(p)
    gens = []
    for a in range(1, r + 1, 2):
        for b in range(-r, r + 1):
            if b % 2:
                continue
            rest_b = p - a * a - b * b
            if rest_b < 0:
                continue
            for c in range(-r, r + 1):
                if c % 2:
                    continue
                d2 = rest_b - c * c
                if d2 < 0:
                    continue
                d = math.isqrt(d2)
                if d * d != d2 or d % 2:
                    continue
                for dd in sorted({d, -d}):
                    gens.append(Quaternion(a, b, c, dd))
    gens.sort(key=Quaternion.sort_key)
    if len(gens) != p + 1:
        raise GeneratorCountError(f"found {len(gens)} generators of norm {p}, expected {p + 1}")
    return GeneratorSet(color, "Z", p, p, tuple(gens))


def split_prime(p: int) -> tuple[OFElem, OFElem]:
    """Totally positive pi, pi_bar = (a +- 2b sqrt 5)/2 with 4p = a^2 - 20 b^2."""
    rep = pell_rep(p, 4)
    pi = rep.as_of()
    return pi, pi.conj()


def _lead(x: Quaternion) -> OFElem:
    """Tr x / 2 = a, or the first nonzero of b, c, d when the trace vanishes."""
    for v in x.coeffs:
        v = OFElem.coerce(v)
        if v.x or v.y:
            return v
    return OFElem(0)


def _in_window(lead: OFElem) -> bool:
    lo, hi = TRACE_WINDOW
    return lead.is_totally_positive() and lo < 2 * lead.sigma1() <= hi + _EPS


def in_normal_form(x: Quaternion, order: MaximalOrder) -> bool:
    """x = 1 mod 2M and Tr x totally positive with tau^-3 < Tr x <= tau^3.

    Classes of trace zero have no such associate; for them the same window
    and positivity test is applied to twice the first nonzero of b, c, d.
    """
    if x.den != 1:
        return False
    return _in_window(_lead(x)) and order.congruent_one_mod2(x)


def _norm_shifts(target: OFElem) -> range:
    """Exponents m for which some normal-form element can have norm target * tau^(6 m).

    The associates +-tau^(3k) x of an element x = 1 mod 2M stay = 1 mod 2M
    (tau^3 = 1 mod 2) and have norm tau^(6k) Nm x; the sign and the parity of
    k fix the signs of the two trace embeddings, and k moves sigma1(Tr) across
    the window in steps of tau^6.  Each class thus has one representative in
    the window, of norm target * tau^(6 m) for some m.  With l the leading
    coefficient (a, or the first nonzero of b, c, d when Tr x = 0), l totally
    positive and tau^-3 < sigma1(2l) <= tau^3 force sigma1(l)^2 > tau^-6 / 4
    and sigma2(l) >= 1 / sigma1(l) >= 2 tau^-3, and sigma_k(l)^2 <=
    sigma_k(Nm x) bounds m on both sides.
    """
    s1, s2 = target.sigma1(), target.sigma2()
    if s1 <= 0 or s2 <= 0:
        raise ValueError(f"{target!r} is not totally positive")
    step = 6 * math.log(PHI)
    lo = math.ceil((math.log(PHI ** -6 / 4 / s1)) / step - 1e-9)
    hi = math.floor((math.log(s2 / (4 * PHI ** -6))) / step + 1e-9)
    return range(lo, hi + 1)


def _normal_form_elements(target: OFElem, order: MaximalOrder) -> list[Quaternion]:
    """Window representatives of all classes whose norm is target up to tau^(6 Z)."""
    out = []
    for m in _norm_shifts(target):
        out.extend(_window_elements_of_norm(target * TAU ** (6 * m), order))
    out.sort(key=Quaternion.sort_key)
    return out


def _window_elements_of_norm(target: OFElem, order: MaximalOrder) -> list[Quaternion]:
    s1, s2 = target.sigma1(), target.sigma2()
    b1, b2 = math.sqrt(s1), math.sqrt(s2)
    lo, hi = TRACE_WINDOW
    box = small_elements(b1, b2)
    sq = {v: v * v for v in box}
    by_square: dict[OFElem, list[OFElem]] = {}
    for v in box:
        by_square.setdefault(sq[v], []).append(v)
    # Tr = 2a; a = 0 admits the trace-zero classes, filtered by the lead test below
    a_range = [a for a in box if _in_window(a)]
    if OFElem(0) in box:
        a_range.append(OFElem(0))
    out = []
    for a in a_range:
        r1 = target - sq[a]
        if r1.sigma1() < -_EPS or r1.sigma2() < -_EPS:
            continue
        for b in box:
            r2 = r1 - sq[b]
            if r2.sigma1() < -_EPS or r2.sigma2() < -_EPS:
                continue
            for c in box:
                r3 = r2 - sq[c]
                if r3.sigma1() < -_EPS or r3.sigma2() < -_EPS:
                    continue
                for d in by_square.get(r3, ()):
                    x = Quaternion(a, b, c, d)
                    if _in_window(_lead(x)) and order.congruent_one_mod2(x):
                        out.append(x)
    return out


def _check_count(gens, p: int, target) -> None:
    if len(gens) != p + 1:
        raise GeneratorCountError(f"found {len(gens)} normal-form elements of norm {target!r}, expected {p + 1}")


def hilbert_generators(
    p: int, order: Optional[MaximalOrder] = None, colors: tuple[str, str] = ("red", "blue")
) -> tuple[GeneratorSet, GeneratorSet]:
    """Normal-form elements of norm pi and of norm pi_bar in Z[tau][i, j].

    Norms are pi (resp. pi_bar) up to the totally positive unit tau^(6m)
    needed to bring each class into the trace window.
    """
    if not is_prime(p) or p % 20 not in (1, 9):
        raise ValueError(f"p={p} must be a prime congruent to 1 or 9 mod 20")
    order = order or MaximalOrder()
    pi, pib = split_prime(p)
    sets = []
    for color, target in zip(colors, (pi, pib)):
        gens = _normal_form_elements(target, order)
        _check_count(gens, p, target)
        sets.append(GeneratorSet(color, "OF", p, target, tuple(gens)))
    return sets[0], sets[1]


def normalize(x: Quaternion, order: Optional[MaximalOrder] = None, max_power: int = UNIT_WINDOW) -> Quaternion:
    """The normal-form associate +-tau^(3k) x of an element x = 1 mod 2M."""
    order = order or MaximalOrder()
    for k in range(-max_power, max_power + 1):
        for sign in (1, -1):
            y = x * (TAU ** (3 * k) * sign)
            if in_normal_form(y, order):
                return y
    raise ValueError(f"{x!r} has no normal-form associate within the unit window")


@dataclass(frozen=True)
class Completion:
    i2: int
    j2: int
    sign: int
    tau_exp: int


@dataclass(frozen=True)
class SquareTable:
    """red[i] * blue[j] = blue[j'] * red[i'] * u for every pair (i, j)."""

    red: GeneratorSet
    blue: GeneratorSet
    table: dict

    def __getitem__(self, ij: tuple[int, int]) -> Completion:
        return self.table[ij]

    def index_map(self) -> dict:
        return {ij: (c.i2, c.j2) for ij, c in self.table.items()}

    def inverse(self) -> dict:
        """(j', i') -> (i, j): completion from the blue-then-red side."""
        return {(c.j2, c.i2): ij for ij, c in self.table.items()}

    def unit(self, ij) -> object:
        c = self.table[ij]
        if self.red.ring == "Z":
            return c.sign
        return TAU ** c.tau_exp * c.sign

    def to_dict(self) -> dict:
        rows = [[i, j, c.i2, c.j2, c.tau_exp, c.sign] for (i, j), c in sorted(self.table.items())]
        return {"red": self.red.color, "blue": self.blue.color, "columns": ["i", "j", "i2", "j2", "unit_exp", "sign"], "rows": rows}


def _unit_family(ring: str, window: int):
    if ring == "Z":
        return [(1, 0, 1), (-1, 0, -1)]
    fam = []
    for k in range(-window, window + 1):
        t = TAU ** (3 * k)
        fam.append((1, 3 * k, t))
        fam.append((-1, 3 * k, -t))
    return fam


def _shift_spread(gs: GeneratorSet) -> int:
    """Spread of the exponents m in Nm(gamma) = norm_value * tau^(6 m) over the set."""
    if gs.ring == "Z":
        return 0
    base = math.log(OFElem.coerce(gs.norm_value).sigma1())
    ms = {round((math.log(g.norm().sigma1()) - base) / (6 * math.log(PHI))) for g in gs.gens}
    return max(ms) - min(ms)


def square_table(red: GeneratorSet, blue: GeneratorSet, window: Optional[int] = None) -> SquareTable:
    """Factor every red[i]*blue[j] as blue[j']*red[i']*u with u = 1 mod 2 a unit.

    Comparing norms, u = +-tau^(3k) with |k| at most the combined spread of
    the tau^6 norm shifts in the two sets, so the default window is that
    spread plus UNIT_WINDOW of margin.
    """
    if red.ring != blue.ring:
        raise ValueError("generator sets live over different rings")
    if red.norm_value == blue.norm_value:
        raise ValueError("generator sets must have coprime norms")
    if window is None:
        window = UNIT_WINDOW + _shift_spread(red) + _shift_spread(blue)
    lookup: dict[Quaternion, list[tuple[int, int, int, int]]] = {}
    for jj, t in enumerate(blue.gens):
        for ii, s in enumerate(red.gens):
            q = t * s
            for sign, exp, u in _unit_family(red.ring, window):
                lookup.setdefault(q * u, []).append((ii, jj, sign, exp))
    table = {}
    for i, s in enumerate(red.gens):
        for j, t in enumerate(blue.gens):
            hits = lookup.get(s * t, [])
            if len(hits) != 1:
                raise SquareTableError(f"pair ({i}, {j}) has {len(hits)} completions")
            i2, j2, sign, exp = hits[0]
            if abs(exp) >= 3 * window:
                raise SquareTableError(f"pair ({i}, {j}) needs a unit at the edge of the search window")
            table[(i, j)] = Completion(i2, j2, sign, exp)
    images = {(c.i2, c.j2) for c in table.values()}
    if len(images) != len(table):
        raise SquareTableError("index map is not a bijection")
    return SquareTable(red, blue, table)
