"""Modular arithmetic and the prime-selection criteria over Q(sqrt 5)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import OFElem

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

PELL_ITERATION_CAP = 10**6


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_upto(limit: int) -> np.ndarray:
    """All primes <= limit (sieve of Eratosthenes)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for i in range(3, math.isqrt(limit) + 1, 2):
        if sieve[i]:
            sieve[i * i::2 * i] = False
    return np.flatnonzero(sieve).astype(np.int64)


def _check_odd_prime(N: int, certified: bool) -> None:
    if N < 3 or N % 2 == 0:
        raise ValueError(f"modulus must be an odd prime, got {N}")
    if not certified and not is_prime(N):
        raise ValueError(f"modulus {N} is composite")


def legendre(a: int, N: int, certified: bool = False) -> int:
    """Legendre symbol (a/N) by Euler's criterion."""
    _check_odd_prime(N, certified)
    t = pow(a % N, (N - 1) // 2, N)
    return -1 if t == N - 1 else t


def sqrt_mod(a: int, N: int, certified: bool = False) -> Optional[int]:
    """Smaller square root of a modulo the odd prime N, or None for non-residues.

    Tonelli-Shanks.
    """
    _check_odd_prime(N, certified)
    a %= N
    if a == 0:
        return 0
    if pow(a, (N - 1) // 2, N) != 1:
        return None
    if N % 4 == 3:
        r = pow(a, (N + 1) // 4, N)
        return min(r, N - r)
    q, s = N - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (N - 1) // 2, N) != N - 1:
        z += 1
    m, c, t, r = s, pow(z, q, N), pow(a, q, N), pow(a, (q + 1) // 2, N)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % N
            i += 1
        b = pow(c, 1 << (m - i - 1), N)
        m, c = i, b * b % N
        t, r = t * c % N, r * b % N
    return min(r, N - r)


@dataclass(frozen=True)
class PellRep:
    a: int
    b: int
    target: int
    scale: int

    def __post_init__(self):
        if self.a * self.a - 20 * self.b * self.b != self.scale * self.target:
            raise ValueError(f"{self} does not satisfy a^2 - 20 b^2 = scale * target")

    def as_of(self) -> OFElem:
        """a + 2b sqrt(5) for scale 1, (a + 2b sqrt(5))/2 for scale 4."""
        if self.scale == 1:
            return OFElem.from_sqrt5(self.a, 2 * self.b)
        # a, b are both even here
        return OFElem.from_sqrt5(self.a // 2, self.b)

    def residue(self, sqrt_5: int, N: int, sign: int = 1) -> int:
        """Image of a + sign*2b*sqrt(5) (halved for scale 4) in F_N."""
        v = (self.a + sign * 2 * self.b * sqrt_5) % N
        if self.scale == 4:
            v = v * pow(2, -1, N) % N
        return v


def pell_rep(target: int, scale: int = 1) -> PellRep:
    """Representation scale*target = a^2 - 20 b^2 with least b >= 0.

    scale 1 forces a odd; scale 4 forces a, b of equal parity.
    """
    if scale not in (1, 4):
        raise ValueError("scale must be 1 or 4")
    if target % 20 not in (1, 9):
        raise ValueError(f"{target} is not 1 or 9 mod 20")
    n = scale * target
    bound = min(math.isqrt(n) + 1, PELL_ITERATION_CAP)
    for b in range(bound + 1):
        t = n + 20 * b * b
        a = math.isqrt(t)
        if a * a != t:
            continue
        if scale == 1 and a % 2 == 0:
            continue
        if scale == 4 and (a - b) % 2:
            continue
        return PellRep(a, b, target, scale)
    raise ValueError(f"no representation of {n} as a^2 - 20b^2 with b <= {bound}")


def tau_residue(sqrt_5: int, N: int) -> int:
    return (1 + sqrt_5) * pow(2, -1, N) % N


def tau_square_criterion(N: int) -> bool:
    """tau is a square mod N  <=>  a + 2b = 1 mod 4 where N = a^2 - 20 b^2."""
    rep = pell_rep(N, 1)
    return (rep.a + 2 * rep.b) % 4 == 1


def tau_is_square_euler(N: int, sqrt_5: int) -> bool:
    return legendre(tau_residue(sqrt_5, N), N, certified=True) == 1


@dataclass(frozen=True)
class PrimeCertificate:
    N: int
    sqrt_m1: int
    sqrt_5: int
    pell: PellRep
    tau_is_square: bool
    pi_split_ok: bool
    pi_residues: tuple[int, int] = field(default=(0, 0))

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "sqrt_m1": self.sqrt_m1,
            "sqrt_5": self.sqrt_5,
            "a": self.pell.a,
            "b": self.pell.b,
            "tau_is_square": self.tau_is_square,
            "pi_split_ok": self.pi_split_ok,
            "pi_residues": list(self.pi_residues),
        }


def _check_split_prime(p: int) -> None:
    if not is_prime(p) or p % 20 not in (1, 9):
        raise ValueError(f"p={p} must be a prime congruent to 1 or 9 mod 20")


def certify(N: int, pi_rep: Optional[PellRep] = None) -> PrimeCertificate:
    """Witnesses for N; pi_split_ok is False when no pi_rep is supplied."""
    sqrt_m1 = sqrt_mod(N - 1, N, certified=True)
    sqrt_5 = sqrt_mod(5, N, certified=True)
    if sqrt_m1 is None or sqrt_5 is None:
        raise ValueError(f"N={N}: -1 and 5 must both be squares")
    rep = pell_rep(N, 1)
    tau_ok = (rep.a + 2 * rep.b) % 4 == 1
    split_ok = False
    residues = (0, 0)
    if pi_rep is not None:
        residues = (pi_rep.residue(sqrt_5, N, 1), pi_rep.residue(sqrt_5, N, -1))
        split_ok = all(legendre(r, N, certified=True) == 1 for r in residues)
    return PrimeCertificate(N, sqrt_m1, sqrt_5, rep, tau_ok, split_ok, residues)


def scan_valid_N(p: int, limit: int) -> list[PrimeCertificate]:
    """Primes N <= limit, N != p, meeting both conditions for p."""
    _check_split_prime(p)
    pi_rep = pell_rep(p, 4)
    out = []
    for N in primes_upto(limit).tolist():
        if N == p or N % 20 not in (1, 9):
            continue
        cert = certify(N, pi_rep)
        if cert.tau_is_square and cert.pi_split_ok:
            out.append(cert)
    return out


@dataclass(frozen=True)
class LPSCertificate:
    N: int
    sqrt_m1: int
    roots: dict

    def to_dict(self) -> dict:
        return {"N": self.N, "sqrt_m1": self.sqrt_m1, "roots": {str(k): v for k, v in self.roots.items()}}


def scan_lps_N(ps: list[int], limit: int) -> list[LPSCertificate]:
    """Primes N = 1 mod 4, N not in ps, for which every p in ps is a square mod N."""
    for p in ps:
        if not is_prime(p) or p % 4 != 1:
            raise ValueError(f"p={p} must be a prime congruent to 1 mod 4")
    out = []
    for N in primes_upto(limit).tolist():
        if N % 4 != 1 or N in ps:
            continue
        roots = {p: sqrt_mod(p, N, certified=True) for p in ps}
        if all(r is not None for r in roots.values()):
            out.append(LPSCertificate(N, sqrt_mod(N - 1, N, certified=True), roots))
    return out


@dataclass(frozen=True)
class DensityReport:
    limit: int
    p: int
    primes: int
    in_class: int
    part1: int
    part2: int

    @property
    def class_fraction(self) -> float:
        return self.in_class / self.primes

    @property
    def part1_fraction(self) -> float:
        return self.part1 / self.primes

    @property
    def part2_fraction(self) -> float:
        return self.part2 / self.primes

    def to_dict(self) -> dict:
        return {
            "limit": self.limit,
            "p": self.p,
            "primes": self.primes,
            "in_class": self.in_class,
            "part1": self.part1,
            "part2": self.part2,
            "class_fraction": self.class_fraction,
            "part1_fraction": self.part1_fraction,
            "part2_fraction": self.part2_fraction,
        }


def density_report(limit: int, p: int = 29) -> DensityReport:
    """Empirical fractions of all primes <= limit passing each criterion."""
    if limit < 10**4:
        raise ValueError("limit must be at least 10^4")
    _check_split_prime(p)
    pi_rep = pell_rep(p, 4)
    primes = primes_upto(limit)
    in_class = part1 = part2 = 0
    for N in primes.tolist():
        if N % 20 not in (1, 9):
            continue
        in_class += 1
        if not tau_square_criterion(N):
            continue
        part1 += 1
        if N == p:
            continue
        s5 = sqrt_mod(5, N, certified=True)
        if all(legendre(pi_rep.residue(s5, N, sgn), N, certified=True) == 1 for sgn in (1, -1)):
            part2 += 1
    return DensityReport(limit, p, len(primes), in_class, part1, part2)
