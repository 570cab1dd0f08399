"""Exact integer and modular arithmetic.

Everything here works on Python ints; moduli in the verification grids are
small (well below 10**6), so trial division is all the factoring we need.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt


class ModArithError(ValueError):
    """Raised for inputs outside an operation's domain."""


@dataclass(frozen=True)
class FactoredInteger:
    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, k in self.factors:
            if p <= last or k < 1:
                raise ModArithError(f"bad factor list {self.factors}")
            last = p
            prod *= p**k
        if prod != self.value:
            raise ModArithError(f"factors {self.factors} do not multiply to {self.value}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)


@dataclass(frozen=True)
class ModulusDecomposition:
    """q = q_star * q0**2 with q0**2 = q1 * q2, q1 | q_star**inf, (q2, q_star) = 1."""

    q: int
    q_star: int
    q0: int
    q1: int
    q2: int


@lru_cache(maxsize=65536)
def factorize(n: int) -> FactoredInteger:
    """Trial division with a 2-3-5 wheel."""
    if n < 1:
        raise ModArithError(f"cannot factor {n}")
    m = n
    out = []
    for p in (2, 3, 5):
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            out.append((p, k))
    steps = (4, 2, 4, 2, 4, 6, 2, 6)
    d, i = 7, 0
    while d * d <= m:
        if m % d == 0:
            k = 0
            while m % d == 0:
                m //= d
                k += 1
            out.append((d, k))
        d += steps[i]
        i = (i + 1) & 7
    if m > 1:
        out.append((m, 1))
    return FactoredInteger(n, tuple(out))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = factorize(n).factors
    return len(f) == 1 and f[0][1] == 1


def mod_inverse(a: int, q: int) -> int:
    if q < 1:
        raise ModArithError(f"modulus must be positive, got {q}")
    if gcd(a, q) != 1:
        raise ModArithError(f"{a} is not invertible mod {q}")
    if q == 1:
        return 0
    return pow(a, -1, q)


def jacobi_symbol(a: int, q: int) -> int:
    """Jacobi symbol (a/q) for odd q >= 1; any integer a, including negative."""
    if q < 1 or q % 2 == 0:
        raise ModArithError(f"Jacobi symbol needs odd positive modulus, got {q}")
    a %= q
    t = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if q % 8 in (3, 5):
                t = -t
        a, q = q, a
        if a % 4 == 3 and q % 4 == 3:
            t = -t
        a %= q
    return t if q == 1 else 0


def kronecker_minus_one(q: int) -> int:
    """(-1/q) = (-1)**((q-1)/2); the sign convention used for negative arguments."""
    if q < 1 or q % 2 == 0:
        raise ModArithError(f"odd positive modulus required, got {q}")
    return 1 if q % 4 == 1 else -1


def decompose_modulus(q: int) -> ModulusDecomposition:
    if q < 1 or q % 2 == 0:
        raise ModArithError(f"decompose_modulus needs odd q >= 1, got {q}")
    q_star = q0 = 1
    for p, k in factorize(q).factors:
        if k % 2:
            q_star *= p
        q0 *= p ** (k // 2)
    q1 = 1
    for p, k in factorize(q0 * q0).factors if q0 > 1 else ():
        if q_star % p == 0:
            q1 *= p**k
    q2 = q0 * q0 // q1
    return ModulusDecomposition(q, q_star, q0, q1, q2)


def epsilon_unit(c: int) -> complex:
    if c < 1 or c % 2 == 0:
        raise ModArithError(f"epsilon_c needs odd positive c, got {c}")
    return 1 + 0j if c % 4 == 1 else 1j


def mobius(n: int) -> int:
    if n < 1:
        raise ModArithError(f"mobius needs n >= 1, got {n}")
    f = factorize(n).factors
    if any(k > 1 for _, k in f):
        return 0
    return -1 if len(f) % 2 else 1


def totient(n: int) -> int:
    if n < 1:
        raise ModArithError(f"totient needs n >= 1, got {n}")
    out = n
    for p, _ in factorize(n).factors:
        out = out // p * (p - 1)
    return out


def arith_functions(n: int) -> tuple[int, int]:
    """(mobius(n), totient(n))."""
    return mobius(n), totient(n)


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, k in factorize(n).factors:
        divs = [d * p**j for d in divs for j in range(k + 1)]
    return sorted(divs)


def is_squarefree(n: int) -> bool:
    return n != 0 and all(k == 1 for _, k in factorize(abs(n)).factors)


def squarefree_decomposition(d: int) -> tuple[int, int]:
    """Write a nonzero integer d as theta * r**2 with theta signed square-free, r >= 1."""
    if d == 0:
        raise ModArithError("zero has no square-free decomposition")
    theta = -1 if d < 0 else 1
    r = 1
    for p, k in factorize(abs(d)).factors:
        if k % 2:
            theta *= p
        r *= p ** (k // 2)
    return theta, r


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def two_adic_split(c: int) -> tuple[int, int]:
    """c = 2**k * c0 with c0 odd; returns (k, c0)."""
    if c < 1:
        raise ModArithError(f"positive integer required, got {c}")
    k = (c & -c).bit_length() - 1
    return k, c >> k
