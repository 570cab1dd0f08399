"""Quadratic Gauss sums, Ramanujan sums and the character sums C and C1.

Each quantity has a definition-level evaluator (a literal sum over residues)
and a closed form built from the Gauss-sum lemmas. Phases are reduced as
exact rationals mod 1 before exponentiation, so rounding error does not grow
with the size of the integer arguments.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from .modmath import (
    ModArithError,
    decompose_modulus,
    divisors,
    epsilon_unit,
    jacobi_symbol,
    mobius,
    mod_inverse,
    two_adic_split,
)

TWO_PI = 2.0 * math.pi


def unit(num: int, den: int) -> complex:
    """e(num/den) with the phase reduced mod 1 in exact arithmetic."""
    return cmath.exp(1j * TWO_PI * ((num % den) / den))


@lru_cache(maxsize=4096)
def roots_of_unity(c: int) -> np.ndarray:
    """Array w with w[j] = e(j/c)."""
    return np.exp(1j * TWO_PI * np.arange(c) / c)


@dataclass(frozen=True)
class GaussSumSpec:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.c < 1:
            raise ModArithError(f"modulus must be positive, got {self.c}")
        if gcd(self.a, self.c) != 1:
            raise ModArithError(f"gcd(a, c) must be 1, got a={self.a}, c={self.c}")


@dataclass(frozen=True)
class CharSumSpec:
    m: int
    n: int
    q: int
    p: int

    def __post_init__(self):
        if self.q < 1:
            raise ModArithError(f"q must be positive, got {self.q}")
        if self.q % self.p == 0 and self.q > 1:
            raise ModArithError(f"p={self.p} divides q={self.q}; only (p, q) = 1 is implemented")


# -- Gauss sums ---------------------------------------------------------------


def gauss_sum_bruteforce(spec: GaussSumSpec) -> complex:
    a, b, c = spec.a, spec.b, spec.c
    w = roots_of_unity(c)
    x = np.arange(c, dtype=np.int64)
    return complex(w[(a * x * x + b * x) % c].sum())


def _gauss_zero_over_sqrt(a: int, c: int) -> complex:
    """G(a, 0; c) / sqrt(c) for c odd or 4 | c (the cases with G(a,0;c) != 0)."""
    k, c0 = two_adic_split(c)
    if k == 0:
        return epsilon_unit(c) * jacobi_symbol(a, c)
    if k == 1:
        return 0j
    base = epsilon_unit(c0) * jacobi_symbol(a, c0)
    if k % 2 == 0:
        return base * (1 + unit(a * c0, 4))
    # the odd-k case carries a (2/c0) that is absent from the literature display
    return base * jacobi_symbol(2, c0) * math.sqrt(2.0) * unit(a * c0, 8)


def gauss_sum_closed(spec: GaussSumSpec) -> complex:
    """Closed-form G(a, b; c) by the parity case analysis."""
    a, b, c = spec.a, spec.b, spec.c
    if c == 1:
        return 1 + 0j
    k, c0 = two_adic_split(c)
    root = math.sqrt(c)
    if k == 0:
        return unit(-mod_inverse(4 * a, c) * b * b, c) * root * _gauss_zero_over_sqrt(a, c)
    if k == 1:
        r = c0
        if (a * r + b) % 2:
            return 0j
        if r == 1:
            return 2 + 0j
        return 2 * unit(-mod_inverse(8 * a, r) * b * b, r) * math.sqrt(r) * _gauss_zero_over_sqrt(2 * a, r)
    if b % 2:
        return 0j
    h = b // 2
    return unit(-mod_inverse(a, c) * h * h, c) * root * _gauss_zero_over_sqrt(a, c)


def units_mod(c: int) -> np.ndarray:
    a = np.arange(c, dtype=np.int64)
    return a[np.gcd(a, c) == 1]


def gauss_grid_bruteforce(c: int, b_values=None) -> tuple[np.ndarray, np.ndarray]:
    """All G(a, b; c) for units a mod c, by direct summation over x mod c.

    Returns (a_values, table) with table[i, j] = G(a_values[i], b_values[j]; c).
    Computed as the matrix product of e(a x^2/c) and e(b x/c); every entry is
    the literal sum over x.
    """
    if b_values is None:
        b_values = np.arange(c, dtype=np.int64)
    b_values = np.asarray(b_values, dtype=np.int64)
    w = roots_of_unity(c)
    a = units_mod(c)
    x = np.arange(c, dtype=np.int64)
    left = w[np.outer(a, x * x % c) % c]
    right = w[np.outer(x, b_values) % c]
    return a, left @ right


def gauss_grid_closed(c: int, b_values=None) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form counterpart of :func:`gauss_grid_bruteforce`, vectorised over b."""
    if b_values is None:
        b_values = np.arange(c, dtype=np.int64)
    b = np.asarray(b_values, dtype=np.int64)
    a_vals = units_mod(c)
    out = np.zeros((len(a_vals), len(b)), dtype=complex)
    if c == 1:
        out[:] = 1.0
        return a_vals, out
    k, c0 = two_adic_split(c)
    w = roots_of_unity(c)
    root = math.sqrt(c)
    if k == 0:
        for i, a in enumerate(a_vals):
            inv = mod_inverse(4 * int(a), c)
            out[i] = w[(-inv * (b * b % c)) % c] * (root * _gauss_zero_over_sqrt(int(a), c))
    elif k == 1:
        r = c0
        wr = roots_of_unity(r)
        for i, a in enumerate(a_vals):
            a = int(a)
            live = (a * r + b) % 2 == 0
            if r == 1:
                out[i, live] = 2.0
                continue
            inv = mod_inverse(8 * a, r)
            g0 = math.sqrt(r) * _gauss_zero_over_sqrt(2 * a, r)
            out[i, live] = 2 * wr[(-inv * (b[live] * b[live] % r)) % r] * g0
    else:
        live = b % 2 == 0
        h = b[live] // 2
        for i, a in enumerate(a_vals):
            a = int(a)
            inv = mod_inverse(a, c)
            out[i, live] = w[(-inv * (h * h % c)) % c] * (root * _gauss_zero_over_sqrt(a, c))
    return a_vals, out


# -- Ramanujan sums -----------------------------------------------------------


def ramanujan_sum(r: int, q: int) -> int:
    """S(r, 0; q) = sum over d | (r, q) of d * mu(q/d)."""
    if q < 1:
        raise ModArithError(f"q must be positive, got {q}")
    g = gcd(r, q)
    return sum(d * mobius(q // d) for d in divisors(g))


def ramanujan_sum_bruteforce(r: int, q: int) -> complex:
    w = roots_of_unity(q)
    a = units_mod(q)
    return complex(w[(a * r) % q].sum())


def ramanujan_vector(q: int, r_values: np.ndarray) -> np.ndarray:
    """Vectorised S(r, 0; q) over an integer array of r."""
    r = np.asarray(r_values, dtype=np.int64)
    out = np.zeros(r.shape, dtype=np.int64)
    for d in divisors(q):
        mu = mobius(q // d)
        if mu:
            out += np.where(r % d == 0, d * mu, 0)
    return out


# -- C1(l, q) = sum over a mod q of (a/q) e(al/q), q odd ------------------------


def charsum_C1_bruteforce(l: int, q: int) -> complex:
    if q < 1 or q % 2 == 0:
        raise ModArithError(f"C1 needs odd q, got {q}")
    w = roots_of_unity(q)
    return complex(sum(jacobi_symbol(a, q) * w[(a * l) % q] for a in range(q)))


@lru_cache(maxsize=None)
def _jacobi_table(q: int) -> np.ndarray:
    return np.array([jacobi_symbol(a, q) for a in range(q)], dtype=np.int64)


def charsum_C1_closed(l: int, q: int) -> complex:
    """S(l,0;q2) q1 eps_{q*} sqrt(q*) ((l/q1)/q*) if q1 | l, else 0."""
    if q < 1 or q % 2 == 0:
        raise ModArithError(f"C1 needs odd q, got {q}")
    dec = decompose_modulus(q)
    if l % dec.q1:
        return 0j
    s = ramanujan_sum(l, dec.q2)
    if s == 0:
        return 0j
    return s * dec.q1 * epsilon_unit(dec.q_star) * math.sqrt(dec.q_star) * jacobi_symbol(l // dec.q1, dec.q_star)


def charsum_C1_grid_bruteforce(q: int) -> np.ndarray:
    """C1(l, q) for l = 0..q-1 by direct summation."""
    chi = _jacobi_table(q).astype(float)
    w = roots_of_unity(q)
    idx = np.outer(np.arange(q, dtype=np.int64), np.arange(q, dtype=np.int64)) % q
    return chi @ w[idx]


def charsum_C1_grid_closed(q: int) -> np.ndarray:
    dec = decompose_modulus(q)
    l = np.arange(q, dtype=np.int64)
    out = np.zeros(q, dtype=complex)
    live = l % dec.q1 == 0
    chi = _jacobi_table(dec.q_star)
    s = ramanujan_vector(dec.q2, l[live])
    scale = dec.q1 * epsilon_unit(dec.q_star) * math.sqrt(dec.q_star)
    out[live] = s * chi[(l[live] // dec.q1) % dec.q_star] * scale
    return out


# -- C(m, n, q) = (1/q) sum*_{a mod q} G(a, n; q) e(conj(a p) m / q) ------------------


def charsum_C_bruteforce(spec: CharSumSpec) -> complex:
    m, n, q, p = spec.m, spec.n, spec.q, spec.p
    total = 0j
    for a in units_mod(q):
        a = int(a)
        g = gauss_sum_bruteforce(GaussSumSpec(a, n, q))
        total += g * unit(mod_inverse(a * p, q) * m, q)
    return total / q


def charsum_C_grid_bruteforce(q: int, p: int, m_values, n_values) -> np.ndarray:
    """table[i, j] = C(m_i, n_j, q) by direct summation."""
    m = np.asarray(m_values, dtype=np.int64)
    a_vals, g = gauss_grid_bruteforce(q, n_values)
    inv_ap = np.array([mod_inverse(int(a) * p, q) for a in a_vals], dtype=np.int64)
    twist = roots_of_unity(q)[np.outer(m, inv_ap) % q]
    return twist @ g / q


def half_modulus_inverse(a: int, r: int) -> int:
    """Inverse of odd a mod 2r (r odd) via conj(a) = 2 conj(2a)_r + r (mod 2r)."""
    if r % 2 == 0 or a % 2 == 0:
        raise ModArithError("half_modulus_inverse needs odd a and odd r")
    return (2 * mod_inverse(2 * a, r) + r) % (2 * r)


def _two_power_factor(l: int, p: int, k: int) -> complex:
    """The b mod 2^k sum left after CRT in the 4 | q case (units tracked)."""
    mod = 2**k
    if k % 2 == 0:
        return ramanujan_sum(l, mod) + ramanujan_sum(l + p * 2 ** (k - 2), mod)
    return math.sqrt(2.0) * ramanujan_sum(l + p * 2 ** (k - 3), mod)


def charsum_C_closed(spec: CharSumSpec, track_units: bool = True) -> complex:
    """Closed form for C(m, n, q), covering q odd, 2 || q and 4 | q.

    With ``track_units`` the unimodular constants (eps factors and signs) are
    kept, giving exact agreement with the definition. With
    it off, the reduced forms as they are usually displayed are returned; see
    :func:`charsum_C_display`.
    """
    if not track_units:
        return charsum_C_display(spec)
    m, n, q, p = spec.m, spec.n, spec.q, spec.p
    if q == 1:
        return 1 + 0j
    k, q0 = two_adic_split(q)
    if k == 0:
        c1 = charsum_C1_closed(4 * m - p * n * n, q)
        return epsilon_unit(q) * jacobi_symbol(p, q) * c1 / math.sqrt(q)
    if k == 1:
        if n % 2 == 0:
            return 0j
        sign = -1 if m % 2 else 1
        c1 = charsum_C1_closed(4 * m - p * n * n, q0)
        return sign * epsilon_unit(q0) * jacobi_symbol(p, q0) * c1 / math.sqrt(q0)
    if n % 2:
        return 0j
    l = m - p * (n // 2) ** 2
    c1 = charsum_C1_closed(l, q0)
    if c1 == 0:
        return 0j
    # for odd k the (2/q0) of G(a,0;q) cancels the (2/q0)^k from inverting 2^k mod q0
    front = epsilon_unit(q0) * jacobi_symbol(p, q0) / math.sqrt(q)
    return front * c1 * _two_power_factor(l, p, k)


def charsum_C_display(spec: CharSumSpec) -> complex:
    """The reduced forms exactly as displayed in the derivation, without unit tracking.

    q odd:  (p/q) C1(4m - p n^2, q) / sqrt(q)
    2 || q: 2 (p/q0) e(pm/2) C1(4m - p n^2, q0) / sqrt(q0)
    4 | q:  eps_{q0} (p/q0) C1(l, q0) / sqrt(q) times
            S(l,0;2^k) + S(p+l,0;4) 2^(k-2) [2^(k-2) | l]   (k even)
            S(p+l,0;8) 2^(k-3) [2^(k-3) | l]                (k odd)
    with l = m - p (n/2)^2 (n/2 taken literally as a rational when n is odd).
    """
    m, n, q, p = spec.m, spec.n, spec.q, spec.p
    if q == 1:
        return 1 + 0j
    k, q0 = two_adic_split(q)
    if k == 0:
        return jacobi_symbol(p, q) * charsum_C1_closed(4 * m - p * n * n, q) / math.sqrt(q)
    if k == 1:
        return 2 * jacobi_symbol(p, q0) * unit(p * m, 2) * charsum_C1_closed(4 * m - p * n * n, q0) / math.sqrt(q0)
    if n % 2:
        return 0j
    l = m - p * (n // 2) ** 2
    front = epsilon_unit(q0) * jacobi_symbol(p, q0) * charsum_C1_closed(l, q0) / math.sqrt(q)
    if k % 2 == 0:
        extra = ramanujan_sum(p + l, 4) * 2 ** (k - 2) if l % 2 ** (k - 2) == 0 else 0
        return front * (ramanujan_sum(l, 2**k) + extra)
    extra = ramanujan_sum(p + l, 8) * 2 ** (k - 3) if l % 2 ** (k - 3) == 0 else 0
    return front * extra
