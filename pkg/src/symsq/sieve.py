"""Quadratic large sieve checks and exhaustive quadruple counts.

Large sieve: for coefficients a_1..a_N,

    sum*_{q <= Q} |sum_n a_n (n/q)|^2  <<  (Q + N) sum_{n1 n2 = square} |a_{n1} a_{n2}|,

the outer sum over odd square-free q. The ratio of the two sides is measured
(the epsilon-power is set to 1).

Quadruples: (n1, n2, m1, m2) with d_i = p n_i^2 - 4 m_i divisible by D and
d1 d2 a perfect square (zero included). Counted twice: by pairwise products,
and by writing d_i = D theta r_i^2 with theta square-free and solving for m_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .modmath import is_prime, is_squarefree, jacobi_symbol
from .report import VerificationReport


class BudgetExceeded(ValueError):
    """The enumeration would exceed its configured size."""


# ---------------------------------------------------------------- large sieve


@dataclass
class SieveInstance:
    Q: int
    N: int
    a: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        if self.Q < 1 or self.N < 1:
            raise ValueError("Q and N must be >= 1")
        self.a = np.asarray(self.a, dtype=complex)
        if self.a.shape != (self.N,):
            raise ValueError(f"need {self.N} coefficients, got {self.a.shape}")
        if not np.all(np.isfinite(self.a)):
            raise ValueError("coefficients must be finite")


@dataclass
class SieveResult:
    lhs: float
    rhs: float
    ratio: float


def odd_squarefree_upto(Q: int) -> list[int]:
    return [q for q in range(1, Q + 1, 2) if is_squarefree(q)]


_CHAR_CACHE: dict[tuple[int, int], np.ndarray] = {}


def jacobi_matrix(Q: int, N: int) -> np.ndarray:
    """Rows (n/q) for odd square-free q <= Q, columns n = 1..N."""
    key = (Q, N)
    if key not in _CHAR_CACHE:
        qs = odd_squarefree_upto(Q)
        M = np.empty((len(qs), N))
        for i, q in enumerate(qs):
            row = np.array([jacobi_symbol(r, q) for r in range(q)], dtype=float)
            M[i] = row[np.arange(1, N + 1) % q]
        _CHAR_CACHE[key] = M
    return _CHAR_CACHE[key]


def squarefree_kernel(n: np.ndarray) -> np.ndarray:
    """Signed square-free part of each nonzero entry (0 stays 0)."""
    n = np.asarray(n, dtype=np.int64)
    out = np.abs(n).copy()
    top = int(out.max(initial=0))
    k = 2
    while k * k <= top:
        sq = k * k
        while True:
            hit = (out % sq == 0) & (out > 0)
            if not hit.any():
                break
            out[hit] //= sq
        k += 1
    return np.sign(n) * out


def square_pair_mass(a: np.ndarray) -> float:
    """sum over n1 n2 = square of |a_n1 a_n2| (indices n = 1..N)."""
    w = np.abs(np.asarray(a))
    kern = squarefree_kernel(np.arange(1, w.size + 1))
    mass = np.bincount(kern, weights=w)
    return float(np.sum(mass * mass))


def large_sieve_check(instance: SieveInstance) -> SieveResult:
    a = instance.a
    chi = jacobi_matrix(instance.Q, instance.N)
    lhs = float(np.sum(np.abs(chi @ a) ** 2))
    rhs = (instance.Q + instance.N) * square_pair_mass(a)
    ratio = lhs / rhs if rhs > 0 else 0.0
    return SieveResult(lhs, rhs, ratio)


def random_instances(Q: int, N: int, count: int, seed: int) -> list[SieveInstance]:
    """Unit-modulus coefficients e(theta_n) with theta_n uniform, from one seeded stream."""
    rng = np.random.default_rng(seed)
    return [SieveInstance(Q, N, np.exp(2j * math.pi * rng.random(N)), seed) for _ in range(count)]


def large_sieve_sweep(
    grid=((64, 64), (256, 256), (64, 512), (256, 512)),
    count: int = 200,
    seed: int = 7,
    bound: float = 10.0,
) -> VerificationReport:
    rep = VerificationReport("sieve-check", settings={"seed": seed, "count": count, "bound": bound})
    for Q, N in grid:
        res = [large_sieve_check(inst) for inst in random_instances(Q, N, count, seed)]
        worst = max(r.ratio for r in res)
        rep.add(
            "sieve.ratio_max",
            {"Q": Q, "N": N, "count": count, "seed": seed, "bound": bound},
            worst,
            bound,
            worst <= bound,
            topic="quadratic large sieve",
        )
    # a = indicator of n = 1 with N = 1: lhs counts the moduli, rhs = Q + 1
    r = large_sieve_check(SieveInstance(20, 1, np.ones(1, dtype=complex)))
    expected = len([q for q in range(1, 21) if q % 2 and all(q % (k * k) for k in range(2, 5))])
    rep.add(
        "sieve.indicator",
        {"Q": 20, "N": 1, "rhs": r.rhs, "ratio": r.ratio, "oracle": "listing of odd square-free q <= 20"},
        r.lhs,
        expected,
        r.lhs == expected and r.ratio < 1,
        topic="quadratic large sieve",
    )
    return rep


# ---------------------------------------------------------------- quadruples


@dataclass(frozen=True)
class QuadrupleCountSpec:
    p: int
    m_range: tuple[int, int]  # inclusive
    n_range: tuple[int, int]  # inclusive
    D: int = 1
    budget: int = 10**8

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.D < 1:
            raise ValueError("D must be positive")
        for lo, hi in (self.m_range, self.n_range):
            if lo > hi:
                raise ValueError("empty range")
        if self.size**2 > self.budget:
            raise BudgetExceeded(f"{self.size**2} quadruples exceed the budget {self.budget}")

    @property
    def size(self) -> int:
        (m0, m1), (n0, n1) = self.m_range, self.n_range
        return (m1 - m0 + 1) * (n1 - n0 + 1)


@dataclass
class QuadrupleCount:
    direct: int
    represented: int
    points: int  # (n, m) pairs with D | d
    d_span: int  # max |d| over the box
    equal_d_pairs: list = field(default_factory=list)  # (n1, m1, n2, m2), n1 != n2


def _d_values(spec: QuadrupleCountSpec):
    n = np.arange(spec.n_range[0], spec.n_range[1] + 1, dtype=np.int64)
    m = np.arange(spec.m_range[0], spec.m_range[1] + 1, dtype=np.int64)
    nn, mm = np.meshgrid(n, m, indexing="ij")
    d = spec.p * nn * nn - 4 * mm
    keep = d % spec.D == 0
    return nn[keep], mm[keep], d[keep], int(np.abs(d).max())


def count_direct(spec: QuadrupleCountSpec, block: int = 2048) -> int:
    """Ordered pairs of (n, m) points whose d-product is a perfect square."""
    _, _, d, _ = _d_values(spec)
    total = 0
    for a in range(0, d.size, block):
        prod = d[a : a + block, None] * d[None, :]
        ok = prod >= 0
        r = np.rint(np.sqrt(np.where(ok, prod, 0).astype(float))).astype(np.int64)
        total += int(np.count_nonzero(ok & (r * r == prod)))
    return total


def count_represented(spec: QuadrupleCountSpec) -> int:
    """Same count via d = D theta r^2 with theta square-free, solving m = (p n^2 - D theta r^2)/4.

    For each theta, c_theta counts (n, r) giving an admissible m; points with
    the same theta pair up, so the nonzero part is sum c_theta^2. Points with
    d = 0 pair with every point.
    """
    p, D = spec.p, spec.D
    (m_lo, m_hi), (n_lo, n_hi) = spec.m_range, spec.n_range
    n = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    pn2 = p * n * n
    d_top = max(abs(int(pn2.max()) - 4 * m_lo), abs(int(pn2.min()) - 4 * m_hi), abs(int(pn2.max()) - 4 * m_hi), abs(int(pn2.min()) - 4 * m_lo))
    T = d_top // D
    nonzero = 0
    for theta in range(-T, T + 1):
        if theta == 0 or not is_squarefree(abs(theta)):
            continue
        r = np.arange(1, math.isqrt(T // abs(theta)) + 1, dtype=np.int64)
        if r.size == 0:
            continue
        num = pn2[:, None] - D * theta * r[None, :] ** 2
        ok = (num % 4 == 0) & (num >= 4 * m_lo) & (num <= 4 * m_hi)
        c = int(np.count_nonzero(ok))
        nonzero += c * c
    zero = int(np.count_nonzero((pn2 % 4 == 0) & (pn2 >= 4 * m_lo) & (pn2 <= 4 * m_hi)))
    points = len(_d_values(spec)[2])
    return nonzero + 2 * zero * points - zero * zero


def equal_d_pairs(spec: QuadrupleCountSpec) -> list[tuple[int, int, int, int]]:
    nn, mm, d, _ = _d_values(spec)
    order = np.argsort(d, kind="stable")
    nn, mm, d = nn[order], mm[order], d[order]
    out = []
    starts = np.flatnonzero(np.r_[True, d[1:] != d[:-1]])
    ends = np.r_[starts[1:], d.size]
    for s, e in zip(starts, ends):
        if e - s < 2:
            continue
        for i in range(s, e):
            for j in range(s, e):
                if nn[i] != nn[j]:
                    out.append((int(nn[i]), int(mm[i]), int(nn[j]), int(mm[j])))
    return out


def quadruple_count(spec: QuadrupleCountSpec) -> QuadrupleCount:
    _, _, d, span = _d_values(spec)
    return QuadrupleCount(count_direct(spec), count_represented(spec), int(d.size), span, equal_d_pairs(spec))


def dyadic_spec(p: int, t: float, K: float, D: int = 1) -> QuadrupleCountSpec:
    """n in [N0, 2 N0] with N0 = t/sqrt K, m in [pK, 2pK]."""
    n0 = t / math.sqrt(K)
    return QuadrupleCountSpec(p, (int(p * K), int(2 * p * K)), (math.ceil(n0), math.floor(2 * n0)), D)


@dataclass
class LocalizationReport:
    max_ratio: float  # max |n1 - n2| t / K^(3/2) over equal-d pairs
    pairs: int
    bound: float


def pair_localization_check(p: int, K: float, t: float, spec: QuadrupleCountSpec | None = None, c: float = 4.0) -> LocalizationReport:
    """Every off-diagonal pair with equal d must have |n1 - n2| <= c K^(3/2)/t."""
    spec = spec or dyadic_spec(p, t, K)
    pairs = equal_d_pairs(spec)
    scale = K**1.5 / t
    worst = max((abs(a - b) / scale for a, _, b, _ in pairs), default=0.0)
    return LocalizationReport(worst, len(pairs), c)


def quadruple_report(
    p: int = 11,
    t: float = 64.0,
    Ks=(16.0, 32.0),
    slack: float = 20.0,
    c: float = 4.0,
) -> VerificationReport:
    rep = VerificationReport("count-quadruples", settings={"slack": slack, "c": c})
    for K in Ks:
        spec = dyadic_spec(p, t, K)
        res = quadruple_count(spec)
        info = {"p": p, "t": t, "K": K, "n_range": spec.n_range, "m_range": spec.m_range, "D": spec.D, "d_span": res.d_span}
        rep.add("quad.routes", info, res.direct, res.represented, res.direct == res.represented, topic="quadruple count")
        rep.add(
            "quad.bound",
            {**info, "slack": slack},
            res.direct,
            slack * p * K * K,
            res.direct <= slack * p * K * K,
            topic="quadruple count vs p K^2",
        )
        loc = pair_localization_check(p, K, t, spec, c)
        rep.add(
            "quad.localization",
            {**info, "pairs": loc.pairs, "c": c},
            loc.max_ratio,
            c,
            loc.max_ratio <= c,
            topic="n1 - n2 localization",
        )
    return rep
