"""Generate normalised Hecke eigenvalue tables for weight-2 newforms of prime level.

The newforms are those of the elliptic curves 11a1, 17a1 and 19a1. Their
eigenvalues are a_p = p + 1 - #E(F_p) (this holds at the bad prime as well),
extended to all n <= n_max by multiplicativity and the Hecke recursion, and
written as lambda(n) = a(n) / sqrt(n).

usage: python3 tools/make_coefficients.py [--n-max 131072] [--out src/symsq/data]
"""

from __future__ import annotations

import argparse
import math
from pathlib import Path

import numpy as np

CURVES = {
    # label: (level, [a1, a2, a3, a4, a6])
    "11a1": (11, [0, -1, 1, -10, -20]),
    "17a1": (17, [1, -1, 1, -1, -14]),
    "19a1": (19, [0, 1, 1, -9, -15]),
}

LMFDB_LABEL = {"11a1": "11.2.a.a", "17a1": "17.2.a.a", "19a1": "19.2.a.a"}


def primes_upto(n: int) -> np.ndarray:
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.nonzero(sieve)[0]


def count_points(ainv, p: int) -> int:
    """#E(F_p) including the point at infinity."""
    a1, a2, a3, a4, a6 = ainv
    if p == 2:
        pts = 1
        for x in range(2):
            for y in range(2):
                if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % 2 == 0:
                    pts += 1
        return pts
    # (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    x = np.arange(p, dtype=np.int64)
    rhs = (((4 * x + b2) % p * x % p + 2 * b4) % p * x + b6) % p
    chi = np.full(p, -1, dtype=np.int64)
    chi[(x * x) % p] = 1
    chi[0] = 0
    return p + 1 + int(chi[rhs].sum())


def hecke_table(level: int, ainv, n_max: int) -> np.ndarray:
    """Integer a(n) for 1 <= n <= n_max (index 0 unused)."""
    a = np.zeros(n_max + 1, dtype=object)
    a[1] = 1
    ps = primes_upto(n_max)
    prime_power = {}
    for p in map(int, ps):
        ap = p + 1 - count_points(ainv, p)
        pk = [1, ap]
        pw = p
        while pw * p <= n_max:
            if p == level:
                pk.append(pk[-1] * ap)
            else:
                pk.append(ap * pk[-1] - p * pk[-2])
            pw *= p
        prime_power[p] = pk
    # smallest prime factor sieve
    spf = np.zeros(n_max + 1, dtype=np.int64)
    for p in map(int, ps):
        block = spf[p::p]
        block[block == 0] = p
    for n in range(2, n_max + 1):
        p = int(spf[n])
        m, k = n, 0
        while m % p == 0:
            m //= p
            k += 1
        a[n] = prime_power[p][k] * a[m]
    return a


def write_table(path: Path, label: str, level: int, a: np.ndarray) -> None:
    lines = [
        f"# label={label}",
        f"# lmfdb={LMFDB_LABEL[label]}",
        f"# level={level}",
        "# weight=2",
        "# normalization=deligne",
        "# source=point counts a_p = p + 1 - #E(F_p), Hecke recursion",
    ]
    for n in range(1, len(a)):
        lines.append(f"{n} {repr(int(a[n]) / math.sqrt(n))}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=131072)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "src" / "symsq" / "data")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for label, (level, ainv) in CURVES.items():
        a = hecke_table(level, ainv, args.n_max)
        write_table(args.out / f"{LMFDB_LABEL[label]}.txt", label, level, a)
        print(label, "a(2..7) =", [int(a[n]) for n in range(2, 8)])


if __name__ == "__main__":
    main()
