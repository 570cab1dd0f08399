"""Newform coefficients and the symmetric-square L-function.

For a weight-k newform f of prime level p with normalised eigenvalues
lambda(n),

    L(s, sym^2 f) = zeta^(p)(2s) sum_n lambda(n^2) n^-s = sum_n b(n) n^-s,
    b(n) = sum_{d^2 m = n, p does not divide d} lambda(m^2),

with Euler factors (1 - lambda(q^2) q^-s + lambda(q^2) q^-2s - q^-3s)^-1 at
q != p and (1 - p^(-s-1))^-1 at p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import special

from .modmath import factorize, is_prime
from .params import ParameterBox
from .weights import V_weight, WeightSpec, plateau_weight

HECKE_TOL = 1e-10
LEVEL_TOL = 1e-8


class CoefficientError(ValueError):
    """A coefficient file or table violates a required relation."""


class InsufficientCoefficients(CoefficientError):
    def __init__(self, needed: int, have: int, what: str = "coefficients"):
        super().__init__(f"{what} needs lambda(n) up to n = {needed}; table stops at {have}")
        self.needed = needed
        self.have = have


def _primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.nonzero(sieve)[0]


def _smallest_prime_factor(n: int) -> np.ndarray:
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in map(int, _primes_upto(n)):
        block = spf[p::p]
        block[block == 0] = p
    return spf


@dataclass
class CoefficientTable:
    """lambda(n) for 1 <= n <= n_max, Deligne-normalised (|lambda(q)| <= 2)."""

    level: int
    weight: int
    values: np.ndarray  # index n, entry 0 unused
    label: str = ""
    normalization: str = "deligne"
    meta: dict = field(default_factory=dict)

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def __call__(self, n: int) -> float:
        """lambda(n); beyond n_max it is rebuilt from prime values by multiplicativity."""
        if n < 1:
            raise ValueError("n must be positive")
        if n <= self.n_max:
            return float(self.values[n])
        out = 1.0
        for p, k in factorize(n).factors:
            out *= self.prime_power(p, k)
        return out

    def prime_power(self, p: int, k: int) -> float:
        if p ** k <= self.n_max:
            return float(self.values[p**k])
        if p > self.n_max:
            raise InsufficientCoefficients(p, self.n_max, f"lambda({p}^{k})")
        lp = float(self.values[p])
        if p == self.level:
            return lp**k
        prev, cur = 1.0, lp
        for _ in range(k - 1):
            prev, cur = cur, lp * cur - prev
        return cur

    def square_values(self, X: int) -> np.ndarray:
        """lambda(m^2) for 0 <= m <= X (entry 0 unused), via a prime-factor sieve."""
        if X > self.n_max:
            raise InsufficientCoefficients(X, self.n_max, f"lambda(m^2) for m <= {X}")
        spf = _smallest_prime_factor(X)
        out = np.zeros(X + 1)
        if X >= 1:
            out[1] = 1.0
        cache: dict[tuple[int, int], float] = {}
        for m in range(2, X + 1):
            p = int(spf[m])
            r, k = m, 0
            while r % p == 0:
                r //= p
                k += 1
            key = (p, 2 * k)
            if key not in cache:
                cache[key] = self.prime_power(p, 2 * k)
            out[m] = cache[key] * out[r]
        return out

    def validate(self) -> None:
        """Check every invariant; raise CoefficientError naming the first violation."""
        v = self.values
        n_max = self.n_max
        if n_max < 1 or v[1] != 1.0:
            raise CoefficientError(f"lambda(1) = {v[1] if n_max >= 1 else None}, expected 1")
        if not np.all(np.isfinite(v[1:])):
            raise CoefficientError("non-finite coefficient")
        p = self.level
        for q in map(int, _primes_upto(n_max)):
            lq = v[q]
            if q == p:
                if abs(lq * lq - 1.0 / p) > LEVEL_TOL:
                    raise CoefficientError(f"lambda({p})^2 = {lq * lq:.12g}, expected 1/{p}")
            elif abs(lq) > 2.0 + HECKE_TOL:
                raise CoefficientError(f"|lambda({q})| = {abs(lq):.12g} exceeds 2")
            prev, cur, qk = 1.0, lq, q
            while qk * q <= n_max:
                nxt = lq * cur if q == p else lq * cur - prev
                qk *= q
                if abs(v[qk] - nxt) > HECKE_TOL:
                    rel = f"lambda({q})^j" if q == p else "Hecke recursion"
                    raise CoefficientError(f"{rel} fails at n = {qk}: {v[qk]!r} vs {nxt!r}")
                prev, cur = cur, nxt
        spf = _smallest_prime_factor(n_max)
        for n in range(2, n_max + 1):
            q = int(spf[n])
            qk = 1
            while n % (qk * q) == 0:
                qk *= q
            r = n // qk
            if r > 1 and abs(v[n] - v[qk] * v[r]) > HECKE_TOL:
                raise CoefficientError(f"multiplicativity fails: lambda({n}) != lambda({qk}) lambda({r})")


def parse_coefficients(text: str, source: str = "<string>") -> CoefficientTable:
    meta: dict[str, str] = {}
    pairs: dict[int, float] = {}
    for lineno, raw in enumerate(text.split("\n"), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, _, val = body.partition("=")
                meta[k.strip()] = val.strip()
            continue
        parts = line.split()
        if len(parts) != 2:
            raise CoefficientError(f"{source}:{lineno}: malformed line {raw!r}")
        try:
            n = int(parts[0])
            val = float(parts[1])
        except ValueError as exc:
            raise CoefficientError(f"{source}:{lineno}: malformed line {raw!r}") from exc
        if n < 1 or n in pairs:
            raise CoefficientError(f"{source}:{lineno}: bad or repeated index {n}")
        pairs[n] = val
    for key in ("level", "weight", "normalization"):
        if key not in meta:
            raise CoefficientError(f"{source}: header lacks {key}=")
    if meta["normalization"] != "deligne":
        raise CoefficientError(f"{source}: unsupported normalization {meta['normalization']!r}")
    level, weight = int(meta["level"]), int(meta["weight"])
    if not is_prime(level):
        raise CoefficientError(f"{source}: level {level} is not prime")
    if weight < 2 or weight % 2:
        raise CoefficientError(f"{source}: weight {weight} is not an even integer >= 2")
    if 1 not in pairs:
        raise CoefficientError(f"{source}: missing lambda(1)")
    n_max = max(pairs)
    if len(pairs) != n_max:
        missing = next(n for n in range(1, n_max + 1) if n not in pairs)
        raise CoefficientError(f"{source}: missing lambda({missing})")
    values = np.zeros(n_max + 1)
    for n, val in pairs.items():
        values[n] = val
    return CoefficientTable(level, weight, values, meta.get("label", ""), "deligne", meta)


def load_coefficients(source, validate: bool = True) -> CoefficientTable:
    """Read and validate a coefficient file (path or builtin name such as "11.2.a.a")."""
    path = Path(source)
    if not path.exists():
        builtin = resources.files("symsq") / "data" / f"{source}.txt"
        if not builtin.is_file():
            raise FileNotFoundError(source)
        text = builtin.read_text(encoding="utf-8")
    else:
        text = path.read_text(encoding="utf-8")
    table = parse_coefficients(text, str(source))
    if validate:
        table.validate()
    return table


BUILTIN_TABLES = ("11.2.a.a", "17.2.a.a", "19.2.a.a")


def zero_table(level: int = 11, weight: int = 2, n_max: int = 100) -> CoefficientTable:
    """lambda = 0 except lambda(1) = 1 (a test table; not a newform)."""
    v = np.zeros(n_max + 1)
    v[1] = 1.0
    return CoefficientTable(level, weight, v, "delta-1")


# ---------------------------------------------------------------- sym^2


@dataclass
class SymSquareSeries:
    b: np.ndarray  # index n, entry 0 unused
    level: int
    weight: int
    source: str = ""

    @property
    def length(self) -> int:
        return len(self.b) - 1


def sym_square_coeffs(table: CoefficientTable, X: int) -> SymSquareSeries:
    sq = table.square_values(X)
    b = sq.copy()
    p = table.level
    d = 2
    while d * d <= X:
        if d % p:
            b[d * d :: d * d] += sq[1 : X // (d * d) + 1]
        d += 1
    return SymSquareSeries(b, table.level, table.weight, table.label)


def series_from_values(b, level: int, weight: int) -> SymSquareSeries:
    arr = np.zeros(len(b) + 1)
    arr[1:] = b
    return SymSquareSeries(arr, level, weight, "explicit")


def euler_product(table: CoefficientTable, s: complex, prime_bound: int) -> complex:
    """Product of local factors over primes <= prime_bound."""
    s = complex(s)
    out = 1.0 + 0j
    for q in map(int, _primes_upto(prime_bound)):
        out *= local_factor(table, q, s)
    return out


def local_factor(table: CoefficientTable, q: int, s: complex) -> complex:
    x = complex(q) ** (-s)
    if q == table.level:
        return 1.0 / (1.0 - x / q)
    l2 = table.prime_power(q, 2)
    return 1.0 / (1.0 - l2 * x + l2 * x * x - x**3)


def dirichlet_partial(series: SymSquareSeries, s: complex, X: int | None = None) -> complex:
    X = series.length if X is None else X
    n = np.arange(1, X + 1, dtype=float)
    return complex(np.sum(series.b[1 : X + 1] * np.exp(-complex(s) * np.log(n))))


def default_smoothing() -> WeightSpec:
    """1 on [0, 1], 0 from 2 on."""
    return plateau_weight(-1.0, 0.0, 1.0, 2.0)


def exp_smoothing(power: float = 2.0) -> WeightSpec:
    """exp(-x^power), cut where it drops below 1e-16.

    Its Mellin transform is Gamma(w/power)/power, which decays exponentially
    in vertical strips; the smoothed sum then converges quickly inside the
    critical strip.
    """
    reach = (16 * math.log(10)) ** (1.0 / power)
    return WeightSpec(
        lambda x: np.where(np.asarray(x) < reach, np.exp(-np.abs(np.asarray(x, dtype=float)) ** power), 0.0),
        (0.0, reach),
        f"exp(-x^{power:g})",
    )


def L_value(series: SymSquareSeries, s: complex, smoothing: WeightSpec | None = None, X: float | None = None) -> complex:
    """sum b(n) n^-s V0(n/X); V0 defaults to :func:`default_smoothing`.

    X defaults to the largest value the series supports. Inside the critical
    strip this is a heuristic value (no proved tail bound).
    """
    V0 = smoothing or default_smoothing()
    reach = V0.support[1]
    if X is None:
        X = series.length / reach
    top = int(math.floor(reach * X))
    if top > series.length:
        raise InsufficientCoefficients(top, series.length, f"L_value with cutoff X = {X:g}")
    n = np.arange(1, top + 1, dtype=float)
    w = V0(n / X)
    return complex(np.sum(series.b[1 : top + 1] * w * np.exp(-complex(s) * np.log(n))))


def gamma_factor(s: complex, k: int) -> complex:
    """pi^(-3s/2) Gamma((s+1)/2) Gamma((s+k-1)/2) Gamma((s+k)/2)."""
    s = complex(s)
    args = [(s + 1) / 2, (s + k - 1) / 2, (s + k) / 2]
    for a in args:
        if a.imag == 0 and a.real <= 0 and a.real == math.floor(a.real):
            raise ValueError(f"gamma factor has a pole at s = {s}")
    log = -1.5 * s * math.log(math.pi) + sum(special.loggamma(a) for a in args)
    return complex(np.exp(log))


@dataclass
class FEProbeResult:
    s_grid: list
    exponents: tuple
    residuals: dict  # exponent -> list of relative residuals
    best: float
    margin: float
    unstable: list


def fe_probe(
    series: SymSquareSeries,
    k: int,
    p: int,
    s_grid,
    exponents=(0.5, 1.0),
    smoothing: WeightSpec | None = None,
    X: float | None = None,
    stability_tol: float = 1e-3,
) -> FEProbeResult:
    """Relative residual |Lam(s) - Lam(1-s)| / |Lam(s)| with Lam(s) = p^(alpha s) L_inf(s) L(s).

    A point is flagged unstable (and left out of the verdict) when halving X
    moves L(s) or L(1-s) by more than ``stability_tol`` relative.
    """
    V0 = smoothing or exp_smoothing(2.0)
    Xf = X if X is not None else series.length / V0.support[1]
    residuals = {a: [] for a in exponents}
    unstable = []
    for s in s_grid:
        s = complex(s)
        s1 = 1 - s
        Ls = L_value(series, s, V0, Xf)
        L1 = Ls if s1 == s else L_value(series, s1, V0, Xf)
        drift = max(
            abs(L_value(series, s, V0, Xf / 2) - Ls) / abs(Ls),
            abs(L_value(series, s1, V0, Xf / 2) - L1) / abs(L1),
        )
        if drift > stability_tol:
            unstable.append(s)
        for a in exponents:
            lam_s = p ** (a * s) * gamma_factor(s, k) * Ls
            lam_1 = lam_s if s1 == s else p ** (a * s1) * gamma_factor(s1, k) * L1
            residuals[a].append(abs(lam_s - lam_1) / abs(lam_s))
    stable = [i for i, s in enumerate(s_grid) if complex(s) not in unstable]
    worst = {a: max((residuals[a][i] for i in stable), default=math.nan) for a in exponents}
    ranked = sorted(exponents, key=lambda a: worst[a])
    best = ranked[0]
    margin = worst[ranked[1]] / worst[best] if len(ranked) > 1 and worst[best] > 0 else math.inf
    return FEProbeResult(list(s_grid), tuple(exponents), residuals, best, margin, unstable)


def S_N(table: CoefficientTable, params: ParameterBox, V: WeightSpec | None = None) -> complex:
    """sum_n lambda(n^2) n^(-it) V(n/N)."""
    V = V or V_weight()
    top = int(math.floor(V.support[1] * params.N))
    if top < 1:
        return 0j
    lam = table.square_values(top)[1:]
    n = np.arange(1, top + 1, dtype=float)
    return complex(np.sum(lam * np.exp(-1j * params.t * np.log(n)) * V(n / params.N)))


def audit_decomposition(table: CoefficientTable, params: ParameterBox, **kwargs):
    """Staged audit of the moment decomposition; see :func:`symsq.audit.run_audit`."""
    from .audit import run_audit

    return run_audit(table, params, **kwargs)
