"""Poisson and Voronoi summation as numerical identities, and their truncation points.

Poisson (modulus q), with g(y) = y^(-it) V(y/N) e(y^2 x/(qQ)):

    sum_n g(n) e(a n^2/q) = (N^(1-it)/q) sum_k G(a, k; q) I1(k, q, x),

where G(a, k; q) = sum_{r mod q} e((a r^2 + k r)/q) and I1 is the y-integral
of :func:`symsq.oscint.I1`.

Voronoi (level p, (q, p) = 1, weight k, normalised coefficients):

    sum_n lambda(n) e(an/q) h(n)
        = eta (2 pi/(q sqrt p)) sum_n lambda(n) e(-n conj(a p)/q)
          int h(y) J_{k-1}(4 pi sqrt(n y)/(q sqrt p)) dy,

with |eta| = 1. eta is fitted on one test function and then held fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import gcd

import numpy as np
from scipy import special

from .expsums import GaussSumSpec, gauss_sum_closed, unit
from .lfun import CoefficientTable, InsufficientCoefficients
from .modmath import mod_inverse
from .oscint import I1, TWO_PI, e, panel_nodes
from .params import ParameterBox
from .report import VerificationReport
from .weights import WeightSpec, bump_weight


def truncation_thresholds(params: ParameterBox, q: int) -> tuple[float, float]:
    """(N0, M0) = (qt/N + sqrt K, N^eps' p K)."""
    return params.N0(q), params.M0


# ---------------------------------------------------------------- Poisson


@dataclass
class PoissonSides:
    direct: complex
    dual: complex
    terms: dict  # k -> term of the dual sum
    k_max: int

    def truncated(self, k_max: float) -> complex:
        return complex(sum(v for k, v in self.terms.items() if abs(k) <= k_max))


def poisson_direct(params: ParameterBox, q: int, a: int, x: float, V: WeightSpec | None = None) -> complex:
    V = V or bump_weight()
    N, t, Q = params.N, params.t, params.Q
    lo, hi = V.support
    n = np.arange(max(1, math.ceil(lo * N)), math.floor(hi * N) + 1)
    if n.size == 0:
        return 0j
    w = V(n / N) * np.exp(-1j * t * np.log(n.astype(float)))
    # e(a n^2/q) reduced exactly before exponentiation
    phase = ((a * n * n) % q) / q + n.astype(float) ** 2 * x / (q * Q)
    return complex(np.sum(w * e(phase)))


def poisson_dual_terms(
    params: ParameterBox,
    q: int,
    a: int,
    x: float,
    V: WeightSpec | None = None,
    tail_tol: float = 1e-12,
    k_limit: int = 100_000,
) -> dict:
    """Terms (N^(1-it)/q) G(a, k; q) I1(k) of the dual sum, for k out to where they vanish.

    k runs outward from the stationary range until a run of 16 successive |k|
    contribute less than ``tail_tol`` times the largest term, or times the
    natural size N/sqrt(q) when the whole sum cancels.
    """
    V = V or bump_weight()
    N, t, Q = params.N, params.t, params.Q
    lo, hi = V.support
    # I1(k) has a stationary point only for |k| N/q below this
    k_sp = q / N * (t / (TWO_PI * lo) + 2 * N * N * abs(x) * hi / (q * Q))
    pref = N ** (1 - 1j * t) / q
    terms: dict[int, complex] = {}
    biggest = 0.0
    floor = N / math.sqrt(q)
    quiet = 0
    k = 0
    while True:
        for kk in {k, -k}:
            G = _gauss(a, kk, q)
            terms[kk] = pref * G * I1(params, kk, q, x, V) if G != 0 else 0j
        size = max(abs(terms[k]), abs(terms[-k]))
        biggest = max(biggest, size)
        if k > k_sp:
            quiet = quiet + 1 if size <= tail_tol * max(biggest, floor) else 0
            if quiet >= 16:
                break
        k += 1
        if k > k_limit:
            raise RuntimeError(f"dual Poisson sum did not decay by |k| = {k_limit}")
    return terms


def _gauss(a: int, k: int, q: int) -> complex:
    if q == 1:
        return 1 + 0j
    return gauss_sum_closed(GaussSumSpec(a, k, q))


def poisson_sides(params: ParameterBox, q: int, a: int, x: float, V: WeightSpec | None = None) -> PoissonSides:
    if q > 1 and gcd(a, q) != 1:
        raise ValueError(f"gcd(a, q) must be 1, got a={a}, q={q}")
    terms = poisson_dual_terms(params, q, a, x, V)
    dual = complex(sum(terms[k] for k in sorted(terms, key=abs)))
    return PoissonSides(poisson_direct(params, q, a, x, V), dual, terms, max(terms))


def poisson_verify(
    params: ParameterBox,
    q: int,
    a: int,
    x: float,
    V: WeightSpec | None = None,
    tol: float = 1e-6,
    trunc_tol: float = 1e-3,
) -> VerificationReport:
    """Both sides of the Poisson identity, and the effect of cutting the dual sum at N0 and 2 N0."""
    sides = poisson_sides(params, q, a, x, V)
    rep = VerificationReport("verify-poisson")
    info = {"N": params.N, "t": params.t, "K": params.K, "Q": params.Q, "q": q, "a": a, "x": x}
    scale = abs(sides.direct)
    rep.add(
        "poisson.identity",
        {**info, "k_max": sides.k_max, "tol": tol},
        sides.dual,
        sides.direct,
        abs(sides.dual - sides.direct) <= tol * scale,
        topic="Poisson summation",
    )
    N0 = params.N0(q)
    at_n0 = sides.truncated(N0)
    at_2n0 = sides.truncated(2 * N0)
    rep.add(
        "poisson.truncation",
        {**info, "N0": N0, "tol": trunc_tol},
        at_n0,
        at_2n0,
        abs(at_n0 - at_2n0) <= trunc_tol * max(abs(at_2n0), 1e-300),
        topic="Poisson truncation N0",
    )
    return rep


# ---------------------------------------------------------------- Voronoi


def bump_test_function(Y: float) -> WeightSpec:
    """Canonical bump dilated to [Y, 2Y]."""
    return bump_weight(Y, 2.0 * Y)


def voronoi_direct(table: CoefficientTable, q: int, a: int, h: WeightSpec) -> complex:
    lo, hi = h.support
    n = np.arange(max(1, math.ceil(lo)), math.floor(hi) + 1)
    if n[-1] > table.n_max:
        raise InsufficientCoefficients(int(n[-1]), table.n_max, "Voronoi direct side")
    tw = np.array([unit(int(a * k), q) for k in n]) if q > 1 else np.ones(n.size)
    return complex(np.sum(table.values[n] * tw * h(n.astype(float))))


def dual_length(q: int, p: int, h: WeightSpec, reach: float) -> int:
    """n with sqrt(n Y)/(q sqrt p) = ``reach``.

    Past that point the integral against J_{k-1} is a Fourier-type transform
    of the bump far beyond its bandwidth; it decays like exp(-c sqrt(reach)).
    """
    Y = h.support[0]
    return int(math.ceil(reach * reach * q * q * p / Y))


def bessel_transform(h: WeightSpec, n: np.ndarray, q: int, p: int, k: int = 2, block: int = 256) -> np.ndarray:
    """int h(y) J_{k-1}(4 pi sqrt(n y)/(q sqrt p)) dy for every n."""
    lo, hi = h.support
    scale = 4 * math.pi / (q * math.sqrt(p))
    J = special.j1 if k == 2 else (lambda z: special.jv(k - 1, z))
    out = np.empty(n.size)
    for a in range(0, n.size, block):
        nb = n[a : a + block].astype(float)
        cycles = scale * math.sqrt(nb.max()) * (math.sqrt(hi) - math.sqrt(lo)) / TWO_PI
        y, w = panel_nodes(lo, hi, max(8, int(math.ceil(cycles / 2.0)) + 8))
        hw = w * h(y)
        keep = hw != 0
        y, hw = y[keep], hw[keep]
        out[a : a + block] = J(scale * np.sqrt(np.outer(nb, y))) @ hw
    return out


@dataclass
class VoronoiCase:
    q: int
    a: int
    Y: float
    direct: complex
    dual_raw: complex  # dual side without eta
    n_dual: int
    tail: float  # change in dual_raw between reach 0.8 R and R


class VoronoiDual:
    """Dual-side data for one (q, Y), shared across residues a."""

    def __init__(self, table: CoefficientTable, q: int, Y: float, reach: float = 150.0, min_reach: float = 100.0):
        p = table.level
        if q % p == 0:
            raise ValueError(f"q = {q} is divisible by the level {p}")
        self.table, self.q, self.Y = table, q, Y
        self.h = bump_test_function(Y)
        need = dual_length(q, p, self.h, min_reach)
        if need > table.n_max:
            raise InsufficientCoefficients(need, table.n_max, f"Voronoi dual side (q = {q}, Y = {Y:g})")
        self.n_dual = min(dual_length(q, p, self.h, reach), table.n_max)
        self.reach = math.sqrt(self.n_dual * Y / p) / q
        self.n_inner = dual_length(q, p, self.h, 0.8 * self.reach)
        n = np.arange(1, self.n_dual + 1)
        self.weighted = TWO_PI / (q * math.sqrt(p)) * table.values[1 : self.n_dual + 1] * bessel_transform(self.h, n, q, p, table.weight)

    def case(self, a: int) -> VoronoiCase:
        q, p = self.q, self.table.level
        if q > 1 and gcd(a, q) != 1:
            raise ValueError(f"gcd(a, q) must be 1, got a={a}, q={q}")
        n = np.arange(1, self.n_dual + 1)
        if q > 1:
            abar = mod_inverse(a * p % q, q)
            tw = np.exp(-1j * TWO_PI * ((abar * n) % q) / q)
        else:
            tw = np.ones(n.size)
        terms = self.weighted * tw
        full = complex(np.sum(terms))
        inner = complex(np.sum(terms[: self.n_inner]))
        return VoronoiCase(q, a, self.Y, voronoi_direct(self.table, q, a, self.h), full, self.n_dual, abs(full - inner))


def voronoi_case(table: CoefficientTable, q: int, a: int, Y: float, reach: float = 150.0) -> VoronoiCase:
    return VoronoiDual(table, q, Y, reach).case(a)


def fit_eta(cases: list[VoronoiCase]) -> complex:
    """Least-squares eta from direct = eta * dual_raw."""
    num = sum(c.dual_raw.conjugate() * c.direct for c in cases)
    den = sum(abs(c.dual_raw) ** 2 for c in cases)
    return complex(num / den)


def voronoi_verify(
    table: CoefficientTable,
    qs=(1, 2, 3, 4, 5, 6, 7),
    Ys=(100.0, 300.0, 1000.0),
    residues: dict | None = None,
    tol: float = 1e-4,
    eta_tol: float = 1e-3,
    reach: float = 150.0,
) -> VerificationReport:
    """Fit eta on (q = 1, first Y), then check every (q, a, Y) with it held fixed.

    ``residues`` maps q to the residues a to test; by default a = 1 and, when
    different, a = q - 1.
    """
    rep = VerificationReport("verify-voronoi")
    base = voronoi_case(table, 1, 0, Ys[0], reach)
    eta = fit_eta([base])
    rep.settings.update({"eta_re": eta.real, "eta_im": eta.imag, "fit_case": {"q": 1, "Y": Ys[0]}, "reach": reach})
    rep.add(
        "voronoi.eta_modulus",
        {"level": table.level, "Y": Ys[0], "tol": eta_tol},
        abs(eta),
        1.0,
        abs(abs(eta) - 1.0) <= eta_tol,
        topic="Voronoi eta unimodular",
    )
    for q in qs:
        if q % table.level == 0:
            continue
        avals = (residues or {}).get(q) or sorted({1, q - 1} if q > 2 else {1})
        for Y in Ys:
            dual = VoronoiDual(table, q, Y, reach)
            for a in avals:
                c = dual.case(a)
                rhs = eta * c.dual_raw
                rep.add(
                    "voronoi.identity",
                    {"level": table.level, "q": q, "a": a, "Y": Y, "n_dual": c.n_dual, "tail": c.tail, "tol": tol},
                    rhs,
                    c.direct,
                    abs(rhs - c.direct) <= tol * abs(c.direct),
                    topic="Voronoi summation",
                )
    return rep


# ---------------------------------------------------------------- truncation


def truncation_report(
    params: ParameterBox,
    qs=(1, 3, 5),
    c_N: float = 1.0,
    c_M: float = 1.0,
    tol: float = 1e-3,
    span: float = 4.0,
    kernel=None,
) -> VerificationReport:
    """Size of I(m, n, q) past c_N N0 in n and past c_M M0 in m, relative to the in-range maximum.

    One table over |n| <= span c_N N0 and 1 <= m <= span c_M M0 per branch.
    The reference is max |I| over |n| <= N0, m <= M0; the n-tail is taken
    at m <= M0 and the m-tail at |n| <= N0.
    """
    from .deltasym import DeltaKernel
    from .oscint import IntegralI

    kernel = kernel or DeltaKernel(params.Q)
    rep = VerificationReport("truncation", settings={"c_N": c_N, "c_M": c_M, "tol": tol, "span": span})
    M0 = params.M0
    ms = np.unique(np.r_[np.linspace(1.0, M0, 12), np.geomspace(M0, span * c_M * M0, 16)])
    for q in qs:
        I = IntegralI(params, q, kernel=kernel)
        N0 = params.N0(q)
        top = math.ceil(span * c_N * N0)
        ns = np.arange(-top, top + 1)
        n_in, m_in = np.abs(ns) <= N0, ms <= M0
        info = {"N": params.N, "t": params.t, "p": params.p, "K": params.K, "q": q, "N0": N0, "M0": M0}
        for branch in (1, -1):
            A = np.abs(I.table(ms, ns, branch))
            ref = A[np.ix_(m_in, n_in)].max()
            far_n = A[np.ix_(m_in, np.abs(ns) > c_N * N0)].max()
            far_m = A[np.ix_(ms > c_M * M0, n_in)].max()
            for cid, far, extra, topic in (
                ("trunc.n", far_n, {"c_N": c_N, "n_scan": top}, "Poisson dual length N0"),
                ("trunc.m", far_m, {"c_M": c_M, "m_scan": float(ms[-1])}, "Voronoi dual length M0"),
            ):
                rep.add(
                    cid,
                    {**info, "branch": branch, **extra, "tol": tol},
                    far / ref,
                    0.0,
                    far <= tol * ref,
                    abs_err=far / ref,
                    rel_err=far / ref,
                    topic=topic,
                )
    return rep


def doubling_report(
    grid=((20, 1, 0.0, 0.0), (40, 5, 5.0, 0.1), (40, 10, 5.0, 0.1), (20, 7, 5.0, 0.0)),
    K: float = 4.0,
    p: int = 11,
    c_N: float = 1.0,
    table: CoefficientTable | None = None,
    voronoi_cases=((1, 1, 100.0), (3, 1, 300.0), (7, 1, 1000.0)),
    tol: float = 1e-3,
) -> VerificationReport:
    """Relative change of the verified dual sums when their truncation point doubles.

    Poisson: dual sum cut at c_N N0 vs 2 c_N N0, for (N, q, t, x) in ``grid``.
    Voronoi: dual sum cut at l_max / 2 vs l_max.
    """
    rep = VerificationReport("truncation-doubling", settings={"c_N": c_N, "tol": tol})
    for N, q, t, x in grid:
        P = ParameterBox(N=N, t=t, p=p, K=K)
        sides = poisson_sides(P, q, 1, x)
        cut = c_N * P.N0(q)
        a, b = sides.truncated(cut), sides.truncated(2 * cut)
        rep.add(
            "double.poisson",
            {"N": N, "q": q, "t": t, "x": x, "K": K, "cut": cut, "tol": tol},
            a,
            b,
            abs(a - b) <= tol * abs(b),
            topic="Poisson truncation N0",
        )
    if table is not None:
        for q, a, Y in voronoi_cases:
            dual = VoronoiDual(table, q, Y)
            n = np.arange(1, dual.n_dual + 1)
            tw = np.exp(-1j * TWO_PI * ((mod_inverse(a * table.level % q, q) * n) % q) / q) if q > 1 else 1.0
            terms = dual.weighted * tw
            full, half = complex(terms.sum()), complex(terms[: dual.n_dual // 2].sum())
            rep.add(
                "double.voronoi",
                {"level": table.level, "q": q, "a": a, "Y": Y, "n_dual": dual.n_dual, "tol": tol},
                half,
                full,
                abs(half - full) <= tol * abs(full),
                topic="Voronoi dual truncation",
            )
    return rep
