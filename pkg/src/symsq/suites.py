"""Verification suites behind the command line, one function per suite.

Every suite takes keyword parameters (defaults below) and returns a
VerificationReport whose settings record the effective values.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from math import gcd
from typing import Callable

import numpy as np

from .audit import run_audit
from .deltasym import DeltaKernel, delta_expand, g_bound_report
from .expsums import (
    CharSumSpec,
    charsum_C1_grid_bruteforce,
    charsum_C1_grid_closed,
    charsum_C_closed,
    charsum_C_display,
    charsum_C_grid_bruteforce,
    gauss_grid_bruteforce,
    gauss_grid_closed,
)
from .lfun import (
    BUILTIN_TABLES,
    CoefficientError,
    CoefficientTable,
    dirichlet_partial,
    euler_product,
    exp_smoothing,
    fe_probe,
    load_coefficients,
    local_factor,
    sym_square_coeffs,
)
from .oscint import QuadraticPhase, oscillatory_quadrature, stationary_phase_main
from .params import ParameterBox
from .quadrature import QuadratureConfig
from .report import VerificationReport
from .sieve import large_sieve_sweep, quadruple_report
from .voronoi import doubling_report, poisson_verify, truncation_report, voronoi_verify
from .weights import bump_weight

log = logging.getLogger("symsq")


def _tables(coeff_file) -> list[CoefficientTable]:
    names = [coeff_file] if coeff_file else list(BUILTIN_TABLES)
    return [load_coefficients(name, validate=False) for name in names]


def _level11(coeff_file) -> CoefficientTable:
    return load_coefficients(coeff_file or "11.2.a.a")


def _runtime_row(check_id: str, elapsed: float, limit: float, info: dict) -> tuple:
    # value 1 = within limit; the elapsed time goes to the log so reports stay byte-stable
    log.info("%s: %.1f s (limit %g s)", check_id, elapsed, limit)
    ok = elapsed <= limit
    return check_id, {**info, "limit_s": limit}, float(ok), 1.0, ok


# ---------------------------------------------------------------- Gauss sums


def verify_gauss(c_max: int = 512, tol: float = 1e-9, runtime: float = 60.0, **_) -> VerificationReport:
    """Closed form vs brute force over all units a and all b mod c, one row per c;
    multiplicativity over every coprime splitting c = r s with brute-force factors."""
    rep = VerificationReport("verify-gauss", settings={"c_max": c_max, "tol": tol, "runtime": runtime})
    t0 = time.perf_counter()
    for c in range(1, c_max + 1):
        a, brute = gauss_grid_bruteforce(c)
        _, closed = gauss_grid_closed(c)
        err = float(np.abs(brute - closed).max())
        i, j = np.unravel_index(int(np.argmax(np.abs(brute - closed))), brute.shape)
        rep.add(
            "gauss.closed",
            {"c": c, "pairs": int(brute.size), "worst_a": int(a[i]), "worst_b": int(j), "tol": tol * math.sqrt(c)},
            complex(closed[i, j]),
            complex(brute[i, j]),
            err <= tol * math.sqrt(c),
            abs_err=err,
            topic="quadratic Gauss sum closed forms",
        )
    elapsed = time.perf_counter() - t0
    rep.add(*_runtime_row("gauss.runtime", elapsed, runtime, {"c_max": c_max}), topic="runtime")
    grids: dict[int, np.ndarray] = {}

    def full(c):
        # G(a, b; c) for every a mod c (zeros off the units), by brute force
        if c not in grids:
            a, g = gauss_grid_bruteforce(c)
            out = np.zeros((c, c), dtype=complex)
            out[a] = g
            grids[c] = out
        return grids[c]

    for c in range(6, c_max + 1):
        G = full(c)
        units = np.array([x for x in range(c) if gcd(x, c) == 1])
        b = np.arange(c)
        for r in range(2, c):
            s = c // r
            if r * s != c or r > s or gcd(r, s) != 1:
                continue
            rhs = full(s)[np.ix_((units * r) % s, b % s)] * full(r)[np.ix_((units * s) % r, b % r)]
            err = float(np.abs(G[units] - rhs).max())
            rep.add(
                "gauss.multiplicative",
                {"c": c, "r": r, "s": s, "tol": tol},
                err,
                0.0,
                err <= tol,
                abs_err=err,
                topic="Gauss sum multiplicativity",
            )
        if c > 64:
            grids.pop(c, None)
    return rep


# ---------------------------------------------------------------- character sums


def verify_charsum(
    q_max_C1: int = 999,
    q_max_C: int = 200,
    primes=(7, 11, 13),
    m_max: int = 20,
    n_max: int = 10,
    tol: float = 1e-8,
    **_,
) -> VerificationReport:
    rep = VerificationReport(
        "verify-charsum",
        settings={"q_max_C1": q_max_C1, "q_max_C": q_max_C, "primes": list(primes), "m_max": m_max, "n_max": n_max, "tol": tol},
    )
    for q in range(1, q_max_C1 + 1, 2):
        brute = charsum_C1_grid_bruteforce(q)
        closed = charsum_C1_grid_closed(q)
        err = float(np.abs(brute - closed).max())
        rep.add("charsum.C1", {"q": q, "l_count": q, "tol": tol * math.sqrt(q)}, err, 0.0, err <= tol * math.sqrt(q), abs_err=err, topic="C1 decomposition")
    ms = np.arange(1, m_max + 1)
    ns = np.arange(-n_max, n_max + 1)
    unit_ratio: dict[str, set] = {"odd": set(), "2||q": set(), "4|q": set()}
    for p in primes:
        for q in range(1, q_max_C + 1):
            if q % p == 0:
                continue
            brute = charsum_C_grid_bruteforce(q, p, ms, ns)
            closed = np.array([[charsum_C_closed(CharSumSpec(int(m), int(n), q, p)) for n in ns] for m in ms])
            err = float(np.abs(brute - closed).max())
            case = "odd" if q % 2 else ("2||q" if q % 4 else "4|q")
            rep.add(
                "charsum.C",
                {"q": q, "p": p, "case": case, "m_max": m_max, "n_max": n_max, "tol": tol * math.sqrt(q)},
                err,
                0.0,
                err <= tol * math.sqrt(q),
                abs_err=err,
                topic="C(m, n, q) with unit tracking",
            )
            if q > 1 and q <= 40:
                for m in ms[:4]:
                    for n in (1, 2):
                        v = closed[int(m) - 1, n + n_max]
                        d = charsum_C_display(CharSumSpec(int(m), n, q, p))
                        if abs(v) > 1e-9 and abs(d) > 1e-9:
                            r = v / d
                            unit_ratio[case].add((float(round(r.real, 6)) + 0.0, float(round(r.imag, 6)) + 0.0))
    for case, ratios in unit_ratio.items():
        rep.notes.append(f"exact / reduced display ratios, {case}: {sorted(ratios)}")
    rep.notes.append("odd q: exact = eps_q (p/q) C1(4m - pn^2, q)/sqrt q; reduced form drops eps_q")
    rep.notes.append("2||q: exact = (-1)^m eps_q0 (p/q0) C1(4m - pn^2, q0)/sqrt q0 for odd n, 0 for even n")
    rep.notes.append("4|q: exact = eps_q0 (p/q0) C1(l, q0)/sqrt q times the 2-part sum, l = m - p (n/2)^2, 0 for odd n")
    return rep


# ---------------------------------------------------------------- delta symbol


def verify_delta(
    Qs=(8, 16, 32),
    n_max: int = 50,
    tol: float = 1e-9,
    residual_Qs=(8, 16, 32, 64),
    residual_ns=(0, 1, 5),
    bound_Q: int = 64,
    A: float = 1.0,
    C: float = 10.0,
    slope_max: float = -2.0,
    envelope_C: float = 10.0,
    **_,
) -> VerificationReport:
    rep = VerificationReport("verify-delta", settings={"Qs": list(Qs), "n_max": n_max, "tol": tol})
    for Q in Qs:
        k = DeltaKernel(Q)
        err = max(abs(delta_expand(n, k).value - (n == 0)) for n in range(-n_max, n_max + 1))
        rep.add("delta.kernel_sum", {"Q": Q, "n_range": [-n_max, n_max], "tol": tol}, err, 0.0, err <= tol, abs_err=err, topic="delta symbol exactness")
    prev = math.inf
    for Q in residual_Qs:
        k = DeltaKernel(Q)
        res = {n: abs(delta_expand(n, k, "g_integral").value - (n == 0)) for n in residual_ns}
        worst = max(res.values())
        rep.add(
            "delta.g_integral",
            {"Q": Q, "per_n": {str(n): r for n, r in res.items()}, "previous": prev if prev < math.inf else None},
            worst,
            0.0 if prev == math.inf else prev,
            worst < prev,
            abs_err=worst,
            rel_err=worst / prev if prev < math.inf else 0.0,
            topic="delta symbol integral form shrinks with Q",
        )
        prev = worst
    k = DeltaKernel(bound_Q)
    q_top = int(math.floor(bound_Q ** (1 - k.eps)))
    X = bound_Q**k.eps
    qs = sorted({1, 2, 4, 8, 16, 32, q_top})
    xs = np.linspace(-X, X, 21)
    rep.extend(g_bound_report(k, qs, xs, A=A, C=C, slope_max=slope_max, decay_qs=(1, 8, q_top), envelope_C=envelope_C))
    rep.settings.update({"bound_Q": bound_Q, "A": A, "C": C, "slope_max": slope_max, "envelope_C": envelope_C})
    return rep


# ---------------------------------------------------------------- stationary phase


def _slope(T, err) -> float:
    return float(np.polyfit(np.log(T), np.log(err), 1)[0])


def stationary_phase(Ts=(1e2, 1e3, 1e4), target: float = -1.0, spread: float = 0.3, **_) -> VerificationReport:
    """Order 0 and order 1 against quadrature for f = T (x - 1)^2 with a bump on [1/2, 3/2]."""
    rep = VerificationReport("stationary-phase", settings={"Ts": list(Ts), "target": target, "spread": spread})
    amp = bump_weight(0.5, 1.5)
    errs = {0: [], 1: []}
    for T in Ts:
        ph = QuadraticPhase(T)
        oracle = oscillatory_quadrature(amp, ph, (0.5, 1.5), QuadratureConfig(abs_tol=1e-14))
        for order in (0, 1):
            v = stationary_phase_main(amp, ph, order=order)
            errs[order].append(abs(v - oracle) / abs(oracle))
            rep.add(f"sp.order{order}", {"T": T}, v, oracle, True, topic="stationary phase expansion")
    s0, s1 = _slope(Ts, errs[0]), _slope(Ts, errs[1])
    rep.add("sp.slope0", {"Ts": list(Ts), "errors": errs[0], "window": [target - spread, target + spread]}, s0, target, abs(s0 - target) <= spread, topic="stationary phase main term")
    rep.add("sp.slope1", {"Ts": list(Ts), "errors": errs[1], "order0_slope": s0}, s1, s0, s1 < s0, topic="stationary phase first correction")
    return rep


# ---------------------------------------------------------------- summation formulae


def verify_poisson(
    qs=tuple(range(1, 11)),
    ts=(0.0, 5.0),
    xs=(0.0, 0.1),
    Ns=(20, 40),
    K: float = 4.0,
    p: int = 11,
    tol: float = 1e-6,
    trunc_tol: float = 1e-3,
    **_,
) -> VerificationReport:
    """Identity rows on the full grid; truncation rows are reported separately by the truncation suite."""
    rep = VerificationReport("verify-poisson", settings={"K": K, "p": p, "tol": tol, "a": "1 and q-1"})
    for N in Ns:
        for t in ts:
            P = ParameterBox(N=N, t=t, p=p, K=K)
            for q in qs:
                for a in sorted({1, max(q - 1, 1)}) if q > 1 else [0]:
                    for x in xs:
                        sub = poisson_verify(P, q, a, x, tol=tol, trunc_tol=trunc_tol)
                        rep.rows.extend(sub.by_id("poisson.identity"))
    return rep


def verify_voronoi(coeff_file=None, qs=tuple(range(1, 8)), Ys=(100.0, 300.0, 1000.0), tol: float = 1e-4, eta_tol: float = 1e-3, reach: float = 150.0, **_) -> VerificationReport:
    table = _level11(coeff_file)
    rep = voronoi_verify(table, qs=qs, Ys=Ys, tol=tol, eta_tol=eta_tol, reach=reach)
    rep.settings.update({"label": table.label, "tol": tol, "eta_tol": eta_tol})
    return rep


def truncation(
    coeff_file=None,
    N: float = 10.0,
    t: float = 5.0,
    p: int = 11,
    K: float = 4.0,
    qs=(1, 3, 5),
    c_N: float = 1.0,
    c_M: float = 1.0,
    span: float = 4.0,
    tol: float = 1e-3,
    **_,
) -> VerificationReport:
    P = ParameterBox(N=N, t=t, p=p, K=K)
    rep = truncation_report(P, qs=qs, c_N=c_N, c_M=c_M, tol=tol, span=span)
    rep.extend(doubling_report(c_N=c_N, table=_level11(coeff_file), tol=tol))
    rep.settings.update({"N": N, "t": t, "p": p, "K": K, "qs": list(qs)})
    return rep


# ---------------------------------------------------------------- sieve


def sieve_check(seed: int = 7, count: int = 200, bound: float = 10.0, grid=((64, 64), (256, 256), (64, 512), (256, 512)), **_) -> VerificationReport:
    return large_sieve_sweep(grid=grid, count=count, seed=seed, bound=bound)


def count_quadruples(p: int = 11, t: float = 64.0, Ks=(16.0, 32.0), slack: float = 20.0, c: float = 4.0, **_) -> VerificationReport:
    return quadruple_report(p=p, t=t, Ks=Ks, slack=slack, c=c)


# ---------------------------------------------------------------- L-functions


def eval_L(coeff_file=None, s: float = 3.0, X: int = 5000, prime_bound: int = 10000, tol: float = 1e-8, **_) -> VerificationReport:
    """Hecke validation (on load) and Dirichlet series vs Euler product for each table."""
    rep = VerificationReport("eval-L", settings={"s": s, "X": X, "prime_bound": prime_bound, "tol": tol})
    for table in _tables(coeff_file):
        info = {"label": table.label, "level": table.level, "n_max": table.n_max}
        try:
            table.validate()
            problem = ""
        except CoefficientError as exc:
            problem = str(exc)
        rep.add("L.hecke", {**info, "tol": 1e-10, "problem": problem}, float(not problem), 1.0, not problem, topic="Hecke relations of the coefficient table")
        if problem:
            continue
        series = sym_square_coeffs(table, X)
        d = dirichlet_partial(series, s)
        e = euler_product(table, s, prime_bound)
        rep.add("L.euler", {**info, "s": s, "X": X, "prime_bound": prime_bound, "tol": tol}, d, e, abs(d - e) <= tol, rel_err=abs(d - e), topic="Euler product vs Dirichlet series")
        p = table.level
        for sv in (1.5, 2.0, 3.0):
            v = local_factor(table, p, sv)
            ref = 1.0 / (1.0 - p ** (-(sv + 1)))
            rep.add("L.local_level", {**info, "s": sv}, v, ref, abs(v - ref) <= 1e-14, topic="local factor at the level")
    return rep


def fe_probe_suite(coeff_file=None, s_grid=(0.6, 0.7, 0.8), powers=(2.0, 4.0), weight: int = 2, **_) -> VerificationReport:
    """Conductor exponent probe under two smoothings; the verdict must agree between them."""
    table = _level11(coeff_file)
    series = sym_square_coeffs(table, table.n_max)
    rep = VerificationReport("fe-probe", settings={"s_grid": list(s_grid), "smoothings": [f"exp(-x^{k:g})" for k in powers]})
    verdicts = []
    for power in powers:
        V0 = exp_smoothing(power)
        sym = fe_probe(series, weight, table.level, [0.5], smoothing=V0)
        for a in sym.exponents:
            rep.add("fe.symmetric", {"alpha": a, "smoothing": V0.label, "s": 0.5}, sym.residuals[a][0], 0.0, sym.residuals[a][0] == 0.0, topic="functional equation at the fixed point")
        res = fe_probe(series, weight, table.level, list(s_grid), smoothing=V0)
        verdicts.append(res.best)
        for a in res.exponents:
            rep.add(
                "fe.residual",
                {"alpha": a, "smoothing": V0.label, "s_grid": list(s_grid), "unstable": [str(u) for u in res.unstable]},
                max(res.residuals[a]),
                0.0,
                True,
                topic="functional equation residual (reported)",
            )
        rep.notes.append(f"{V0.label}: best alpha = {res.best}, margin = {res.margin:.3g}")
    stable = len(set(verdicts)) == 1
    rep.add("fe.verdict", {"verdicts": verdicts, "level": table.level}, verdicts[0], verdicts[-1], stable, topic="conductor exponent verdict")
    rep.notes.append(f"alpha = {verdicts[0]} means conductor {table.level}^{2 * verdicts[0]:g} in Lambda(s) = p^(alpha s) L_inf(s) L(s)")
    return rep


def audit_pipeline(coeff_file=None, N: float = 2.0, t: float = 3.0, K: float = 0.25, eta: float = 1.0, tol_AB: float = 1e-3, tol_BC: float = 1e-6, tol_BD: float = 1e-3, runtime: float = 300.0, **_) -> VerificationReport:
    table = _level11(coeff_file)
    P = ParameterBox(N=N, t=t, p=table.level, K=K)
    rep = run_audit(table, P, eta=eta, tol_AB=tol_AB, tol_BC=tol_BC, tol_BD=tol_BD)
    sec = rep.settings["seconds"]
    rep.add(*_runtime_row("audit.runtime", sec, runtime, {"N": N, "t": t, "K": K}), topic="runtime")
    return rep


@dataclass(frozen=True)
class Suite:
    func: Callable
    uses_table: bool = False
    uses_seed: bool = False
    defaults: dict = field(default_factory=dict)


SUITES: dict[str, Suite] = {
    "verify-gauss": Suite(verify_gauss),
    "verify-charsum": Suite(verify_charsum),
    "verify-delta": Suite(verify_delta),
    "stationary-phase": Suite(stationary_phase),
    "verify-poisson": Suite(verify_poisson),
    "verify-voronoi": Suite(verify_voronoi, uses_table=True),
    "truncation": Suite(truncation, uses_table=True),
    "sieve-check": Suite(sieve_check, uses_seed=True),
    "count-quadruples": Suite(count_quadruples),
    "eval-L": Suite(eval_L, uses_table=True),
    "fe-probe": Suite(fe_probe_suite, uses_table=True),
    "audit-pipeline": Suite(audit_pipeline, uses_table=True),
}
