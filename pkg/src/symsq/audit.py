"""End-to-end audit of the moment decomposition at tiny parameters.

Stages, each an independent evaluation of the same quantity:

A. S(N) = sum_n lambda(n^2) n^(-it) V(n/N), directly.
B. The delta-expanded double sum
       sum_{q, a*, n, m} n^(-it) V(n/N) lambda(m) U(m/N^2) e(a(n^2 - m)/q) Delta_q(n^2 - m) f(n^2 - m),
   which collapses to A when U = 1 on the squares of supp V.
C. B with the n-sum replaced by its Poisson dual modulo q.
D. B with the m-sum replaced by its Voronoi dual modulo q ((q, p) = 1 only).

The audit U is 1 on [1/4, 25/4] so that stage B equals stage A exactly.
"""

from __future__ import annotations

import math
import time
from math import gcd

import numpy as np
from scipy import special

from .deltasym import DeltaKernel, delta_kernel_weight
from .expsums import GaussSumSpec, gauss_sum_closed, unit
from .lfun import CoefficientTable, InsufficientCoefficients, S_N
from .modmath import mod_inverse
from .oscint import TWO_PI, e, panel_nodes
from .params import ParameterBox
from .report import VerificationReport
from .weights import V_weight, WeightSpec, plateau_weight


def audit_U() -> WeightSpec:
    """1 on [1/4, 25/4], support [1/5, 13/2]."""
    return plateau_weight(0.2, 0.25, 6.25, 6.5)


class _Setup:
    def __init__(self, table: CoefficientTable, params: ParameterBox, V: WeightSpec, U: WeightSpec):
        self.table, self.P, self.V, self.U = table, params, V, U
        self.kernel = DeltaKernel(params.Q)
        N = params.N
        self.n = np.arange(max(1, math.ceil(V.support[0] * N)), math.floor(V.support[1] * N) + 1)
        self.m = np.arange(max(1, math.ceil(U.support[0] * N * N)), math.floor(U.support[1] * N * N) + 1)
        top = int(self.m[-1])
        if top > table.n_max:
            raise InsufficientCoefficients(top, table.n_max, "audit stage B")
        lam = table.values[self.m] * U(self.m / (N * N))
        # m with lambda(m) U(m/N^2) = 0 contribute nothing to any stage
        self.m, self.lam_m = self.m[lam != 0], lam[lam != 0]
        self.wn = V(self.n / N) * np.exp(-1j * params.t * np.log(self.n.astype(float)))
        self.qs = list(range(1, self.kernel.q_max + 1))

    def F(self, q: int, u):
        """Delta_q(u) f(u)."""
        u = np.asarray(u, dtype=float)
        return delta_kernel_weight(self.kernel, q, u) * self.kernel.envelope_f(u)


def _units(q: int) -> list[int]:
    return [a for a in range(q) if gcd(a, q) == 1] if q > 1 else [0]


def stage_B(s: _Setup) -> dict:
    """Per-q contributions of the delta-expanded sum."""
    out = {}
    n2 = s.n.astype(np.int64) ** 2
    diff = n2[:, None] - s.m[None, :]
    for q in s.qs:
        Fq = s.F(q, diff)
        tw = np.zeros(diff.shape, dtype=complex)
        for a in _units(q):
            tw += e(((a * diff) % q) / q)
        out[q] = complex(s.wn @ (tw * Fq) @ s.lam_m)
    return out


def _poisson_J(s: _Setup, q: int, ks: np.ndarray, m: np.ndarray) -> np.ndarray:
    """J(m, k) = int y^(-it) V(y/N) F_q(y^2 - m) e(-ky/q) dy."""
    P, V = s.P, s.V
    N, Q2 = P.N, P.Q**2
    lo, hi = V.support[0] * N, V.support[1] * N
    out = np.zeros((m.size, ks.size), dtype=complex)
    kmax = float(np.abs(ks).max())
    for i, mm in enumerate(m):
        a = max(lo, math.sqrt(max(mm - Q2, 0.0)))
        b = min(hi, math.sqrt(mm + Q2))
        if b <= a:
            continue
        # narrowest feature of F_q is ~ q in u, i.e. ~ q/(2y) in y
        cycles = (b - a) * (kmax / q + 2 * b / q + P.t / (TWO_PI * a))
        y, w = panel_nodes(a, b, max(32, int(math.ceil(cycles / 2.0)) + 32))
        amp = w * V(y / N) * np.exp(-1j * P.t * np.log(y)) * s.F(q, y * y - mm)
        keep = amp != 0
        y, amp = y[keep], amp[keep]
        # ks are consecutive: e(-(k0 + j) y/q) = e(-k0 y/q) e(-j y/q)
        base = e(-np.outer(np.arange(256), y) / q)
        for c in range(0, ks.size, 256):
            width = min(256, ks.size - c)
            out[i, c : c + width] = base[:width] @ (amp * e(-int(ks[c]) * y / q))
    return out


def stage_C(s: _Setup, tail_tol: float = 1e-12, k_start: int = 128, k_limit: int = 8192) -> tuple[dict, dict]:
    """Per-q contributions after Poisson in n, and the k-range used."""
    out, reach = {}, {}
    for q in s.qs:
        k_hi = k_start
        while True:
            ks = np.arange(-k_hi, k_hi + 1)
            J = _poisson_J(s, q, ks, s.m)
            # S_q(m, k) = sum_a e(-am/q) G(a, k; q)
            Sq = np.zeros((s.m.size, ks.size), dtype=complex)
            for a in _units(q):
                G = np.array([gauss_sum_closed(GaussSumSpec(a, int(k), q)) if q > 1 else 1.0 for k in ks])
                tw = np.array([unit(-a * int(mm), q) for mm in s.m])
                Sq += tw[:, None] * G[None, :]
            terms = (s.lam_m[:, None] * Sq * J).sum(axis=0) / q
            edge = np.abs(terms[np.abs(ks) > 0.75 * k_hi]).max()
            if edge <= tail_tol * max(np.abs(terms).max(), 1e-300) or k_hi >= k_limit:
                break
            k_hi *= 2
        out[q] = complex(terms.sum())
        reach[q] = k_hi
    return out, reach


def stage_D(s: _Setup, eta: complex, reach: float = 20.0, qs=None) -> tuple[dict, dict]:
    """Per-q contributions after Voronoi in m, for q coprime to the level.

    The m-weight h(y) = U(y/N^2) F_q(n^2 - y) has features of width ~q, so
    the dual sum must run to l ~ (reach sqrt(p y)/2)^2; q needing more
    coefficients than the table holds are skipped and listed.
    """
    P, table = s.P, s.table
    p, N, Q2 = table.level, P.N, P.Q**2
    out, skipped = {}, {}
    ulo, uhi = s.U.support[0] * N * N, s.U.support[1] * N * N
    for q in qs or s.qs:
        if q % p == 0:
            continue
        y_top = min(uhi, float(s.n[-1]) ** 2 + Q2)
        need = int(math.ceil((reach * math.sqrt(p * y_top) / 2.0) ** 2))
        if need > table.n_max:
            skipped[q] = need
            continue
        ell = np.arange(1, need + 1)
        lam = table.values[1 : need + 1]
        scale = 4 * math.pi / (q * math.sqrt(p))
        total = 0j
        for j, nn in enumerate(s.n):
            a_y, b_y = max(ulo, nn * nn - Q2), min(uhi, nn * nn + Q2)
            if b_y <= a_y:
                continue
            cycles = scale * math.sqrt(need) * (math.sqrt(b_y) - math.sqrt(a_y)) / TWO_PI + (b_y - a_y) / q
            y, w = panel_nodes(a_y, b_y, max(32, int(math.ceil(cycles / 2.0)) + 32))
            h = w * s.U(y / (N * N)) * s.F(q, nn * nn - y)
            keep = h != 0
            y, h = y[keep], h[keep]
            H = np.empty(need)
            for c in range(0, need, 512):
                H[c : c + 512] = special.j1(scale * np.sqrt(np.outer(ell[c : c + 512], y))) @ h
            for a in _units(q):
                # sum_m lambda(m) e(-am/q) h(m): Voronoi with residue -a
                if q > 1:
                    tw = np.exp(1j * TWO_PI * ((mod_inverse(a * p % q, q) * ell) % q) / q)
                    pre = unit(a * int(nn) * int(nn), q)
                else:
                    tw, pre = 1.0, 1.0
                total += s.wn[j] * pre * eta * TWO_PI / (q * math.sqrt(p)) * np.sum(lam * tw * H)
        out[q] = complex(total)
    return out, skipped


def run_audit(
    table: CoefficientTable,
    params: ParameterBox,
    V: WeightSpec | None = None,
    U: WeightSpec | None = None,
    eta: complex = 1.0,
    tol_AB: float = 1e-3,
    tol_BC: float = 1e-6,
    tol_BD: float = 1e-3,
    voronoi_reach: float = 20.0,
    voronoi_qs=(1, 2, 3),
) -> VerificationReport:
    V = V or V_weight()
    U = U or audit_U()
    t0 = time.perf_counter()
    s = _Setup(table, params, V, U)
    info = {"N": params.N, "t": params.t, "Q": params.Q, "p": table.level, "q_max": s.qs[-1]}
    rep = VerificationReport("audit-pipeline", settings={**info, "eta": [complex(eta).real, complex(eta).imag]})

    A = S_N(table, params, V)
    B = stage_B(s)
    Btot = complex(sum(B.values()))
    rep.add("audit.A_vs_B", {**info, "tol": tol_AB}, Btot, A, _close(Btot, A, tol_AB), topic="delta expansion of S(N)")

    C, k_reach = stage_C(s)
    Ctot = complex(sum(C.values()))
    rep.add("audit.B_vs_C.q1", {**info, "k_max": k_reach[1], "tol": tol_BC}, C[1], B[1], _close(C[1], B[1], tol_BC), topic="Poisson in n")
    rep.add("audit.B_vs_C", {**info, "k_max": max(k_reach.values()), "tol": tol_BC}, Ctot, Btot, _close(Ctot, Btot, tol_BC), topic="Poisson in n")

    D, skipped = stage_D(s, eta, voronoi_reach, voronoi_qs)
    for q, val in D.items():
        rep.add("audit.B_vs_D", {**info, "q": q, "tol": tol_BD}, val, B[q], _close(val, B[q], tol_BD), topic="Voronoi in m")
    for q, need in skipped.items():
        rep.notes.append(f"stage D skipped at q = {q}: dual sum needs lambda up to {need}")
    rep.settings["seconds"] = round(time.perf_counter() - t0, 1)
    return rep


def _close(value: complex, ref: complex, tol: float) -> bool:
    return abs(value - ref) <= tol * max(abs(ref), 1e-300) or (ref == 0 and abs(value) <= tol)
