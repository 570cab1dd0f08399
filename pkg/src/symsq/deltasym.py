"""The circle-method delta symbol.

With a smooth weight omega supported in [Q/2, Q] and normalised so that
sum_{n>=1} omega(n) = 1, put

    Delta_q(u) = sum_{r>=1} (qr)^{-1} (omega(qr) - omega(|u|/(qr))).

Then for every integer n

    [n = 0] = sum_{q>=1} c_q(n) Delta_q(n),

with c_q the Ramanujan sum; only q <= max(Q, 2|n|/Q) contribute. Multiplying
by an envelope f with f(0) = 1, supported in [-Q^2, Q^2], and writing the
u-Fourier transform

    g(q, x) = int Delta_q(u) f(u) e(-ux/(qQ)) du

turns the identity into the x-integral form

    [n = 0] = (1/Q) sum_q (1/q) c_q(n) int g(q, x) e(nx/(qQ)) dx.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .expsums import ramanujan_sum
from .quadrature import QuadratureError, panel_nodes
from .report import VerificationReport
from .weights import plateau

TWO_PI = 2.0 * math.pi


def _omega_raw(y, Q: float):
    y = np.asarray(y, dtype=float)
    z = (4.0 * y - 3.0 * Q) / Q
    out = np.zeros_like(z)
    inside = np.abs(z) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - z[inside] ** 2))
    return out


def _envelope(u, Q: float):
    u = np.asarray(u, dtype=float)
    z = u / (Q * Q)
    out = np.zeros_like(z)
    inside = np.abs(z) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - z[inside] ** 2))
    return out


@dataclass(frozen=True)
class DeltaKernel:
    """Kernel data for a fixed Q. Immutable; evaluation is pure."""

    Q: float
    eps: float = 0.1
    omega_scale: float = field(init=False)

    def __post_init__(self):
        if self.Q < 1:
            raise ValueError("Q must be >= 1")
        n = np.arange(1, int(self.Q) + 2, dtype=float)
        total = float(_omega_raw(n, self.Q).sum())
        if total <= 0:
            # Q too small for an integer inside (Q/2, Q)
            raise ValueError(f"omega has no integer mass for Q={self.Q}")
        object.__setattr__(self, "omega_scale", 1.0 / total)

    def omega(self, y):
        return self.omega_scale * _omega_raw(y, self.Q)

    def envelope_f(self, u):
        return _envelope(u, self.Q)

    @property
    def q_max(self) -> int:
        """Largest q with Delta_q not identically zero on |u| <= Q^2."""
        return int(2 * self.Q)


def delta_kernel_weight(kernel: DeltaKernel, q: int, u):
    """Delta_q(u); vectorised over u."""
    if q < 1:
        raise ValueError("q must be positive")
    Q = kernel.Q
    u = np.abs(np.asarray(u, dtype=float))
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    rs = np.arange(1, int(Q // q) + 2)
    first = float(np.sum(kernel.omega(q * rs) / (q * rs)))
    second = np.zeros_like(u)
    if u.size:
        # omega(|u|/(qr)) is nonzero only for |u|/(qQ) < r < 2|u|/(qQ)
        r_hi = int(2.0 * u.max() / (q * Q)) + 1
        for r in range(1, r_hi + 1):
            second += kernel.omega(u / (q * r)) / (q * r)
    out = first - second
    return float(out[0]) if scalar else out


def _u_nodes(kernel: DeltaKernel, q: int, x_max: float, refine: int):
    Q = kernel.Q
    L = Q * Q
    # oscillation period in u is qQ/|x|
    width = min(q * Q / (2.0 * x_max + 2.0), q * Q / 16.0)
    panels = max(16, int(math.ceil(L / width))) * refine
    return panel_nodes(0.0, L, panels)


def _g_matrix(kernel: DeltaKernel, q: int, xs: np.ndarray, refine: int) -> np.ndarray:
    u, w = _u_nodes(kernel, q, float(np.abs(xs).max(initial=0.0)), refine)
    F = delta_kernel_weight(kernel, q, u) * kernel.envelope_f(u) * w
    scale = TWO_PI / (q * kernel.Q)
    out = np.empty(xs.size)
    # Delta_q and f are even, so the transform is real: 2 int_0 (...) cos
    for lo in range(0, xs.size, 512):
        chunk = xs[lo : lo + 512]
        out[lo : lo + 512] = 2.0 * (np.cos(np.outer(chunk, u) * scale) @ F)
    return out


def g_weight(kernel: DeltaKernel, q: int, x, tol: float = 1e-10, check: bool = True):
    """g(q, x) by composite Gauss-Legendre in u; vectorised over x.

    With ``check`` the estimate is recomputed on panels half as wide and a
    :class:`QuadratureError` is raised if the two differ by more than ``tol``.
    """
    if q < 1:
        raise ValueError("q must be positive")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if q > kernel.q_max:
        vals = np.zeros(xs.size)
    else:
        vals = _g_matrix(kernel, q, xs, 1)
        if check:
            finer = _g_matrix(kernel, q, xs, 2)
            err = float(np.abs(finer - vals).max())
            if err > tol:
                raise QuadratureError(f"g({q}, x) unresolved: refinement moved it by {err:.3g}", (vals, finer))
            vals = finer
    return float(vals[0]) if np.ndim(x) == 0 else vals


def x_window(x, half_width: float):
    """W(x): 1 on [-X, X], 0 outside [-2X, 2X]."""
    return plateau(np.abs(np.asarray(x, dtype=float)), -1.0, 0.0, half_width, 2.0 * half_width)


@dataclass
class DeltaExpansion:
    n: int
    form: str
    value: complex
    terms: int
    window: float | None = None


def delta_expand(
    n: int,
    kernel: DeltaKernel,
    form: str = "kernel_sum",
    window: float | None = None,
) -> DeltaExpansion:
    """Right side of the delta-symbol identity at the integer n.

    ``kernel_sum`` sums c_q(n) Delta_q(n) f(n) and is exact. ``g_integral``
    integrates W(x) g(q, x) e(nx/(qQ)) over x with the window W of half-width
    ``window`` (default 4 Q^eps); its distance from [n = 0] is the truncation
    residual.
    """
    Q = kernel.Q
    if abs(n) > Q * Q:
        raise ValueError(f"|n| = {abs(n)} exceeds Q^2 = {Q * Q:g}")
    q_top = max(kernel.q_max, 1)
    if form == "kernel_sum":
        fn = float(kernel.envelope_f(float(n)))
        total = 0.0
        for q in range(1, q_top + 1):
            total += ramanujan_sum(n, q) * delta_kernel_weight(kernel, q, float(n))
        return DeltaExpansion(n, form, complex(total * fn), q_top)
    if form != "g_integral":
        raise ValueError(f"unknown form {form!r}")
    X = window if window is not None else 4.0 * Q**kernel.eps
    total = 0j
    for q in range(1, q_top + 1):
        c = ramanujan_sum(n, q)
        if c == 0:
            continue
        # g(q, .) has frequencies up to Q/q in x
        freq = Q / q + abs(n) / (q * Q)
        panels = max(16, int(math.ceil(2.0 * X * freq)))
        xs, w = panel_nodes(0.0, 2.0 * X, panels)
        g = g_weight(kernel, q, xs, check=False)
        # even in x: integrate cos over [0, 2X] twice
        integral = 2.0 * np.sum(w * x_window(xs, X) * g * np.cos(TWO_PI * n * xs / (q * Q)))
        total += c * integral / (q * Q)
    return DeltaExpansion(n, form, complex(total), q_top, X)


def _fd_derivative(kernel: DeltaKernel, q: int, x: float, order: int, h: float) -> float:
    if order == 1:
        stencil = {-1: -0.5, 1: 0.5}
    elif order == 2:
        stencil = {-1: 1.0, 0: -2.0, 1: 1.0}
    elif order == 3:
        stencil = {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5}
    elif order == 4:
        stencil = {-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0}
    else:
        raise ValueError("order must be 1..4")
    pts = np.array([x + k * h for k in stencil])
    vals = g_weight(kernel, q, pts, check=False)
    return float(np.dot(list(stencil.values()), vals) / h**order)


@dataclass
class GWeightSample:
    q: int
    x: float
    value: complex
    derivative_estimates: list[tuple[int, float]] = field(default_factory=list)

    def __post_init__(self):
        for order, mag in self.derivative_estimates:
            if order > 4 or not math.isfinite(mag):
                raise ValueError(f"bad derivative estimate ({order}, {mag})")


def sample_g(kernel: DeltaKernel, q: int, x: float, orders=(1, 2), h: float = 1e-2) -> GWeightSample:
    value = g_weight(kernel, q, x, check=False)
    ders = [(k, abs(_fd_derivative(kernel, q, x, k, h))) for k in orders]
    return GWeightSample(q, x, complex(value), ders)


def decay_slope(kernel: DeltaKernel, q: int, x_lo: float = 2.0, x_hi: float = 64.0, points: int = 41) -> float:
    """Least-squares slope of log|g(q, x)| against log x on a geometric grid."""
    xs = np.geomspace(x_lo, x_hi, points)
    vals = np.abs(g_weight(kernel, q, xs))
    vals = np.maximum(vals, 1e-300)
    A = np.vstack([np.log(xs), np.ones_like(xs)]).T
    return float(np.linalg.lstsq(A, np.log(vals), rcond=None)[0][0])


def kernel_envelope_constant(kernel: DeltaKernel, u_points: int = 4001) -> float:
    """max |Delta_q(u)| / (1/(Q(q+Q)) + 1/(|u|+qQ)) over q <= 2Q, 0 <= u <= Q^2."""
    Q = kernel.Q
    u = np.linspace(0.0, Q * Q, u_points)
    worst = 0.0
    for q in range(1, kernel.q_max + 1):
        env = 1.0 / (Q * (q + Q)) + 1.0 / (u + q * Q)
        worst = max(worst, float((np.abs(delta_kernel_weight(kernel, q, u)) / env).max()))
    return worst


def g_bound_report(
    kernel: DeltaKernel,
    q_grid,
    x_grid,
    A: float = 1.0,
    C: float = 10.0,
    slope_max: float = -2.0,
    deriv_C: float = 10.0,
    decay_qs=(1,),
    envelope_C: float = 10.0,
) -> VerificationReport:
    """Measured behaviour of g(q, x) against the standard bounds.

    Rows:
      g.small_q     |g - 1| vs C (1/(qQ)) (q/Q + |x|)^A for q <= Q^(1-eps)
      g.decay       fitted log-log slope of |g| on [2, 64] vs ``slope_max``
      g.large_q     finite-difference |g^(k)| vs deriv_C Q^(eps k) for q >= Q^(1-eps)
      g.kernel      max |Delta_q(u)| over its envelope vs ``envelope_C``
    """
    Q, eps = kernel.Q, kernel.eps
    rep = VerificationReport("verify-delta", settings={"Q": Q, "eps": eps, "A": A, "C": C})
    q_small = Q ** (1.0 - eps)
    xs = np.asarray(list(x_grid), dtype=float)
    for q in q_grid:
        q = int(q)
        if q <= q_small:
            g = g_weight(kernel, q, xs, check=False)
            env = (1.0 / (q * Q)) * (q / Q + np.abs(xs)) ** A
            ratio = np.abs(g - 1.0) / env
            i = int(np.argmax(ratio))
            rep.add(
                "g.small_q",
                {"Q": Q, "q": q, "x": float(xs[i]), "A": A, "constant": float(ratio[i]), "C": C},
                complex(abs(g[i] - 1.0)),
                complex(C * env[i]),
                bool(ratio.max() <= C),
                topic="g close to 1 for small q",
            )
        if q >= q_small:
            for x in xs:
                s = sample_g(kernel, q, float(x), orders=(1, 2))
                for k, mag in s.derivative_estimates:
                    bound = deriv_C * Q ** (eps * k)
                    rep.add(
                        "g.large_q",
                        {"Q": Q, "q": q, "x": float(x), "order": k},
                        complex(mag),
                        complex(bound),
                        mag <= bound,
                        topic="no oscillation for large q",
                    )
    for q in decay_qs:
        slope = decay_slope(kernel, int(q))
        rep.add(
            "g.decay",
            {"Q": Q, "q": int(q), "x_range": [2.0, 64.0]},
            complex(slope),
            complex(slope_max),
            slope <= slope_max,
            topic="rapid decay in x",
        )
    c = kernel_envelope_constant(kernel)
    rep.add(
        "g.kernel",
        {"Q": Q, "q_range": [1, kernel.q_max], "u_range": [0.0, Q * Q]},
        complex(c),
        complex(envelope_C),
        c <= envelope_C,
        topic="kernel envelope",
    )
    return rep
