"""Oscillatory integrals: quadrature oracle, stationary phase, Bessel split,
Mellin transforms and the integrals I1, I2, I left by the summation formulae.

Conventions: e(x) = exp(2 pi i x). A phase f means the integrand g(x) e(f(x)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special
from scipy.optimize import brentq

from .deltasym import DeltaKernel, g_weight, x_window
from .params import ParameterBox
from .quadrature import QuadratureConfig, QuadratureError, oscillatory_quadrature, panel_nodes
from .weights import V_weight, WeightSpec, smooth_step, taylor_coefficients

__all__ = [
    "QuadratureConfig",
    "QuadratureError",
    "oscillatory_quadrature",
    "StationaryPhaseError",
    "QuadraticPhase",
    "PhaseSpec",
    "GenericPhase",
    "phase_from_params",
    "phase_stationary_point",
    "phase_derivative_factors",
    "stationary_phase_main",
    "bessel_j_series",
    "bessel_hankel",
    "bessel_split",
    "mellin_transform",
    "mellin_inverse",
    "mellin_pair",
    "I1",
    "I2",
    "integral_I",
    "IntegralI",
    "x_kernel",
    "localization_diagnostic",
]

TWO_PI = 2.0 * math.pi


def e(x):
    return np.exp(1j * TWO_PI * np.asarray(x))


class StationaryPhaseError(ValueError):
    pass


# ---------------------------------------------------------------- phases


@dataclass(frozen=True)
class QuadraticPhase:
    """f(x) = T (x - c)^2."""

    T: float
    center: float = 1.0

    def __call__(self, x):
        return self.T * (np.asarray(x) - self.center) ** 2

    def derivative(self, x, k: int = 1):
        if k == 1:
            return 2 * self.T * (np.asarray(x) - self.center)
        if k == 2:
            return 2 * self.T + 0 * np.asarray(x)
        return 0 * np.asarray(x)

    def stationary_point(self, interval=None) -> float:
        if interval is not None and not interval[0] < self.center < interval[1]:
            raise StationaryPhaseError(f"stationary point {self.center} outside {interval}")
        return self.center

    def taylor(self, x0: float, order: int) -> np.ndarray:
        c = np.zeros(order + 1, dtype=complex)
        h = x0 - self.center
        c[0] = self.T * h * h
        if order >= 1:
            c[1] = 2 * self.T * h
        if order >= 2:
            c[2] = self.T
        return c


@dataclass(frozen=True)
class PhaseSpec:
    """P(z) = -(t/2pi) log z + L z on z > 0.

    ``linear_coefficient`` L aggregates the linear terms; ``branch`` records
    which sign of the Bessel frequency was folded into L.
    """

    t: float
    linear_coefficient: float
    branch: str = "+"

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("t must be positive")

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if np.any(z <= 0):
            raise ValueError("phase is defined for z > 0 only")
        return -self.t / TWO_PI * np.log(z) + self.linear_coefficient * z

    def derivative(self, z, k: int = 1):
        z = np.asarray(z, dtype=float)
        if k == 1:
            return -self.t / (TWO_PI * z) + self.linear_coefficient
        return self.t * (-1) ** k * math.factorial(k - 1) / (TWO_PI * z**k)

    def stationary_point(self, interval=None) -> float:
        return phase_stationary_point(self, interval)

    def taylor(self, x0: float, order: int) -> np.ndarray:
        c = np.zeros(order + 1, dtype=complex)
        c[0] = float(self(x0))
        if order >= 1:
            c[1] = float(self.derivative(x0, 1))
        k = np.arange(2, order + 1)
        c[2:] = self.t / TWO_PI * (-1.0) ** k / (k * x0**k)
        return c


@dataclass(frozen=True)
class GenericPhase:
    """A phase given by its value, first two derivatives and a holomorphic extension."""

    func: Callable
    d1: Callable
    d2: Callable
    analytic: Callable
    radius: float = 0.1

    def __call__(self, x):
        return self.func(x)

    def derivative(self, x, k: int = 1):
        if k == 1:
            return self.d1(x)
        if k == 2:
            return self.d2(x)
        c = taylor_coefficients(self.analytic, float(x), k, self.radius)
        return float(np.real(c[k])) * math.factorial(k)

    def stationary_point(self, interval) -> float:
        a, b = interval
        fa, fb = float(self.d1(a)), float(self.d1(b))
        if fa * fb > 0:
            raise StationaryPhaseError(f"f' does not change sign on {interval}")
        return float(brentq(self.d1, a, b, xtol=1e-15, rtol=1e-15))

    def taylor(self, x0: float, order: int) -> np.ndarray:
        return taylor_coefficients(self.analytic, x0, order, self.radius)


def phase_from_params(params: ParameterBox, q: int, u: float, x: float, n: int, m: float, branch: int = 1) -> PhaseSpec:
    """The y1-phase after separating variables:
    P(z) = -(t/2pi) log z - 2N^2 u x z/(qQ) - nNz/q + branch 2N sqrt(m) z/(q sqrt p).
    """
    N, Q, p = params.N, params.Q, params.p
    L = -2 * N * N * u * x / (q * Q) - n * N / q + branch * 2 * N * math.sqrt(m) / (q * math.sqrt(p))
    return PhaseSpec(params.t, L, "+" if branch > 0 else "-")


def phase_stationary_point(phase: PhaseSpec, interval=None) -> float:
    """z0 = t / (2 pi L), the zero of P'(z) = -t/(2 pi z) + L."""
    L = phase.linear_coefficient
    if L == 0:
        raise StationaryPhaseError("linear coefficient is zero: no stationary point")
    z0 = phase.t / (TWO_PI * L)
    if z0 <= 0:
        raise StationaryPhaseError(f"stationary point z0 = {z0:g} is not positive")
    if interval is not None and not interval[0] < z0 < interval[1]:
        raise StationaryPhaseError(f"stationary point z0 = {z0:g} outside {interval}")
    return z0


def phase_derivative_factors(params: ParameterBox, q: int, j: int, pmn: float) -> tuple[float, float]:
    """Split P^(j)(z0) = a(q) b(m, n) for the y1-phase with L = N pmn / q.

    z0 = qt/(2 pi N pmn), so P^(j)(z0) = (t/2pi)(-1)^j (j-1)! (2 pi N/(qt))^j pmn^j.
    """
    if j < 2:
        raise ValueError("j >= 2")
    t, N = params.t, params.N
    a = t / TWO_PI * (-1) ** j * math.factorial(j - 1) * (TWO_PI * N / (q * t)) ** j
    return a, pmn**j


# ---------------------------------------------------------- stationary phase


def _series_mul(a: np.ndarray, b: np.ndarray, deg: int) -> np.ndarray:
    return np.convolve(a, b)[: deg + 1]


def _double_factorial_odd(j: int) -> float:
    # (2j-1)!! with (-1)!! = 1
    out = 1.0
    for i in range(1, 2 * j, 2):
        out *= i
    return out


def stationary_phase_main(
    amplitude: WeightSpec,
    phase,
    order: int = 0,
    interval: tuple[float, float] | None = None,
    radius: float | None = None,
) -> complex:
    """Stationary-phase approximation to int g(x) e(f(x)) dx.

    Order 0 is e(f(g0) +- 1/8) g(g0) / sqrt|f''(g0)|. Order n adds every term
    of size |f''|^-s for s <= n relative to it. Writing f = f(g0) + c2 h^2 +
    psi(h), those terms are the h^(2j) coefficients of g(g0+h)(2 pi i
    psi(h))^mu / mu! with j - mu = s, each weighted by
    (2j-1)!! / (2^j (-2 pi i c2)^j).
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if interval is None:
        interval = amplitude.support
    x0 = phase.stationary_point(interval)
    lo, hi = amplitude.support
    if not lo < x0 < hi:
        raise StationaryPhaseError(f"stationary point {x0:g} outside amplitude support {amplitude.support}")
    f2 = float(phase.derivative(x0, 2))
    if f2 == 0:
        raise StationaryPhaseError("degenerate stationary point")
    sign = 1.0 if f2 > 0 else -1.0
    lead = complex(e(float(phase(x0)) + sign / 8.0)) / math.sqrt(abs(f2))
    if order == 0:
        return lead * complex(amplitude(np.array([x0]))[0])

    if amplitude.analytic is None:
        raise StationaryPhaseError("corrections need an analytic amplitude")
    deg = 6 * order
    r = radius if radius is not None else 0.4 * min(x0 - lo, hi - x0)
    gser = taylor_coefficients(amplitude.analytic, x0, deg, r, points=max(256, 4 * deg))
    psi = np.array(phase.taylor(x0, deg), dtype=complex)
    c2 = psi[2]
    psi[:3] = 0.0
    two_pi_i_psi = 2j * math.pi * psi
    total = 0j
    term = gser.copy()
    for mu in range(0, 2 * order + 1):
        if mu > 0:
            term = _series_mul(term, two_pi_i_psi, deg) / mu
        for j in range(mu, mu + order + 1):
            if 2 * j > deg:
                break
            total += term[2 * j] * _double_factorial_odd(j) / (2**j * (-2j * math.pi * c2) ** j)
    return lead * total


# ----------------------------------------------------------------- Bessel


def bessel_j_series(nu: int, x, terms: int = 80):
    """Power series sum_k (-1)^k (x/2)^(2k+nu) / (k! (k+nu)!)."""
    x = np.asarray(x, dtype=float)
    half = x / 2.0
    term = half**nu / math.factorial(nu)
    total = term.copy()
    h2 = half * half
    for k in range(1, terms):
        term = -term * h2 / (k * (k + nu))
        total = total + term
    return total


def bessel_hankel(nu: int, x, terms: int = 12):
    """Hankel asymptotic (J_nu, Y_nu) for large x, with ``terms`` terms of each series."""
    x = np.asarray(x, dtype=float)
    mu = 4.0 * nu * nu
    a = [1.0]
    for k in range(1, 2 * terms + 2):
        a.append(a[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    P = np.zeros_like(x)
    Qs = np.zeros_like(x)
    for k in range(terms):
        P = P + (-1) ** k * a[2 * k] / x ** (2 * k)
        Qs = Qs + (-1) ** k * a[2 * k + 1] / x ** (2 * k + 1)
    w = x - nu * math.pi / 2 - math.pi / 4
    amp = np.sqrt(2.0 / (math.pi * x))
    return amp * (P * np.cos(w) - Qs * np.sin(w)), amp * (P * np.sin(w) + Qs * np.cos(w))


def _chi(x, order: int):
    a = max(1.0, float(order))
    return smooth_step(np.asarray(x, dtype=float) / a - 1.0)


def bessel_split(order: int, x):
    """(J, W+, W-) with 2J = e^{ix} W+ + e^{-ix} W-.

    W+- = e^{-+ix} (J +- i chi Y), chi a smooth cutoff that is 0 on [0, a]
    and 1 on [2a, inf) with a = max(1, order), so chi Y stays bounded. For large x, J + iY is the Hankel function, so W+-
    are non-oscillatory of size x^(-1/2).
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be >= 0")
    J = special.jv(order, x)
    chi = _chi(x, order)
    safe = np.where(x > 0, x, 1.0)
    chiY = np.where(chi > 0, chi * special.yv(order, safe), 0.0)
    Wp = np.exp(-1j * x) * (J + 1j * chiY)
    Wm = np.exp(1j * x) * (J - 1j * chiY)
    return J, Wp, Wm


# ----------------------------------------------------------------- Mellin


def mellin_transform(weight: WeightSpec, s, panels: int = 64):
    """V~(s) = int V(x) x^(s-1) dx over the support of V; vectorised over s."""
    lo, hi = weight.support
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if lo <= 0 and np.any(s.real <= 0):
        raise ValueError("Re(s) must be positive when the support reaches 0")
    lo = max(lo, 0.0)
    tau = float(np.abs(s.imag).max(initial=0.0))
    # x^{i tau} has tau log(hi/lo)/(2 pi) cycles
    cycles = tau * math.log(hi / max(lo, 1e-300)) / TWO_PI if lo > 0 else tau
    x, w = panel_nodes(lo, hi, max(panels, int(4 * cycles) + 16))
    vals = w * weight(x)
    logx = np.log(x)
    out = np.empty(s.size, dtype=complex)
    for a in range(0, s.size, 1024):
        out[a : a + 1024] = np.exp(np.outer(s[a : a + 1024] - 1.0, logx)) @ vals
    return out


def mellin_inverse(weight: WeightSpec, x, sigma: float = 0.5, tau_max: float = 600.0, panels: int | None = None):
    """(1/2pi) int V~(sigma + i tau) x^(-sigma - i tau) d tau over |tau| <= tau_max."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if panels is None:
        # tau -> V~ x^{-i tau} varies on the scale 2 pi / log(hi/lo x)
        lo, hi = weight.support
        spread = abs(math.log(hi)) + abs(math.log(max(lo, 1e-300))) + float(np.abs(np.log(x)).max())
        panels = int(tau_max * spread / TWO_PI) + 16
    tau, w = panel_nodes(0.0, tau_max, panels)
    Vt = mellin_transform(weight, sigma + 1j * tau)
    # V real: the integrand at -tau is the conjugate of that at tau
    kern = np.exp(-np.outer(np.log(x), sigma + 1j * tau))
    return (kern @ (w * Vt)).real / math.pi


@dataclass
class MellinResult:
    s: np.ndarray
    values: np.ndarray
    x: np.ndarray
    reconstructed: np.ndarray
    original: np.ndarray

    @property
    def max_reconstruction_error(self) -> float:
        return float(np.abs(self.reconstructed - self.original).max(initial=0.0))


def mellin_pair(weight: WeightSpec, s_grid, x_points=None, sigma: float = 0.5, tau_max: float = 600.0) -> MellinResult:
    """Transform samples on ``s_grid`` plus the inversion check at ``x_points``."""
    s = np.atleast_1d(np.asarray(s_grid, dtype=complex))
    vals = mellin_transform(weight, s)
    if x_points is None:
        lo, hi = weight.support
        x_points = np.linspace(lo, hi, 22)[1:-1]
    xp = np.asarray(x_points, dtype=float)
    rec = mellin_inverse(weight, xp, sigma, tau_max)
    return MellinResult(s, vals, xp, rec, weight(xp))


# ------------------------------------------------- integrals I1, I2 and I


def _y_nodes(lo: float, hi: float, cycles: float, order: int = 20):
    return panel_nodes(lo, hi, max(16, int(math.ceil(cycles)) + 16), order)


def I1(params: ParameterBox, n: int, q: int, x, V: WeightSpec | None = None, t_sign: int = -1):
    """int y^(t_sign i t) V(y) e(N^2 y^2 x/(qQ) - nNy/q) dy; vectorised over x."""
    V = V or V_weight()
    N, Q, t = params.N, params.Q, params.t
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    lo, hi = V.support
    xm = float(np.abs(xs).max(initial=0.0))
    cycles = t / TWO_PI * math.log(hi / lo) + N * N * hi * hi * xm / (q * Q) + abs(n) * N * (hi - lo) / q
    y, w = _y_nodes(lo, hi, cycles)
    base = w * V(y) * np.exp(t_sign * 1j * t * np.log(y)) * e(-n * N * y / q)
    out = np.empty(xs.size, dtype=complex)
    for a in range(0, xs.size, 256):
        chunk = xs[a : a + 256]
        out[a : a + 256] = e(np.outer(chunk, N * N * y * y / (q * Q))) @ base
    return out if np.ndim(x) else complex(out[0])


def I2(params: ParameterBox, m: float, q: int, x, U: WeightSpec, branch: int = 1):
    """int U(y) e(-N^2 y x/(qQ) + branch 2N sqrt(m y)/(q sqrt p)) dy; vectorised over x."""
    N, Q, p = params.N, params.Q, params.p
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    lo, hi = U.support
    xm = float(np.abs(xs).max(initial=0.0))
    cycles = N * N * (hi - lo) * xm / (q * Q) + 2 * N * math.sqrt(m) * (math.sqrt(hi) - math.sqrt(lo)) / (q * math.sqrt(p))
    y, w = _y_nodes(lo, hi, cycles)
    base = w * U(y) * e(branch * 2 * N * np.sqrt(m * y) / (q * math.sqrt(p)))
    out = np.empty(xs.size, dtype=complex)
    for a in range(0, xs.size, 256):
        chunk = xs[a : a + 256]
        out[a : a + 256] = e(-np.outer(chunk, N * N * y / (q * Q))) @ base
    return out if np.ndim(x) else complex(out[0])


def _x_nodes(params: ParameterBox, q: int, X: float, extra_freq: float):
    # about 10 Gauss nodes per cycle of the fastest x-oscillation
    cycles = 4.0 * X * (params.Q / q + extra_freq)
    return panel_nodes(-2.0 * X, 2.0 * X, max(16, int(math.ceil(cycles / 2.0)) + 16))


def _window(params: ParameterBox, kernel: DeltaKernel, window: float | None) -> float:
    return window if window is not None else 4.0 * params.Q**kernel.eps


def x_kernel(params: ParameterBox, q: int, D, kernel: DeltaKernel | None = None, window: float | None = None):
    """K(D) = int W(x) g(q, x) e(N^2 x D/(qQ)) dx, the weight the x-integral puts on y1^2 - y2 = D."""
    kernel = kernel or DeltaKernel(params.Q)
    X = _window(params, kernel, window)
    N, Q = params.N, params.Q
    D = np.atleast_1d(np.asarray(D, dtype=float))
    freq = N * N * float(np.abs(D).max(initial=0.0)) / (q * Q)
    xs, w = _x_nodes(params, q, X, freq)
    weight = w * x_window(xs, X) * g_weight(kernel, q, xs, check=False)
    keep = weight != 0
    xs, weight = xs[keep], weight[keep]
    out = np.empty(D.size, dtype=complex)
    for a in range(0, D.size, 256):
        out[a : a + 256] = e(np.outer(D[a : a + 256], N * N * xs / (q * Q))) @ weight
    return out


class IntegralI:
    """I(m, n, q) for one q, reusing the x-kernel across (m, n).

    At fixed D = y1^2 - y2 the x-integral is K(D) (see :func:`x_kernel`), so

        I = int K(D) int A_n(y1) B_m(y1^2 - D) dy1 dD,

    A_n(y) = V(y) y^(-it) e(-nNy/q) and B_m(y) = U(y) e(+-2N sqrt(my)/(q sqrt p)).
    K is negligible beyond |D| ~ (1 + q/Q) Q^2/N^2; the D-range is cut at
    ``d_factor`` times that.
    """

    def __init__(
        self,
        params: ParameterBox,
        q: int,
        U: WeightSpec | None = None,
        V: WeightSpec | None = None,
        kernel: DeltaKernel | None = None,
        window: float | None = None,
        d_factor: float = 3.0,
    ):
        from .weights import U_weight

        self.params, self.q = params, q
        self.U = U or U_weight()
        self.V = V or V_weight()
        self.kernel = kernel or DeltaKernel(params.Q)
        self.X = _window(params, self.kernel, window)
        N, Q = params.N, params.Q
        vlo, vhi = self.V.support
        ulo, uhi = self.U.support
        cut = d_factor * (1.0 + q / Q) * Q * Q / (N * N)
        d_lo, d_hi = max(-cut, vlo * vlo - uhi), min(cut, vhi * vhi - ulo)
        if d_hi <= d_lo:
            self.D = np.zeros(0)
            self.wK = np.zeros(0, dtype=complex)
            return
        cycles = (d_hi - d_lo) * N * N * 2.0 * self.X / (q * Q)
        D, w = panel_nodes(d_lo, d_hi, max(16, int(math.ceil(cycles / 2.0)) + 16))
        self.D = D
        self.wK = w * x_kernel(params, q, D, self.kernel, self.X)

    def table(self, m_values, n_values, branch: int = 1) -> np.ndarray:
        """I(m, n) for all pairs; n enters only through e(-nNy/q), so each m costs one D-sweep."""
        m_values = np.atleast_1d(np.asarray(m_values, dtype=float))
        n_values = np.atleast_1d(np.asarray(n_values, dtype=int))
        out = np.zeros((m_values.size, n_values.size), dtype=complex)
        if self.D.size == 0:
            return out
        P = self.params
        N, q, t, p = P.N, self.q, P.t, P.p
        lo, hi = self.V.support
        n_top = int(np.abs(n_values).max())
        m_top = float(m_values.max())
        cycles = t / TWO_PI * math.log(hi / lo) + n_top * N * (hi - lo) / q + 2 * N * math.sqrt(m_top) * hi / (q * math.sqrt(p))
        y, w = _y_nodes(lo, hi, cycles)
        base = w * self.V(y) * np.exp(-1j * t * np.log(y))
        A = base[:, None] * e(-np.outer(y, n_values) * N / q)
        for i, m in enumerate(m_values):
            R = np.zeros(y.size, dtype=complex)
            for a in range(0, self.D.size, 512):
                y2 = y[None, :] ** 2 - self.D[a : a + 512, None]
                B = self.U(y2.ravel()).reshape(y2.shape)
                B = B * e(branch * 2 * N * np.sqrt(m * np.maximum(y2, 0.0)) / (q * math.sqrt(p)))
                R += self.wK[a : a + 512] @ B
            out[i] = R @ A
        return out

    def __call__(self, m: float, n: int, branch: int = 1) -> complex:
        if self.D.size == 0:
            return 0j
        P = self.params
        N, q, t, p = P.N, self.q, P.t, P.p
        lo, hi = self.V.support
        cycles = t / TWO_PI * math.log(hi / lo) + abs(n) * N * (hi - lo) / q + 2 * N * math.sqrt(m) * hi / (q * math.sqrt(p))
        y, w = _y_nodes(lo, hi, cycles)
        A = w * self.V(y) * np.exp(-1j * t * np.log(y)) * e(-n * N * y / q)
        out = 0j
        for a in range(0, self.D.size, 512):
            y2 = y[None, :] ** 2 - self.D[a : a + 512, None]
            B = self.U(y2.ravel()).reshape(y2.shape)
            B = B * e(branch * 2 * N * np.sqrt(m * np.maximum(y2, 0.0)) / (q * math.sqrt(p)))
            out += self.wK[a : a + 512] @ (B @ A)
        return complex(out)


def integral_I(
    params: ParameterBox,
    m: float,
    n: int,
    q: int,
    branch: int = 1,
    U: WeightSpec | None = None,
    V: WeightSpec | None = None,
    kernel: DeltaKernel | None = None,
    window: float | None = None,
    method: str = "kernel",
    max_nodes: int = 400_000,
) -> complex:
    """I(m, n, q) = int W(x) g(q, x) int V(y1) y1^(-it) int U(y2) e(phase) dy2 dy1 dx.

    ``method="x"`` integrates over x outermost, with the y1 and y2 integrals
    separated at each x (I1 times I2); it needs a number of x-nodes growing
    like N^2/(qQ) and is meant for small parameters. ``method="kernel"``
    integrates over x first at fixed y1^2 - y2 (:class:`IntegralI`).
    """
    from .weights import U_weight

    U = U or U_weight()
    V = V or V_weight()
    kernel = kernel or DeltaKernel(params.Q)
    if method == "kernel":
        return IntegralI(params, q, U, V, kernel, window)(m, n, branch)
    if method != "x":
        raise ValueError(f"unknown method {method!r}")
    X = _window(params, kernel, window)
    N, Q = params.N, params.Q
    # I1 * I2 oscillates in x at frequency up to N^2 (y1^2 + y2)/(qQ)
    freq = N * N * (V.support[1] ** 2 + U.support[1]) / (q * Q)
    xs, w = _x_nodes(params, q, X, freq)
    if xs.size > max_nodes:
        raise QuadratureError(f"x quadrature needs {xs.size} nodes (budget {max_nodes})")
    weight = w * x_window(xs, X) * g_weight(kernel, q, xs, check=False)
    keep = weight != 0
    xs, weight = xs[keep], weight[keep]
    return complex(np.sum(weight * I1(params, n, q, xs, V) * I2(params, m, q, xs, U, branch)))


@dataclass
class LocalizationResult:
    q: int
    predicted: float
    measured: float
    flagged: bool
    threshold: float


def localization_diagnostic(
    params: ParameterBox,
    q: int,
    kernel: DeltaKernel | None = None,
    negligible: float = 1e-3,
    eps: float | None = None,
    points: int = 801,
) -> LocalizationResult:
    """Measured width of K(D) against the window N^(2 eps) C/(QK).

    The measured width is the largest |D| with |K(D)| above ``negligible``
    times its maximum. The window with y1 ~ 1 bounds |y1 - sqrt y2| by the same
    amount up to a constant, so a width beyond the window is flagged.
    """
    eps = params.eps if eps is None else eps
    predicted = params.N ** (2 * eps) * q / (params.Q * params.K)
    D = np.linspace(0.0, 40.0 * predicted, points)
    K = np.abs(x_kernel(params, q, D, kernel))
    above = np.nonzero(K >= negligible * K.max())[0]
    measured = float(D[above[-1]]) if above.size else 0.0
    return LocalizationResult(q, predicted, measured, measured > predicted, negligible)
