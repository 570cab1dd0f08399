"""Smooth compactly supported weights used throughout.

Two families:

* the canonical bump ``exp(1 - 1/(1 - z^2))`` on an interval, equal to 1 at
  the centre;
* plateau weights, identically 1 on an inner interval and 0 outside an outer
  one, built from the smooth step ``s(x) = psi(x) / (psi(x) + psi(1 - x))``
  with ``psi(x) = exp(-1/x)``.

Every weight carries an ``analytic`` continuation valid near interior points,
which lets :func:`taylor_coefficients` read off derivatives by a Cauchy
integral instead of finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


def _bump_core(z):
    return np.exp(1.0 - 1.0 / (1.0 - z * z))


def canonical_bump(x, lo: float = 1.0, hi: float = 2.0):
    x = np.asarray(x, dtype=float)
    z = (2.0 * x - lo - hi) / (hi - lo)
    out = np.zeros_like(z)
    inside = np.abs(z) < 1.0
    out[inside] = _bump_core(z[inside])
    return out


def _psi(x):
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(x):
    """0 for x <= 0, 1 for x >= 1, C-infinity in between."""
    x = np.asarray(x, dtype=float)
    a = _psi(x)
    b = _psi(1.0 - x)
    return a / (a + b)


def _step_analytic(x):
    a = np.exp(-1.0 / x)
    b = np.exp(-1.0 / (1.0 - x))
    return a / (a + b)


def plateau(x, outer_lo: float, inner_lo: float, inner_hi: float, outer_hi: float):
    x = np.asarray(x, dtype=float)
    up = smooth_step((x - outer_lo) / (inner_lo - outer_lo))
    down = smooth_step((outer_hi - x) / (outer_hi - inner_hi))
    return up * down


@dataclass(frozen=True)
class WeightSpec:
    """A smooth amplitude with compact support.

    ``func`` is vectorised over real arrays. ``analytic`` is a holomorphic
    extension valid in a neighbourhood of any interior point (used only for
    Taylor coefficients). ``deriv_bounds`` optionally records constants C_s
    with |g^(s)| <= C_s on the support.
    """

    func: Callable
    support: tuple[float, float]
    label: str = ""
    analytic: Callable | None = None
    deriv_bounds: tuple[float, ...] = field(default=())

    def __call__(self, x):
        return self.func(x)

    def scaled(self, factor: float) -> "WeightSpec":
        """x -> w(x / factor), support stretched by ``factor``."""
        f, a = self.func, self.analytic
        lo, hi = self.support
        return WeightSpec(
            lambda x: f(np.asarray(x) / factor),
            (lo * factor, hi * factor),
            f"{self.label}(x/{factor:g})",
            (lambda z: a(z / factor)) if a is not None else None,
        )


def bump_weight(lo: float = 1.0, hi: float = 2.0) -> WeightSpec:
    def analytic(z):
        return _bump_core((2.0 * z - lo - hi) / (hi - lo))

    return WeightSpec(lambda x: canonical_bump(x, lo, hi), (lo, hi), f"bump[{lo:g},{hi:g}]", analytic)


def plateau_weight(outer_lo: float, inner_lo: float, inner_hi: float, outer_hi: float) -> WeightSpec:
    def analytic(z):
        z = np.asarray(z, dtype=complex)
        zr = float(np.real(np.mean(z)))
        if zr <= inner_lo:
            return _step_analytic((z - outer_lo) / (inner_lo - outer_lo))
        if zr >= inner_hi:
            return _step_analytic((outer_hi - z) / (outer_hi - inner_hi))
        return np.ones_like(z)

    return WeightSpec(
        lambda x: plateau(x, outer_lo, inner_lo, inner_hi, outer_hi),
        (outer_lo, outer_hi),
        f"plateau[{outer_lo:g},{inner_lo:g},{inner_hi:g},{outer_hi:g}]",
        analytic,
    )


def V_weight() -> WeightSpec:
    """Support [1/2, 5/2], identically 1 on [1, 2]."""
    return plateau_weight(0.5, 1.0, 2.0, 2.5)


def U_weight() -> WeightSpec:
    """Support [3/4, 9/4], identically 1 on [1, 2]."""
    return plateau_weight(0.75, 1.0, 2.0, 2.25)


def taylor_coefficients(func: Callable, x0: float, order: int, radius: float, points: int = 128) -> np.ndarray:
    """c_k = f^(k)(x0)/k! for k = 0..order, from a Cauchy integral on |z - x0| = radius.

    ``func`` must be holomorphic on the closed disc. The trapezoid rule on the
    circle converges geometrically, so ``points`` well above ``order`` gives
    coefficients accurate to roughly machine precision times radius**-k.
    """
    theta = 2.0 * np.pi * np.arange(points) / points
    z = x0 + radius * np.exp(1j * theta)
    vals = np.asarray(func(z), dtype=complex)
    coeffs = np.fft.fft(vals) / points
    k = np.arange(order + 1)
    return coeffs[: order + 1] / radius**k
