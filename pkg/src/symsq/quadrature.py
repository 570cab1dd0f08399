"""Composite Gauss-Legendre quadrature for oscillatory integrands."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

TWO_PI = 2.0 * math.pi


class QuadratureError(RuntimeError):
    """Panel refinement failed to converge; carries the last two estimates."""

    def __init__(self, message: str, estimates=()):
        super().__init__(message)
        self.estimates = tuple(estimates)


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-11
    max_panels: int = 1 << 17
    resolution: float = 4.0
    order: int = 20

    def __post_init__(self):
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be positive")
        if self.max_panels < 16:
            raise ValueError("max_panels must be at least 16")


@lru_cache(maxsize=64)
def _leggauss(order: int):
    return leggauss(order)


def panel_nodes(a: float, b: float, panels: int, order: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Gauss-Legendre on [a, b]."""
    x0, w0 = _leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    lo = edges[:-1, None]
    hi = edges[1:, None]
    half = (hi - lo) / 2.0
    nodes = (half * x0 + (lo + hi) / 2.0).ravel()
    weights = (half * w0).ravel()
    return nodes, weights


def _phase_cycles(phase: Callable, a: float, b: float, samples: int = 4097) -> float:
    x = np.linspace(a, b, samples)
    return float(np.abs(np.diff(phase(x))).sum())


def oscillatory_quadrature(
    amplitude: Callable,
    phase: Callable,
    interval: tuple[float, float],
    config: QuadratureConfig = QuadratureConfig(),
) -> complex:
    """Integral of amplitude(x) * e(phase(x)) over ``interval``.

    The panel count starts at ``resolution`` panels per cycle of the phase
    (at least 16) and doubles until two successive estimates agree to
    ``abs_tol``.
    """
    a, b = interval
    if not b > a:
        raise ValueError(f"empty interval {interval}")
    cycles = _phase_cycles(phase, a, b)
    panels = max(16, int(math.ceil(config.resolution * cycles)))
    prev = None
    while panels <= config.max_panels:
        x, w = panel_nodes(a, b, panels, config.order)
        est = complex(np.sum(w * amplitude(x) * np.exp(1j * TWO_PI * phase(x))))
        if prev is not None and abs(est - prev) <= config.abs_tol:
            return est
        prev = est
        panels *= 2
    raise QuadratureError(
        f"no convergence on {interval} within {config.max_panels} panels",
        (prev, est) if prev is not None else (),
    )
