"""Parameter box for the sym^2 moment analysis."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from .modmath import is_prime


@dataclass(frozen=True)
class ParameterBox:
    """N, t, p, K with the derived Q, N0 and M0.

    Q defaults to N / sqrt(K). ``eps`` is the exponent used in the window
    flags; ``neg_eps`` is the N^eps slack in M0 (0 means the factor is 1).
    """

    N: float
    t: float
    p: int
    K: float
    Q: float | None = None
    C: float = 1.0
    M1: float | None = None
    eps: float = 0.01
    neg_eps: float = 0.0
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.N <= 0 or self.K <= 0 or self.t < 0:
            raise ValueError("need N > 0, K > 0, t >= 0")
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.Q is None:
            object.__setattr__(self, "Q", self.N / math.sqrt(self.K))
        if self.M1 is None:
            object.__setattr__(self, "M1", self.p * self.K)

    def N0(self, q: float) -> float:
        """Dual length after Poisson in n: qt/N + sqrt(K)."""
        return q * self.t / self.N + math.sqrt(self.K)

    @property
    def M0(self) -> float:
        """Dual length after Voronoi in m: N^eps p K."""
        return self.N**self.neg_eps * self.p * self.K

    def thresholds(self, q: float) -> tuple[float, float]:
        return self.N0(q), self.M0

    @property
    def N_in_window(self) -> bool:
        e = self.eps
        return self.p * self.t <= self.N <= self.p ** (1 + e) * self.t ** (1.5 + e)

    @property
    def K_in_window(self) -> bool:
        if self.t <= 1:
            return False
        return self.t**self.eps <= self.K <= self.t ** (1 - self.eps)

    def as_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "extra"}
        out.update(self.extra)
        return out

    @classmethod
    def from_overrides(cls, base: dict, overrides: dict) -> "ParameterBox":
        known = {f.name for f in fields(cls)}
        kw = dict(base)
        extra = {}
        for k, v in overrides.items():
            if k in known:
                kw[k] = v
            else:
                extra[k] = v
        kw["p"] = int(kw["p"])
        return cls(**kw, extra=extra)
