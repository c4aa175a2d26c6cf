"""Problem parameters, reaction terms and persistence thresholds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Callable

import numpy as np


class InvalidParameterError(ValueError):
    """Raised for nonpositive or non-finite model constants."""


class RegimeError(RuntimeError):
    """Raised when an operation needs persistence but the parameters give extinction."""


class NumericalError(RuntimeError):
    """Raised when an iterative method fails to reach its tolerance."""


@dataclass(frozen=True)
class Params:
    """Constants of the road-strip system.

    D, d are the road and field diffusivities, mu the road-to-field and nu the
    field-to-road exchange rates, L the strip width.
    """

    D: float
    d: float
    mu: float
    nu: float
    L: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise InvalidParameterError(f"{f.name} must be a positive finite number, got {v!r}")
            object.__setattr__(self, f.name, float(v))

    def replace(self, **kw) -> "Params":
        vals = {f.name: getattr(self, f.name) for f in fields(self)}
        vals.update(kw)
        return Params(**vals)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# The checks only need regression protection, so a fixed sample grid suffices.
_CHECK_GRID = np.linspace(0.0, 2.0, 1001)[1:]


@dataclass(frozen=True)
class Reaction:
    """A KPP nonlinearity ``f`` with its exact slope at zero.

    ``f`` must accept numpy arrays. ``kpp_monotone`` flags that ``f(s)/s`` is
    nonincreasing, which is what makes the positive steady state unique.
    ``poly`` optionally gives f as ascending polynomial coefficients, which
    lets the compiled simulator kernel evaluate it.
    """

    f: Callable[[np.ndarray], np.ndarray]
    fprime0: float
    name: str = "custom"
    kpp_monotone: bool = False
    antiderivative: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)
    poly: tuple[float, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.fprime0) and self.fprime0 > 0):
            raise InvalidParameterError(f"fprime0 must be positive, got {self.fprime0!r}")
        self.check()

    def __call__(self, s):
        return self.f(s)

    def check(self) -> None:
        """Validate f(0)=f(1)=0, 0<f(s)<f'(0)s on (0,1), f<0 on (1,2] and, if flagged,
        monotonicity of f(s)/s, all on a fixed sample grid."""
        eps = 1e-14
        f0, f1 = float(self.f(np.float64(0.0))), float(self.f(np.float64(1.0)))
        if abs(f0) > eps or abs(f1) > eps:
            raise InvalidParameterError(f"reaction {self.name!r}: need f(0)=f(1)=0, got {f0}, {f1}")
        s = _CHECK_GRID
        vals = np.asarray(self.f(s), dtype=float)
        inside = s < 1.0
        above = s > 1.0
        lin = self.fprime0 * s[inside]
        if not (np.all(vals[inside] > 0) and np.all(vals[inside] < lin)):
            raise InvalidParameterError(f"reaction {self.name!r}: need 0 < f(s) < f'(0) s on (0,1)")
        if not np.all(vals[above] < 0):
            raise InvalidParameterError(f"reaction {self.name!r}: need f < 0 on (1, 2]")
        if self.kpp_monotone:
            ratio = vals[s <= 1.0] / s[s <= 1.0]
            if np.any(np.diff(ratio) > 1e-12):
                raise InvalidParameterError(f"reaction {self.name!r}: f(s)/s is not nonincreasing")


def _logistic(s):
    return s * (1.0 - s)


def _logistic_F(s):
    return s**2 / 2.0 - s**3 / 3.0


def _remark33(s):
    return s * (((-6.0 * s + 9.0) * s - 4.0) * s + 1.0)


def _remark33_F(s):
    return (((-1.2 * s + 2.25) * s - 4.0 / 3.0) * s + 0.5) * s**2


LOGISTIC = Reaction(_logistic, 1.0, "logistic", kpp_monotone=True, antiderivative=_logistic_F,
                    poly=(0.0, 1.0, -1.0))
# f(s)/s is not monotone here, so several steady states can coexist.
REMARK33 = Reaction(_remark33, 1.0, "remark33", kpp_monotone=False, antiderivative=_remark33_F,
                    poly=(0.0, 1.0, -4.0, 9.0, -6.0))

REACTIONS = {r.name: r for r in (LOGISTIC, REMARK33)}


def get_reaction(name: str) -> Reaction:
    try:
        return REACTIONS[name]
    except KeyError:
        raise InvalidParameterError(f"unknown reaction {name!r}; choose from {sorted(REACTIONS)}") from None


def c_kpp(r: Reaction, d: float) -> float:
    """Free-space KPP speed 2*sqrt(d f'(0))."""
    if not (d > 0 and r.fprime0 > 0):
        raise InvalidParameterError("c_kpp needs d > 0 and f'(0) > 0")
    return 2.0 * math.sqrt(d * r.fprime0)


def persistence_margin(p: Params, r: Reaction) -> float:
    """f'(0)/d - (pi/2L)^2; positive means the population persists."""
    return r.fprime0 / p.d - (math.pi / (2.0 * p.L)) ** 2


def require_persistence(p: Params, r: Reaction) -> None:
    if persistence_margin(p, r) <= 0:
        raise RegimeError(
            f"extinction regime: f'(0)/d = {r.fprime0 / p.d:.6g} <= (pi/2L)^2 = {(math.pi / (2 * p.L)) ** 2:.6g}"
        )
