"""Trace-map dynamics on the Fricke-Vogt level surfaces.

The map ``T(x, y, z) = (2xy - z, x, y)`` preserves
``I(x, y, z) = x^2 + y^2 + z^2 - 2xyz - 1``.  The energy line
``E -> ((E - V)/2, E/2, 1)`` lies on the level ``I = V^2/4``, and an energy
belongs to the spectrum exactly when its forward orbit stays bounded.  Orbit
boundedness is decided here on a finite horizon with the two-consecutive
escape rule (see :func:`classify_orbit`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

OVERFLOW_GUARD = 1e300
DEFAULT_MAX_STEPS = 60
DEFAULT_ESCAPE_BOUND = 1e6
# The left root bracket stops at x = 0.55, where I on the curve is about 26.5,
# i.e. V of about 10.3; the supported range keeps a margin below that.
PER2_MAX_COUPLING = 8.0


class TraceOverflow(ArithmeticError):
    """A trace-map component left the representable range."""


class NoIntersection(ValueError):
    """The period-two curve does not meet S_V near p for this coupling."""


@dataclass(frozen=True)
class TraceState:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise TraceOverflow(f"non-finite trace state {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def distance(self, other: "TraceState") -> float:
        return math.dist(self.as_tuple(), other.as_tuple())


@dataclass(frozen=True)
class EscapeResult:
    """Finite-horizon verdict for the forward orbit of one energy.

    ``escaped`` with ``step = n`` means the escape rule first fired at step n.
    Otherwise the orbit survived ``steps_checked`` steps, which says
    "not yet escaped" and nothing more.
    """

    escaped: bool
    step: Optional[int]
    steps_checked: int
    final_state: TraceState

    @property
    def bounded(self) -> bool:
        return not self.escaped


@dataclass(frozen=True)
class Per2Points:
    p1: TraceState
    p2: TraceState
    separation: float


def _guard(*vals: float) -> None:
    for v in vals:
        if not math.isfinite(v) or abs(v) > OVERFLOW_GUARD:
            raise TraceOverflow(f"trace component {v!r} exceeds the overflow guard")


def trace_step(s: TraceState) -> TraceState:
    x, y, z = s.x, s.y, s.z
    nx = 2.0 * x * y - z
    _guard(nx)
    return TraceState(nx, x, y)


def trace_step_inverse(s: TraceState) -> TraceState:
    x, y, z = s.x, s.y, s.z
    nz = 2.0 * y * z - x
    _guard(nz)
    return TraceState(y, z, nz)


def invariant(s: TraceState) -> float:
    x, y, z = s.x, s.y, s.z
    return x * x + y * y + z * z - 2.0 * x * y * z - 1.0


def line_point(E: float, V: float) -> TraceState:
    return TraceState((E - V) / 2.0, E / 2.0, 1.0)


def classify_orbit(E: float, V: float, max_steps: int = DEFAULT_MAX_STEPS,
                   escape_bound: float = DEFAULT_ESCAPE_BOUND) -> EscapeResult:
    """Iterate T from the line point of E and report the first escape step.

    The state after n steps is ``(x_{n+1}, x_n, x_{n-1})`` in half-trace
    notation.  Escape is declared at the first n with ``|x_n| > 1`` and
    ``|x_{n+1}| > 1``; since ``x_{-1} = 1``, the preceding half-trace is then
    at most 1 in modulus and growth is superexponential from there on.
    ``escape_bound`` is only a backstop against overflow.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    if not escape_bound > 1:
        raise ValueError("escape_bound must exceed 1")
    s = line_point(E, V)
    for n in range(max_steps + 1):
        if (abs(s.x) > 1.0 and abs(s.y) > 1.0) or abs(s.x) > escape_bound:
            return EscapeResult(True, n, n, s)
        if n == max_steps:
            break
        s = trace_step(s)
    return EscapeResult(False, None, max_steps, s)


def period_two_curve(x: float) -> TraceState:
    """Point of Per_2(T) through p=(1,1,1): z = x, y = x/(2x-1).

    From T^2(x,y,z) = (2(2xy-z)x - y, 2xy - z, x): the third coordinate
    forces z = x, the second gives y(1 - 2x) = -x, and the first then holds
    identically since 2(2xy - x)x - y = y(2x - 1) = x.
    """
    return TraceState(x, x / (2.0 * x - 1.0), x)


def _curve_invariant(x: float) -> float:
    # I restricted to the curve factors as (x-1)^2 (4x^2+2x-1) / (2x-1)^2
    return (x - 1.0) ** 2 * (4.0 * x * x + 2.0 * x - 1.0) / (2.0 * x - 1.0) ** 2


def _bisect_scalar(f, a: float, b: float, tol: float) -> float:
    fa = f(a)
    for _ in range(200):
        if b - a <= tol:
            break
        m = 0.5 * (a + b)
        if m in (a, b):
            break
        fm = f(m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def per2_points(V: float, tol: float = 1e-12) -> Per2Points:
    """Intersections of the period-two curve with S_V on either side of p.

    Valid for 0 <= V <= PER2_MAX_COUPLING.  The invariant along the curve is
    monotone on each side of x = 1 and grows like 5 (x-1)^2 there, so the
    two roots sit about V / (2 sqrt 5) from p on each side and the
    separation is close to sqrt(3/5) V for small V.
    """
    if V < 0:
        raise ValueError("coupling must be nonnegative")
    if V > PER2_MAX_COUPLING:
        raise NoIntersection(f"V={V} outside the supported range [0, {PER2_MAX_COUPLING}]")
    p = TraceState(1.0, 1.0, 1.0)
    if V == 0:
        return Per2Points(p, p, 0.0)
    level = V * V / 4.0

    def g(x):
        return _curve_invariant(x) - level

    roots = []
    # left branch must stay right of the root of 4x^2+2x-1 (~0.309) and of the pole at 1/2
    for sign, h_max in ((+1, 4.0), (-1, 0.45)):
        h = min(V * 1e-3, h_max)
        bracket = None
        while h <= h_max:
            if g(1.0 + sign * h) > 0:
                bracket = (h / 2.0, h)
                break
            h *= 2.0
        if bracket is None and g(1.0 + sign * h_max) > 0:
            bracket = (h / 2.0, h_max)
        if bracket is None:
            raise NoIntersection(f"no sign change of I - V^2/4 near x=1 for V={V}")
        lo, hi = bracket
        h_root = _bisect_scalar(lambda t: g(1.0 + sign * t), lo, hi, tol)
        roots.append(1.0 + sign * h_root)
    p1 = period_two_curve(roots[1])
    p2 = period_two_curve(roots[0])
    return Per2Points(p1, p2, p1.distance(p2))
