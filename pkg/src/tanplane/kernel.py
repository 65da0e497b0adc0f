"""Evaluation of f(z) = lam * tan(z**2), its derivative, inverse branches,
asymptotic tracts and guarded orbit iteration.

Everything here is a pure function of its arguments.
"""
from __future__ import annotations

import cmath
import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import BranchPointHit, PoleProximity

POLE_TOL = 1e-12
OVERFLOW = 1e15
ESCAPE_RADIUS = 1e8
CYCLE_TOL = 1e-9
RING_SIZE = 64
# lag scan of the ring buffer runs every CHECK_STRIDE steps
CHECK_STRIDE = 8


class _Infinity:
    """The point at infinity of the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()
Extended = Union[complex, _Infinity]


def is_infinite(value) -> bool:
    return value is INFINITY


def pole_distance(w: complex) -> float:
    """Distance from w to the nearest pole (k + 1/2)*pi of tan."""
    x = w.real / math.pi
    k = math.floor(x)
    return math.hypot((x - k - 0.5) * math.pi, w.imag)


def near_pole(z: complex) -> bool:
    w = z * z
    return pole_distance(w) < POLE_TOL * (1.0 + abs(w))


def eval_f(lam: complex, z: complex) -> Extended:
    """lam * tan(z**2), or INFINITY at (or numerically at) a pole."""
    w = z * z
    if pole_distance(w) < POLE_TOL * (1.0 + abs(w)):
        return INFINITY
    t = cmath.tan(w)
    if abs(t) > OVERFLOW:
        return INFINITY
    return lam * t


def sec2(w: complex) -> complex:
    """sec(w)**2, evaluated without overflow for large |Im w|."""
    # 4q/(1+q)^2 with |q| <= 1
    if w.imag > 0:
        q = cmath.exp(2j * w)
    else:
        q = cmath.exp(-2j * w)
    d = 1.0 + q
    if d == 0:
        raise PoleProximity(w)
    s = 4.0 * q / (d * d)
    if not (math.isfinite(s.real) and math.isfinite(s.imag)) or abs(s) > 1e300:
        raise PoleProximity(w)
    return s


def eval_df(lam: complex, z: complex) -> complex:
    """Derivative 2*lam*z*sec(z**2)**2."""
    w = z * z
    if pole_distance(w) < POLE_TOL * (1.0 + abs(w)):
        raise PoleProximity(z)
    return 2.0 * lam * z * sec2(w)


def inverse_branch(lam: complex, w: complex, n: int = 0, sign: int = 1) -> complex:
    """Preimage sign*sqrt(Arctan(w/lam) + n*pi) of w under f.

    Principal Arctan and principal square root; the branch is chosen only
    through ``n`` and ``sign``.
    """
    v = w / lam
    if abs(v - 1j) < 1e-14 * (1 + abs(v)) or abs(v + 1j) < 1e-14 * (1 + abs(v)):
        raise BranchPointHit(v)
    try:
        a = cmath.atan(v)
    except ValueError:
        raise BranchPointHit(v) from None
    return sign * cmath.sqrt(a + n * math.pi)


@dataclass(frozen=True)
class Tract:
    quadrant: int
    r: float


_QUADRANT = {(True, True): 1, (False, True): 2, (False, False): 3, (True, False): 4}


def quadrant_of(z: complex) -> Optional[int]:
    if z.real == 0 or z.imag == 0:
        return None
    return _QUADRANT[(z.real > 0, z.imag > 0)]


def tract_of(z: complex, r: float) -> Optional[Tract]:
    """Asymptotic tract containing z, if any.

    Quadrants 1 and 3 carry Im z^2 > r, quadrants 2 and 4 carry Im z^2 < -r
    (images of the first-quadrant tract under z -> -z, z -> +-iz).
    """
    if r <= 0:
        raise ValueError("tract threshold must be positive")
    q = quadrant_of(z)
    if q is None or abs((z * z).imag) <= r:
        return None
    return Tract(q, r)


class Fate(enum.Enum):
    TRAP = "trap"
    POLE = "pole"
    CYCLE = "cycle"
    ESCAPED = "escaped"
    EXHAUSTED = "exhausted"


@dataclass
class OrbitOutcome:
    fate: Fate
    step: Optional[int] = None
    period: Optional[int] = None
    trace: Optional[list] = field(default=None, repr=False)
    # last ``period`` iterates, oldest first, for CYCLE outcomes
    tail: Optional[list] = field(default=None, repr=False)


def _smallest_lag(ring: deque, z: complex, tol: float) -> Optional[int]:
    bound = tol * (1.0 + abs(z))
    n = len(ring)
    # ring[-1] is z itself
    for lag in range(1, n):
        if abs(z - ring[n - 1 - lag]) < bound:
            return lag
    return None


def orbit(
    lam: complex,
    z0: complex,
    budget: int,
    trap_radius: float,
    escape_radius: float = ESCAPE_RADIUS,
    keep_trace: bool = False,
    cycle_tol: float = CYCLE_TOL,
) -> OrbitOutcome:
    """Iterate f from z0 for at most ``budget`` steps and report the fate.

    Step s refers to the iterate z_s (z_0 = z0).  TRAP: |z_s| < trap_radius.
    POLE: z_s is a pole, so z_{s+1} is infinite.  ESCAPED: |z_s| exceeds the
    escape radius.  CYCLE: z_s revisits one of the previous 64 iterates
    within ``cycle_tol``; ``period`` is the smallest such lag.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    trace = [] if keep_trace else None
    ring: deque = deque(maxlen=RING_SIZE + 1)
    z = complex(z0)
    for step in range(budget):
        if trace is not None:
            trace.append(z)
        az = abs(z)
        if az < trap_radius:
            return OrbitOutcome(Fate.TRAP, step, trace=trace)
        if az > escape_radius:
            return OrbitOutcome(Fate.ESCAPED, step, trace=trace)
        if step > 0:
            ring.append(z)
            if step % CHECK_STRIDE == 0:
                lag = _smallest_lag(ring, z, cycle_tol)
                if lag is not None:
                    tail = list(ring)[-lag:]
                    return OrbitOutcome(Fate.CYCLE, step, lag, trace=trace, tail=tail)
        nxt = eval_f(lam, z)
        if nxt is INFINITY:
            return OrbitOutcome(Fate.POLE, step, trace=trace)
        z = nxt
    return OrbitOutcome(Fate.EXHAUSTED, None, trace=trace)


def iterate(lam: complex, z: complex, n: int) -> Extended:
    """f^n(z), or INFINITY if the orbit meets a pole on the way."""
    for _ in range(n):
        z = eval_f(lam, z)
        if z is INFINITY:
            return INFINITY
    return z
