"""Per-parameter verdicts: captured by the basin of 0 (with depth), attracted
to a non-zero cycle (shell, with period and multiplier), or unresolved."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional

from . import kernel
from .cycles import Stability, cycle_from_candidate
from .errors import NumericalFailure
from .kernel import Fate

DEFAULT_BUDGET = 5000
VERIFY_BUDGET = 20000
HALF_PI_SQRT = math.sqrt(math.pi / 2)


class Tag(enum.Enum):
    CAPTURE = "capture"
    SHELL = "shell"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class Classification:
    tag: Tag
    depth: Optional[int] = None
    period: Optional[int] = None
    multiplier: Optional[complex] = None
    reason: Optional[str] = None

    @classmethod
    def capture(cls, depth):
        return cls(Tag.CAPTURE, depth=depth)

    @classmethod
    def shell(cls, period, multiplier):
        return cls(Tag.SHELL, period=period, multiplier=multiplier)

    @classmethod
    def unresolved(cls, reason):
        return cls(Tag.UNRESOLVED, reason=reason)

    @property
    def index(self) -> Optional[int]:
        """Depth for captures, period for shells."""
        if self.tag is Tag.CAPTURE:
            return self.depth
        if self.tag is Tag.SHELL:
            return self.period
        return None

    @property
    def mod_multiplier(self) -> Optional[float]:
        return None if self.multiplier is None else abs(self.multiplier)


def zero_trap_radius(lam: complex) -> float:
    """min(0.5, 1/(4|lam|)): a disk that f maps strictly inside itself."""
    if lam == 0:
        raise ValueError("lam must be nonzero")
    return min(0.5, 1.0 / (4.0 * abs(lam)))


def capture_radius(lam: complex) -> float:
    """Largest R (to bisection accuracy) with |lam| tan(R^2) < R.

    tan has non-negative Taylor coefficients, so on |z| <= R the map obeys
    |f(z)| <= |lam| tan(R^2) < R and, by Schwarz, |f(z)| <= c|z| with c < 1.
    The open disk of radius R therefore lies in the immediate basin of 0.
    Never smaller than zero_trap_radius.
    """
    a = abs(lam)
    if a == 0:
        raise ValueError("lam must be nonzero")
    lo = zero_trap_radius(lam)
    hi = HALF_PI_SQRT
    if a * math.tan(lo * lo) >= lo:
        return lo
    # g(R) = a tan(R^2) - R is negative on (0, R*) and blows up at sqrt(pi/2)
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if a * math.tan(mid * mid) < mid:
            lo = mid
        else:
            hi = mid
    return lo


def classify(lam: complex, budget: int = DEFAULT_BUDGET) -> Classification:
    """Verdict for the orbit of the asymptotic value lam*i."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if lam == 0:
        return Classification.unresolved("zero")
    out = kernel.orbit(lam, lam * 1j, budget, capture_radius(lam))
    if out.fate is Fate.TRAP:
        return Classification.capture(out.step)
    if out.fate is Fate.CYCLE:
        try:
            cyc = cycle_from_candidate(lam, out.tail, out.period)
        except NumericalFailure as exc:
            return Classification.unresolved(f"refinement: {type(exc).__name__}")
        if cyc.stability is Stability.ATTRACTING and not cyc.contains_zero():
            return Classification.shell(cyc.period, cyc.multiplier)
        return Classification.unresolved(f"cycle {cyc.stability.value}")
    return Classification.unresolved(out.fate.value)


@dataclass
class SymmetryOrbit:
    members: List[complex] = field(default_factory=list)


def symmetry_images(lam: complex) -> SymmetryOrbit:
    """The images of lam under rotation by powers of i and conjugation."""
    if lam == 0:
        raise ValueError("lam must be nonzero")
    lam = complex(lam)
    c = lam.conjugate()
    out: List[complex] = []
    for z in (lam, -lam, 1j * lam, -1j * lam, c, -c, 1j * c, -1j * c):
        if z not in out:
            out.append(z)
    return SymmetryOrbit(out)
