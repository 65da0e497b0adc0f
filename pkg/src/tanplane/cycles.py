"""Periodic cycles: detection from the asymptotic value, Newton refinement,
and the multiplier computed two independent ways."""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import List, Optional

from . import kernel
from .errors import (
    NotMinimalPeriod,
    PoleProximity,
    RefinementDiverged,
    SineVanishes,
    ZeroInCycle,
)
from .kernel import INFINITY, Fate

NEWTON_TOL = 1e-12
NEWTON_MAX_STEPS = 50
NEUTRAL_BAND = 1e-9
VERIFY_TOL = 1e-9


class Stability(enum.Enum):
    SUPERATTRACTING = "superattracting"
    ATTRACTING = "attracting"
    NEUTRAL = "neutral"
    REPELLING = "repelling"


@dataclass
class Cycle:
    points: List[complex]
    period: int
    multiplier: complex
    stability: Stability

    def contains_zero(self) -> bool:
        return any(z == 0 for z in self.points)


def stability_of(rho: complex, contains_zero: bool = False) -> Stability:
    m = abs(rho)
    if contains_zero or m == 0:
        return Stability.SUPERATTRACTING
    if m < 1 - NEUTRAL_BAND:
        return Stability.ATTRACTING
    if m <= 1 + NEUTRAL_BAND:
        return Stability.NEUTRAL
    return Stability.REPELLING


def _iterate_with_derivative(lam, z, p):
    """Return f^p(z) and d/dz f^p(z) by forward accumulation."""
    d = 1.0 + 0j
    for _ in range(p):
        try:
            d *= kernel.eval_df(lam, z)
        except PoleProximity:
            raise RefinementDiverged(f"orbit met a pole near {z}") from None
        z = kernel.eval_f(lam, z)
        if z is INFINITY:
            raise RefinementDiverged("orbit met a pole")
    return z, d


def _divisors(p):
    return [q for q in range(1, p) if p % q == 0]


def _forward_points(lam, z0, p):
    pts = [z0]
    for _ in range(p - 1):
        z = kernel.eval_f(lam, pts[-1])
        if z is INFINITY:
            raise RefinementDiverged("cycle point is a pole")
        pts.append(z)
    return pts


def refine_cycle(lam: complex, approx, p: int) -> Cycle:
    """Newton on f^p(z) - z starting from approx[0].

    Raises NotMinimalPeriod when a proper divisor of p already closes the
    cycle, RefinementDiverged after 50 unsuccessful Newton steps.
    """
    if p < 1:
        raise ValueError("period must be >= 1")
    z = complex(approx[0])
    for _ in range(NEWTON_MAX_STEPS + 1):
        fz, d = _iterate_with_derivative(lam, z, p)
        F = fz - z
        if abs(F) < NEWTON_TOL * (1 + abs(z)):
            break
        if d == 1:
            raise RefinementDiverged("neutral derivative in Newton step")
        z = z - F / (d - 1)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise RefinementDiverged("Newton iterate is not finite")
    else:
        raise RefinementDiverged(f"no convergence after {NEWTON_MAX_STEPS} steps")

    for q in _divisors(p):
        zq = kernel.iterate(lam, z, q)
        if zq is not INFINITY and abs(zq - z) < VERIFY_TOL * (1 + abs(z)):
            raise NotMinimalPeriod(p, q)

    pts = _forward_points(lam, z, p)
    cyc = Cycle(pts, p, 0j, Stability.REPELLING)
    try:
        rho = multiplier_chain(lam, cyc)
    except PoleProximity:
        raise RefinementDiverged("cycle passes through a pole") from None
    cyc.multiplier = rho
    cyc.stability = stability_of(rho, cyc.contains_zero())
    return cyc


def refine_minimal(lam: complex, approx, p: int) -> Cycle:
    """refine_cycle, dropping to the verifying divisor period when needed."""
    while True:
        try:
            return refine_cycle(lam, approx, p)
        except NotMinimalPeriod as exc:
            p = exc.divisor
            approx = approx[:p]


def detect_cycle(lam: complex, budget: int = 5000, trap_radius: Optional[float] = None) -> Optional[Cycle]:
    """Follow the asymptotic value lam*i and refine the cycle it settles on.

    Returns None when the orbit is captured by the trap around 0, hits a
    pole, escapes or exhausts the budget.  points[0] is the cycle point
    closest to the asymptotic values +-lam*i.
    """
    if trap_radius is None:
        from .classify import capture_radius

        trap_radius = capture_radius(lam)
    out = kernel.orbit(lam, lam * 1j, budget, trap_radius)
    if out.fate is not Fate.CYCLE:
        return None
    return cycle_from_candidate(lam, out.tail, out.period)


def cycle_from_candidate(lam, tail, period):
    """Refine a cycle from the last ``period`` orbit iterates."""
    v = lam * 1j
    start = min(range(period), key=lambda i: min(abs(tail[i] - v), abs(tail[i] + v)))
    approx = tail[start:] + tail[:start]
    return refine_minimal(lam, approx, period)


def multiplier_chain(lam: complex, cycle: Cycle) -> complex:
    """Product of f'(z_i) over the cycle."""
    rho = 1.0 + 0j
    for z in cycle.points:
        rho *= kernel.eval_df(lam, z)
    return rho


def csc(v: complex) -> complex:
    """1/sin(v), stable for large |Im v|."""
    # 2i e^{iv} / (e^{2iv} - 1) with the exponent chosen to be decaying
    if v.imag > 0:
        q = cmath.exp(1j * v)
        d = q * q - 1.0
        num = 2j * q
    else:
        q = cmath.exp(-1j * v)
        d = 1.0 - q * q
        num = 2j * q
    if d == 0 or abs(d) < 1e-300:
        raise SineVanishes(v)
    return num / d


def multiplier_product_formula(cycle: Cycle) -> complex:
    """Multiplier from cycle points alone:
    2^p * prod_i 2 z_i z_{i-1} / sin(2 z_{i-1}^2), indices mod p."""
    pts = cycle.points
    p = len(pts)
    if any(z == 0 for z in pts):
        raise ZeroInCycle(pts)
    rho = 1.0 + 0j
    for i in range(1, p + 1):
        zi = pts[i % p]
        zprev = pts[i - 1]
        rho *= 4.0 * zi * zprev * csc(2.0 * zprev * zprev)
    return rho
