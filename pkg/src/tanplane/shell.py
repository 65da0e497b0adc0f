"""Shell components: the period-one parametrization, the unit-multiplier
boundary, internal rays by continuation, buds and quadruplets."""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from . import kernel
from .classify import Tag, classify
from .cycles import Cycle, csc, detect_cycle, stability_of
from .errors import (
    BracketFailed,
    ContinuationStalled,
    Diverged,
    LostCycle,
    NumericalFailure,
    PoleProximity,
    SineVanishes,
    TangentVanishes,
)
from .kernel import INFINITY

SQRT2 = math.sqrt(2.0)
BOUNDARY_TOL = 1e-10
RAY_RATIO = 0.8
RAY_MIN_STEP = 1e-12
CORRECTOR_TOL = 1e-12
CORRECTOR_MAX_STEPS = 20
MULTIPLIER_TOL = 1e-9
BUD_DIRECTIONS = 64
BUD_RADII = 8
QUADRUPLET_TRACT = 5.0
QUADRUPLET_PROBES = 256


class Half(enum.Enum):
    UPPER = "upper"
    LOWER = "lower"


@dataclass(frozen=True)
class BoundarySample:
    t: float          # real part of u
    u: complex
    lam: complex


@dataclass
class RayPoint:
    lam: complex
    cycle: Cycle
    r: float
    alpha: float


def _near_multiple(u: complex, period: float) -> bool:
    """u is a nonzero multiple of period up to rounding."""
    k = round(u.real / period)
    return k != 0 and abs(u - period * k) <= 1e-14 * abs(u)


def H(u: complex) -> complex:
    """2u / sin u, the multiplier of the fixed point z with u = 2 z^2."""
    u = complex(u)
    if abs(u) < 1e-4:
        u2 = u * u
        return 2.0 * (1.0 + u2 / 6.0 + 7.0 * u2 * u2 / 360.0)
    if _near_multiple(u, math.pi):
        raise SineVanishes(u)
    return 2.0 * u * csc(u)


def _cot(u: complex) -> complex:
    # i (q + 1)/(q - 1) with q = e^{2iu} or its reciprocal, whichever decays
    q = cmath.exp(2j * u) if u.imag > 0 else cmath.exp(-2j * u)
    if q == 1:
        raise SineVanishes(u)
    c = 1j * (q + 1) / (q - 1)
    return c if u.imag > 0 else -c


def dH(u: complex) -> complex:
    u = complex(u)
    if abs(u) < 1e-4:
        return 2.0 * (u / 3.0 + 7.0 * u ** 3 / 90.0)
    if _near_multiple(u, math.pi):
        raise SineVanishes(u)
    return 2.0 * csc(u) * (1.0 - u * _cot(u))


def S(u: complex, branch: int = 1) -> complex:
    """branch * sqrt(u) / (sqrt(2) tan(u/2)).

    With lam = S(u, branch), z = branch * sqrt(u/2) is a fixed point of f_lam
    whose multiplier is H(u).
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    u = complex(u)
    if u == 0:
        raise TangentVanishes(u)
    if _near_multiple(u, 2 * math.pi):
        raise TangentVanishes(u)
    t = cmath.tan(u / 2)
    if t == 0:
        raise TangentVanishes(u)
    return branch * cmath.sqrt(u) / (SQRT2 * t)


def fixed_point_of(u: complex, branch: int = 1) -> complex:
    return branch * cmath.sqrt(complex(u) / 2)


# -- unit-multiplier boundary of the period-one components ---------------

def unit_boundary_height(x: float, y_max: float = 1e3) -> float:
    """The y > 0 with |H(x + iy)| = 1 (the curve is symmetric in y)."""
    def g(y):
        return abs(H(complex(x, y))) - 1.0

    lo = 1e-6
    if not g(lo) > 0:
        raise BracketFailed(f"|H| <= 1 at the real axis for x = {x}")
    hi = 1.0
    while g(hi) >= 0:
        hi *= 2.0
        if hi > y_max:
            raise BracketFailed(f"no sign change below y = {y_max} for x = {x}")
    return brentq(g, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=200)


def trace_unit_H_boundary(x_min: float, x_max: float, steps: int,
                          half: Half = Half.UPPER, branch: int = 1) -> List[BoundarySample]:
    """Sample the branch of |H(u)| = 1 in one half plane at ``steps`` evenly
    spaced real parts and map each point through S."""
    if steps < 2:
        raise ValueError("steps must be >= 2")
    if not x_max > x_min:
        raise ValueError("need x_min < x_max")
    sign = 1.0 if half is Half.UPPER else -1.0
    out: List[BoundarySample] = []
    for x in np.linspace(x_min, x_max, steps):
        x = float(x)
        y = unit_boundary_height(x)
        u = complex(x, sign * y)
        if abs(abs(H(u)) - 1.0) >= BOUNDARY_TOL:
            raise BracketFailed(f"bisection residual too large at x = {x}")
        s = BoundarySample(x, u, S(u, branch))
        if out and s.lam == out[-1].lam:
            continue
        out.append(s)
    return out


def solve_H(target: complex, seed: complex, tol: float = 1e-14, max_steps: int = 50) -> complex:
    """Newton on H(u) = target."""
    u = complex(seed)
    for _ in range(max_steps):
        r = H(u) - target
        if abs(r) < tol:
            return u
        d = dH(u)
        if d == 0:
            raise Diverged("stationary point of H")
        u -= r / d
    if abs(H(u) - target) < 1e3 * tol:
        return u
    raise Diverged(f"H(u) = {target} not solved from {seed}")


def bud_root_parameter(q: int, p: int, branch: int = 1, half: Half = Half.UPPER,
                       x_window: Tuple[float, float] = (-8.0, 8.0)) -> Tuple[complex, complex]:
    """(u, lam) on the period-one boundary with multiplier exp(2 pi i q/p).

    The seed is the sample of the traced boundary whose multiplier phase is
    closest to the target; among equally close ones the smallest |Re u| wins.
    """
    target = cmath.exp(2j * math.pi * q / p)
    samples = trace_unit_H_boundary(x_window[0], x_window[1], 801, half, branch)
    best = min(samples, key=lambda s: (round(abs(H(s.u) - target), 3), abs(s.t)))
    u = solve_H(target, best.u)
    return u, S(u, branch)


# -- internal rays ---------------------------------------------------------

def _system(lam, w, p, m):
    """Residuals and Jacobian of {f^p(w) - w, rho/m - 1} in (lam, w)."""
    z = w
    A = 1.0 + 0j      # dz_i/dw
    B = 0j            # dz_i/dlam
    rho = 1.0 + 0j
    dlog_w = 0j
    dlog_l = 0j
    pts = []
    for _ in range(p):
        pts.append(z)
        zz = z * z
        if kernel.near_pole(z):
            raise PoleProximity(z)
        if z == 0:
            raise LostCycle("cycle reached the critical point")
        t = cmath.tan(zz)
        d = 2.0 * lam * z * kernel.sec2(zz)
        c = 1.0 / z + 4.0 * z * t
        rho *= d
        dlog_w += c * A
        dlog_l += 1.0 / lam + c * B
        B = t + d * B
        A = d * A
        z = lam * t
    F1 = z - w
    G = rho / m - 1.0
    J = ((B, A - 1.0), (rho / m * dlog_l, rho / m * dlog_w))
    return F1, G, J, rho, pts


def _multiplier_ok(G, m):
    # |rho - m| = |m| |G|; absolute 1e-9, and never looser than 1e-4 relative
    return abs(m) * abs(G) < min(MULTIPLIER_TOL, 1e-4 * abs(m))


def _correct(lam, w, p, m):
    """Newton on the coupled cycle/multiplier system.

    Close to a virtual center the multiplier varies so fast with lam that
    a relative 1e-12 residual is below what one ulp of lam can resolve;
    a rounding-level step with the multiplier within tolerance is accepted.
    """
    eps = np.finfo(float).eps
    for _ in range(CORRECTOR_MAX_STEPS):
        F1, G, J, rho, _ = _system(lam, w, p, m)
        f_ok = abs(F1) < CORRECTOR_TOL * (1.0 + abs(w))
        if f_ok and abs(G) < CORRECTOR_TOL:
            return lam, w
        (a, b), (c, d) = J
        det = a * d - b * c
        if det == 0 or not cmath.isfinite(det):
            raise ContinuationStalled("singular corrector Jacobian")
        dl = (d * F1 - b * G) / det
        dw = (a * G - c * F1) / det
        if f_ok and abs(dl) <= 8 * eps * abs(lam) and abs(dw) <= 8 * eps * abs(w):
            if _multiplier_ok(G, m):
                return lam, w
            raise ContinuationStalled("multiplier unresolvable at double precision")
        lam -= dl
        w -= dw
        if not (cmath.isfinite(lam) and cmath.isfinite(w)) or lam == 0:
            raise ContinuationStalled("corrector left the domain")
    F1, G, _, _, _ = _system(lam, w, p, m)
    if abs(F1) < 1e3 * CORRECTOR_TOL * (1 + abs(w)) and _multiplier_ok(G, m):
        return lam, w
    raise ContinuationStalled("corrector did not converge")


def _ray_point(lam, w, p, r, alpha) -> RayPoint:
    pts = [w]
    for _ in range(p - 1):
        nxt = kernel.eval_f(lam, pts[-1])
        if nxt is INFINITY:
            raise LostCycle("cycle point at a pole")
        pts.append(nxt)
    for q in range(1, p):
        if p % q == 0:
            zq = kernel.iterate(lam, w, q)
            if zq is not INFINITY and abs(zq - w) < 1e-9 * (1 + abs(w)):
                raise LostCycle(f"period dropped from {p} to {q}")
    rho = 1.0 + 0j
    for z in pts:
        rho *= kernel.eval_df(lam, z)
    cyc = Cycle(pts, p, rho, stability_of(rho))
    return RayPoint(lam, cyc, r, alpha)


def _continue(lam, w, p, path, on_point=None):
    """Follow (lam, w) along the multiplier path m(s), s in [0, 1], with
    adaptive steps; path(s) returns the multiplier."""
    s = 0.0
    h = 1.0
    prev = None
    while s < 1.0:
        if h < RAY_MIN_STEP:
            raise ContinuationStalled(f"step fell below {RAY_MIN_STEP} at s = {s}")
        s_next = min(1.0, s + h)
        # secant predictor
        if prev is not None:
            ps, pl, pw = prev
            k = (s_next - s) / (s - ps)
            lp, wp = lam + (lam - pl) * k, w + (w - pw) * k
        else:
            lp, wp = lam, w
        try:
            nl, nw = _correct(lp, wp, p, path(s_next))
            if abs(nl - lam) > 0.5 * (1 + abs(lam)):
                raise ContinuationStalled("corrector jumped")
        except (NumericalFailure, ZeroDivisionError, OverflowError):
            h *= 0.5
            continue
        prev = (s, lam, w)
        s, lam, w = s_next, nl, nw
        if on_point is not None:
            on_point(s, lam, w)
        h = min(2.0 * h, 1.0)
    return lam, w


def trace_internal_ray(lam_seed: complex, alpha: float, r_stop: float,
                       step_count: int = 64, budget: int = 5000) -> List[RayPoint]:
    """Internal ray of angle alpha through the shell component of lam_seed.

    The multiplier is first turned at constant modulus to the ray's phase,
    then shrunk geometrically (ratio at most 0.8, finer if step_count asks
    for more samples) down to r_stop.  Each sample solves the coupled system
    f^p(w) = w, multiplier(lam, w) = r e^{2 pi i alpha} by Newton, where w
    is the cycle point nearest lam*i.
    """
    if not 0 < r_stop < 1:
        raise ValueError("r_stop must lie in (0, 1)")
    if step_count < 1:
        raise ValueError("step_count must be >= 1")
    v = classify(lam_seed, budget)
    if v.tag is not Tag.SHELL:
        raise ValueError(f"seed does not lie in a shell component ({v.tag.value})")
    cyc = detect_cycle(lam_seed, budget)
    p = cyc.period
    lam, w = complex(lam_seed), cyc.points[0]
    rho0 = cyc.multiplier
    r0 = abs(rho0)
    if rho0 == 0:
        raise ValueError("seed has a superattracting cycle")
    if r_stop >= r0:
        raise ValueError(f"r_stop must be below the seed's |multiplier| {r0:.6g}")
    theta0 = cmath.phase(rho0)
    dtheta = math.remainder(2 * math.pi * alpha - theta0, 2 * math.pi)

    # rotate the phase in slices of at most 0.2 rad
    slices = max(1, math.ceil(abs(dtheta) / 0.2))
    for k in range(slices):
        a0 = theta0 + dtheta * k / slices
        a1 = theta0 + dtheta * (k + 1) / slices
        lam, w = _continue(lam, w, p, lambda s: r0 * cmath.exp(1j * (a0 + (a1 - a0) * s)))

    ratio = min(RAY_RATIO, (r_stop / r0) ** (1.0 / step_count))
    phase = cmath.exp(2j * math.pi * alpha)
    points = [_ray_point(lam, w, p, r0, alpha)]
    r = r0
    while r > r_stop:
        r_next = max(r * ratio, r_stop)
        lr, ln = math.log(r), math.log(r_next)
        lam, w = _continue(lam, w, p, lambda s: math.exp(lr + (ln - lr) * s) * phase)
        r = r_next
        points.append(_ray_point(lam, w, p, r, alpha))
    return points


# -- buds and quadruplets --------------------------------------------------

def find_bud(lam_boundary: complex, p: int, q: int, n: int = 1, search_radius: float = 0.05,
             budget: int = 5000) -> Optional[complex]:
    """A parameter near a boundary point of internal argument q/p of a
    period-n component that classifies as a shell of period n*p.

    Scans 8 radii (innermost first) times 64 directions.  A multiplier-one
    point (q/p an integer) sprouts no bud, so None is returned there.
    """
    if p < 1 or n < 1 or search_radius <= 0:
        raise ValueError("need p >= 1, n >= 1 and a positive radius")
    if q % p == 0:
        return None
    if math.gcd(q, p) != 1:
        raise ValueError("q/p must be in lowest terms")
    want = n * p
    for i in range(1, BUD_RADII + 1):
        rad = search_radius * i / BUD_RADII
        for k in range(BUD_DIRECTIONS):
            lam = lam_boundary + rad * cmath.exp(2j * math.pi * k / BUD_DIRECTIONS)
            if lam == 0:
                continue
            v = classify(lam, budget)
            if v.tag is Tag.SHELL and v.period == want:
                return lam
    return None


def quadruplet(lam_star: complex, p: int, probe_radius: float,
               tract_threshold: float = QUADRUPLET_TRACT, probes: int = QUADRUPLET_PROBES,
               budget: int = 5000) -> List[Tuple[kernel.Tract, complex]]:
    """One period-p shell parameter per asymptotic tract on the circle of
    probe_radius around a virtual center, bucketed by the tract containing
    f^{p-1}(lam i); sorted by quadrant."""
    if p < 2 or probe_radius <= 0 or probes < 1:
        raise ValueError("need p >= 2, a positive radius and probes >= 1")
    found = {}
    for k in range(probes):
        lam = lam_star + probe_radius * cmath.exp(2j * math.pi * (k + 0.5) / probes)
        if lam == 0:
            continue
        v = classify(lam, budget)
        if v.tag is not Tag.SHELL or v.period != p:
            continue
        z = kernel.iterate(lam, lam * 1j, p - 1)
        if z is INFINITY:
            continue
        t = kernel.tract_of(z, tract_threshold)
        if t is not None and t.quadrant not in found:
            found[t.quadrant] = (t, lam)
    return [found[q] for q in sorted(found)]


def seed_near_virtual_center(lam_star: complex, delta: float = 4e-4, height: float = 18.0,
                             scan: int = 720, budget: int = 5000) -> Optional[complex]:
    """A period-2 shell parameter at distance delta from the virtual center
    lam_star (a member of {+-s_k, +-i s_k}).

    Close to lam_star the cycle point in the tract is about f(lam i), of
    modulus ~ 1/(2 delta), and the multiplier decays like exp(-2|Im z^2|)
    at that point.  Only along the thin directions where f(lam i)^2 is
    nearly real does the multiplier stay moderate, so the circle is scanned
    for Im f(lam i)^2 = +-height and the first crossing that classifies as
    Shell(2) with |multiplier| > 1e-6 is returned.
    """
    if delta <= 0 or height <= 0:
        raise ValueError("delta and height must be positive")

    def g(th, target):
        lam = lam_star + delta * cmath.exp(1j * th)
        z = kernel.eval_f(lam, lam * 1j)
        if z is INFINITY:
            return math.inf
        return (z * z).imag - target

    ths = [2 * math.pi * k / scan for k in range(scan + 1)]
    for target in (height, -height):
        vals = [g(t, target) for t in ths]
        for k in range(scan):
            a, b = ths[k], ths[k + 1]
            fa, fb = vals[k], vals[k + 1]
            if not (math.isfinite(fa) and math.isfinite(fb)) or (fa > 0) == (fb > 0):
                continue
            for _ in range(100):
                m = 0.5 * (a + b)
                fm = g(m, target)
                if not math.isfinite(fm):
                    break
                if (fm > 0) == (fa > 0):
                    a, fa = m, fm
                else:
                    b = m
            lam = lam_star + delta * cmath.exp(1j * a)
            v = classify(lam, budget)
            if v.tag is Tag.SHELL and v.period == 2 and abs(v.multiplier) > 1e-6:
                return lam
    return None
