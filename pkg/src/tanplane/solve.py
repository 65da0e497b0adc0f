"""Root finding for coded structural parameters: poles, pre-poles (virtual
centers) and pre-zeros (capture centers)."""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from . import kernel
from .errors import Diverged, DomainError, HitSingularity, NumericalFailure, WrongBasin
from .kernel import INFINITY

NEWTON_MAX_STEPS = 60
FIXED_POINT_MAX_STEPS = 200


class CodeKind(enum.Enum):
    PRE_ZERO = "pre-zero"
    PRE_POLE = "pre-pole"


@dataclass(frozen=True)
class ComponentCode:
    """Itinerary (k, j_1, ..., j_m) naming a capture center or virtual center.

    PRE_ZERO: k != 0 picks the zero preimage sqrt(k*pi) (principal root, so
    k < 0 gives i*sqrt(|k|*pi)) hit after m steps; the center solves
    f^{m+1}(lam*i) = 0.
    PRE_POLE: k >= 0 picks the pole i**quarter * s_k hit after m steps; the
    virtual center has period m + 2.
    j_1 is the branch of lam itself, j_2.. the branches of the intermediate
    preimages, j_m being the one next to the target.
    """

    base_index: int
    branch_indices: Tuple[int, ...] = ()
    kind: CodeKind = CodeKind.PRE_ZERO
    tract: Optional[int] = None
    quarter: int = 0

    def __post_init__(self):
        object.__setattr__(self, "branch_indices", tuple(int(j) for j in self.branch_indices))
        if self.kind is CodeKind.PRE_ZERO and self.base_index == 0:
            raise ValueError("pre-zero codes need a nonzero base index")
        if self.kind is CodeKind.PRE_POLE and self.base_index < 0:
            raise ValueError("pre-pole codes need a non-negative pole index")
        if self.tract is not None and self.tract not in (1, 2, 3, 4):
            raise ValueError("tract must be in 1..4")
        if self.quarter not in (0, 1, 2, 3):
            raise ValueError("quarter must be in 0..3")

    @property
    def order(self) -> int:
        """Period of the coded component: p for f^p(lam i) = 0 or = infinity."""
        if self.kind is CodeKind.PRE_ZERO:
            return len(self.branch_indices) + 1
        return len(self.branch_indices) + 2

    def target(self) -> complex:
        if self.kind is CodeKind.PRE_ZERO:
            return zero_preimage(self.base_index)
        return (1j ** self.quarter) * pole(self.base_index)


@dataclass
class SolveReport:
    root: complex
    residual: float
    iterations: int
    seed: complex
    history: List[complex] = field(default_factory=list, repr=False)


def pole(j: int) -> float:
    """s_j = sqrt((2j+1)*pi/2)."""
    return math.sqrt((2 * j + 1) * math.pi / 2)


def zero_preimage(k: int) -> complex:
    """Principal sqrt(k*pi): the nonzero roots of tan z^2 on the axes."""
    return cmath.sqrt(k * math.pi)


def poles(max_index: int) -> List[complex]:
    """All poles +-s_j, +-i s_j of tan z^2 with 0 <= j <= max_index."""
    if max_index < 0:
        raise ValueError("max_index must be >= 0")
    out = []
    for j in range(max_index + 1):
        s = pole(j)
        out.extend([complex(s, 0), complex(-s, 0), complex(0, s), complex(0, -s)])
    return out


def prepole_parameters_order1(max_index: int = 10) -> List[complex]:
    """Parameters with f(lam i) = infinity: lam*i is a pole, so lam = +-s_k, +-i s_k."""
    return poles(max_index)


def _g(lam: complex, n: int, infinite_target: bool):
    """f^n(lam i); INFINITY only when the n-th iterate itself is infinite."""
    z = lam * 1j
    for m in range(n):
        z = kernel.eval_f(lam, z)
        if z is INFINITY:
            if m == n - 1 and infinite_target:
                return INFINITY
            raise HitSingularity(f"orbit of lam*i meets a pole at step {m}")
    return z


def _residual_fn(n, target):
    if target is INFINITY:
        def h(lam):
            g = _g(lam, n, True)
            return 0j if g is INFINITY else 1.0 / g
    else:
        target = complex(target)

        def h(lam):
            return _g(lam, n, False) - target
    return h


def newton_param(n: int, target, seed: complex, tol: float = 1e-12,
                 max_steps: int = NEWTON_MAX_STEPS) -> SolveReport:
    """Solve f_lam^n(lam i) = target for lam by Newton's method.

    The derivative is a central difference with step 1e-7 (1 + |lam|).  For
    an INFINITY target the reciprocal 1/f^n is driven to zero instead.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    h = _residual_fn(n, target)
    lam = complex(seed)
    history = [lam]
    r = h(lam)
    for it in range(max_steps + 1):
        if abs(r) < tol:
            return SolveReport(lam, abs(r), it, complex(seed), history)
        if it == max_steps:
            break
        step = 1e-7 * (1 + abs(lam))
        d = (h(lam + step) - h(lam - step)) / (2 * step)
        if d == 0 or not cmath.isfinite(d):
            raise Diverged(f"degenerate derivative at {lam}")
        delta = r / d
        # backtrack on residual growth
        for _ in range(30):
            cand = lam - delta
            try:
                rc = h(cand)
            except HitSingularity:
                rc = None
            if rc is not None and cmath.isfinite(rc) and abs(rc) < max(abs(r), tol) * 4:
                break
            delta *= 0.5
        else:
            raise Diverged(f"line search failed at {lam}")
        lam, r = cand, rc
        history.append(lam)
        if lam == 0:
            raise Diverged("Newton iterate reached lam = 0")
    raise Diverged(f"no convergence in {max_steps} steps (residual {abs(r):.3g})")


def fixed_point_iteration_step(lam: complex, p, j: int) -> complex:
    """One step of lam -> sqrt(Arctan(-p/lam) + j*pi).

    Its fixed points solve f_lam(lam i) = -lam tan(lam^2) = p.  For real p
    the real and imaginary parts of the Arctan are evaluated in closed form:
        X = atan2(-2 x p, x^2 + y^2 - p^2)/2 + j pi
        Y = log(|lam + i p| / |lam - i p|)/2
    and the step returns the principal root of X + iY.
    """
    lam = complex(lam)
    if lam == 0:
        raise DomainError("lam must be nonzero")
    x, y = lam.real, lam.imag
    if isinstance(p, complex) and p.imag != 0:
        w = -p / lam
        if abs(w - 1j) == 0 or abs(w + 1j) == 0:
            raise DomainError("Arctan branch point")
        a = cmath.atan(w) + j * math.pi
        return cmath.sqrt(a)
    p = float(p.real if isinstance(p, complex) else p)
    plus = x * x + (p + y) ** 2
    minus = x * x + (y - p) ** 2
    if plus == 0 or minus == 0:
        raise DomainError("vanishing denominator")
    X = 0.5 * math.atan2(-2 * x * p, x * x + y * y - p * p) + j * math.pi
    Y = 0.25 * math.log(plus / minus)
    r = math.hypot(X, Y)
    if r == 0:
        return 0j
    # take the large component first, the other from Y = 2 phi1 phi2
    if X >= 0:
        phi1 = math.sqrt((X + r) / 2)
        phi2 = Y / (2 * phi1)
    else:
        phi2 = math.copysign(math.sqrt((r - X) / 2), Y)
        phi1 = Y / (2 * phi2)
    return complex(phi1, phi2)


def _chain_map(code: ComponentCode):
    """lam -> lam' obtained by pulling the code's target back along its
    branch indices; fixed points are the coded parameters."""
    target = code.target()
    j1 = code.branch_indices[0]
    rest = code.branch_indices[1:]

    def phi(lam):
        v = target
        for n in reversed(rest):
            v = kernel.inverse_branch(lam, v, n, 1)
        return fixed_point_iteration_step(lam, v, j1)

    return phi


def chain_seed(code: ComponentCode, start: Optional[complex] = None,
               steps: int = FIXED_POINT_MAX_STEPS, tol: float = 1e-13) -> complex:
    """Seed for a coded parameter by fixed-point iteration of the
    inverse-branch chain (the closed form when there is no branch index)."""
    if not code.branch_indices:
        t = code.target()
        return t if code.kind is CodeKind.PRE_ZERO else -1j * t
    phi = _chain_map(code)
    j1 = code.branch_indices[0]
    lam = complex(start) if start is not None else cmath.sqrt((j1 + 0.5) * math.pi + 0.3j)
    for _ in range(steps):
        try:
            nxt = phi(lam)
        except NumericalFailure:
            break
        if abs(nxt - lam) < tol * (1 + abs(lam)):
            return nxt
        lam = nxt
    return lam


def capture_center(code: ComponentCode, tol: float = 1e-12, seed: Optional[complex] = None,
                   check_basin: bool = True) -> SolveReport:
    """Center of the capture component named by a pre-zero code.

    The residual reported is |f^p(lam i)|.  Raises WrongBasin when the
    root does not classify as a capture.
    """
    if code.kind is not CodeKind.PRE_ZERO:
        raise ValueError("capture_center needs a pre-zero code")
    p = code.order
    s = complex(seed) if seed is not None else chain_seed(code)
    if p == 1:
        rep = newton_param(1, 0, s, tol)
    else:
        rep = newton_param(p - 1, code.target(), s, tol)
    fp = _g(rep.root, p, False)
    rep = SolveReport(rep.root, abs(fp), rep.iterations, s, rep.history)
    if check_basin:
        from .classify import Tag, classify

        v = classify(rep.root)
        if v.tag is not Tag.CAPTURE:
            raise WrongBasin(f"{rep.root} classifies {v.tag.value}")
    return rep


def virtual_center(code: ComponentCode, p: Optional[int] = None, tol: float = 1e-12,
                   seed: Optional[complex] = None) -> SolveReport:
    """Virtual center: lam with f^{p-2}(lam i) equal to the coded pole, so
    lam*i is a pre-pole of order p - 1."""
    if code.kind is not CodeKind.PRE_POLE:
        raise ValueError("virtual_center needs a pre-pole code")
    if p is None:
        p = code.order
    if p < 2 or p != code.order:
        raise ValueError(f"code of length {len(code.branch_indices) + 1} does not have period {p}")
    target = code.target()
    if p == 2:
        lam = -1j * target
        return SolveReport(lam, 0.0, 0, lam)
    s = complex(seed) if seed is not None else chain_seed(code)
    rep = newton_param(p - 2, target, s, tol)
    return SolveReport(rep.root, rep.residual, rep.iterations, s, rep.history)


def virtual_center_limit(code: ComponentCode) -> complex:
    """Limit of the coded virtual centers as the pole index grows, with the
    pole direction i**quarter kept: the target is pushed to infinity, which
    the first pull-back turns into the Arctan limit +-pi/2."""
    if code.kind is not CodeKind.PRE_POLE or len(code.branch_indices) < 1:
        raise ValueError("needs a pre-pole code with at least one branch index")
    direction = 1j ** code.quarter
    big = direction * 1e12

    def phi(lam):
        v = big
        rest = code.branch_indices[1:]
        for n in reversed(rest):
            v = kernel.inverse_branch(lam, v, n, 1)
        return fixed_point_iteration_step(lam, v, code.branch_indices[0])

    lam = chain_seed(code)
    for _ in range(FIXED_POINT_MAX_STEPS):
        nxt = phi(lam)
        if abs(nxt - lam) < 1e-14 * (1 + abs(lam)):
            break
        lam = nxt
    return nxt
