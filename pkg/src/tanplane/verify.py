"""Property suites run by ``tanplane verify``.

Each suite returns records {suite, property, samples, worst_deviation,
pass, seed}; ``pass`` is None for properties that are reported but not
asserted.
"""
from __future__ import annotations

import cmath
import math
from typing import Callable, Dict, List, Optional

import numpy as np

from . import kernel, shell, solve
from .classify import VERIFY_BUDGET, Tag, classify, symmetry_images
from .cycles import detect_cycle, multiplier_chain, multiplier_product_formula, refine_cycle
from .errors import NumericalFailure, TanPlaneError
from .solve import CodeKind, ComponentCode, pole

SUITES = ("symmetry", "axes", "multiplier", "period1", "rays", "quadruplets",
          "buds", "boundary", "solve-residuals")
AXIS_CAPTURE_LIMIT = math.sqrt(math.pi / 4)


def _record(suite, prop, samples, worst, ok, seed, **extra):
    if worst is not None and not math.isfinite(worst):
        worst = None
    rec = {"suite": suite, "property": prop, "samples": int(samples),
           "worst_deviation": None if worst is None else float(worst),
           "pass": None if ok is None else bool(ok), "seed": seed}
    rec.update(extra)
    return rec


def _rel(a, b):
    return abs(a - b) / (1.0 + abs(a))


# -- symmetry (also feeds the cross-formula check) ---------------------------

def symmetry_check(lams, budget=VERIFY_BUDGET):
    """Worst deviations over the eight-element symmetry orbits of ``lams``.

    Returns a dict with the count of verdict mismatches, the worst modulus
    difference of multipliers, and the worst chain/product disagreement on
    every refined cycle met along the way.
    """
    mismatches = 0
    worst_mod = 0.0
    worst_cross = 0.0
    cycles = 0
    for lam in lams:
        orbit = symmetry_images(complex(lam)).members
        verdicts = [classify(m, budget) for m in orbit]
        ref = verdicts[0]
        for v in verdicts[1:]:
            if (v.tag, v.depth, v.period) != (ref.tag, ref.depth, ref.period):
                mismatches += 1
            elif ref.multiplier is not None:
                worst_mod = max(worst_mod, abs(abs(v.multiplier) - abs(ref.multiplier)))
        for m, v in zip(orbit, verdicts):
            if v.tag is not Tag.SHELL:
                continue
            cyc = detect_cycle(m, budget)
            if cyc is None:
                continue
            cycles += 1
            worst_cross = max(worst_cross, _rel(multiplier_chain(m, cyc), multiplier_product_formula(cyc)))
    return {"mismatches": mismatches, "worst_modulus": worst_mod,
            "worst_cross": worst_cross, "cycles": cycles}


def suite_symmetry(samples, seed, budget=VERIFY_BUDGET):
    rng = np.random.default_rng(seed)
    lams = [complex(x, y) for x, y in rng.uniform(-3, 3, size=(samples, 2))]
    res = symmetry_check(lams, budget)
    out = [
        _record("symmetry", "verdicts-constant-on-orbits", samples, res["mismatches"],
                res["mismatches"] == 0, seed),
        _record("symmetry", "multiplier-modulus-constant", samples, res["worst_modulus"],
                res["worst_modulus"] <= 1e-9, seed),
        _record("symmetry", "cross-formula-on-detected-cycles", res["cycles"], res["worst_cross"],
                res["worst_cross"] <= 1e-8, seed),
    ]
    # conjugation and rotation of orbits, step by step
    worst_c = worst_r = 0.0
    for lam in lams[: max(1, samples // 4)]:
        z, zc, zr = lam * 1j, (lam.conjugate()) * 1j, (1j * lam) * 1j
        for k in range(1, 101):
            z, zc, zr = kernel.eval_f(lam, z), kernel.eval_f(lam.conjugate(), zc), kernel.eval_f(1j * lam, zr)
            if kernel.INFINITY in (z, zc, zr) or abs(z) > 1e6:
                break
            worst_c = max(worst_c, abs(zc - z.conjugate()) / (1e-8 * k * (1 + abs(z))))
            worst_r = max(worst_r, abs(zr - (-1j) * z) / (1e-8 * k * (1 + abs(z))))
    n = max(1, samples // 4)
    out.append(_record("symmetry", "conjugate-orbits", n, worst_c, worst_c <= 1.0, seed))
    out.append(_record("symmetry", "rotated-orbits", n, worst_r, worst_r <= 1.0, seed))
    return out


# -- axes ------------------------------------------------------------------

def axis_samples(rng, n, r_max):
    out = []
    for k in range(n):
        r = float(rng.uniform(0, r_max))
        if r == 0:
            continue
        out.append(r * (1, 1j, -1, -1j)[k % 4])
    return out


def axes_exclusion(lams, budget=VERIFY_BUDGET):
    return sum(1 for lam in lams if classify(lam, budget).tag is Tag.SHELL)


def axes_capture(lams, budget=VERIFY_BUDGET):
    """Samples that do not trap at step 0 or whose orbit leaves |z| <= |lam|."""
    failures = 0
    worst = 0.0
    for lam in lams:
        v = classify(lam, budget)
        if v.tag is not Tag.CAPTURE or v.depth != 0:
            failures += 1
            continue
        z = lam * 1j
        for _ in range(50):
            z = kernel.eval_f(lam, z)
            worst = max(worst, abs(z) / abs(lam) - 1.0)
        if abs(z) > abs(lam):
            failures += 1
    return failures, worst


def suite_axes(samples, seed, budget=VERIFY_BUDGET):
    rng = np.random.default_rng(seed)
    excl = axis_samples(rng, samples, 10.0)
    shells = axes_exclusion(excl, budget)
    capt = axis_samples(rng, samples, AXIS_CAPTURE_LIMIT)
    fails, worst = axes_capture(capt, budget)
    return [
        _record("axes", "no-shell-on-axes", len(excl), shells, shells == 0, seed),
        _record("axes", "small-axis-parameters-capture-at-depth-0", len(capt), fails, fails == 0, seed,
                worst_growth=worst),
    ]


# -- multipliers -----------------------------------------------------------

def suite_multiplier(samples, seed, budget=VERIFY_BUDGET):
    rng = np.random.default_rng(seed)
    worst_cross = 0.0
    worst_sym = 0.0
    n = 0
    tries = 0
    while n < samples and tries < 50 * samples:
        tries += 1
        lam = complex(*rng.uniform(-3, 3, size=2))
        if lam == 0:
            continue
        cyc = detect_cycle(lam, budget)
        if cyc is None or cyc.contains_zero():
            continue
        n += 1
        worst_cross = max(worst_cross, _rel(multiplier_chain(lam, cyc), multiplier_product_formula(cyc)))
        # images of the cycle under the symmetries carry the same multiplier
        for mu, rot in ((-lam, -1), (1j * lam, -1j), (-1j * lam, 1j)):
            pts = [rot * z for z in cyc.points]
            c2 = refine_cycle(mu, pts, cyc.period)
            worst_sym = max(worst_sym, abs(c2.multiplier - cyc.multiplier))
        c3 = refine_cycle(lam.conjugate(), [z.conjugate() for z in cyc.points], cyc.period)
        worst_sym = max(worst_sym, abs(c3.multiplier - cyc.multiplier.conjugate()))
    return [
        _record("multiplier", "chain-equals-sine-product", n, worst_cross, worst_cross <= 1e-8, seed),
        _record("multiplier", "symmetric-cycles-equal-multipliers", n, worst_sym, worst_sym <= 1e-9, seed),
    ]


# -- period one ------------------------------------------------------------

def admissible_u(rng, n, max_modulus=0.95):
    """u with |H(u)| <= max_modulus, Re u in [-6, 6], 0 < |Im u| <= 12."""
    out = []
    while len(out) < n:
        x = float(rng.uniform(-6, 6))
        y = float(rng.uniform(0, 12)) * (1 if rng.integers(2) else -1)
        u = complex(x, y)
        if y == 0 or abs(shell.H(u)) > max_modulus:
            continue
        out.append((u, 1 if rng.integers(2) else -1))
    return out


def period1_check(pairs, budget=VERIFY_BUDGET):
    failures, worst = 0, 0.0
    for u, branch in pairs:
        v = classify(shell.S(u, branch), budget)
        if v.tag is not Tag.SHELL or v.period != 1:
            failures += 1
            continue
        worst = max(worst, abs(v.multiplier - shell.H(u)))
    return failures, worst


def suite_period1(samples, seed, budget=VERIFY_BUDGET):
    rng = np.random.default_rng(seed)
    pairs = admissible_u(rng, samples)
    failures, worst = period1_check(pairs, budget)
    return [_record("period1", "S-parametrizes-shell-with-multiplier-H", len(pairs), worst,
                    failures == 0 and worst < 1e-8, seed, failures=failures)]


# -- rays ------------------------------------------------------------------

def bud_ray(r_stop=1e-6):
    """The alpha = 0 ray of the period-two bud at internal argument 1/2."""
    _, root = shell.bud_root_parameter(1, 2)
    seed = shell.find_bud(root, 2, 1, 1, 0.05)
    if seed is None:
        raise NumericalFailure("no period-two bud found")
    return shell.trace_internal_ray(seed, 0.0, r_stop)


def nearest_pole(z, max_index=40):
    return min(solve.poles(max_index), key=lambda s: abs(z - s))


def suite_rays(samples, seed, budget=VERIFY_BUDGET):
    out = []
    # period one, alpha = 0: u = 2 z^2 on the negative imaginary axis
    lam0 = shell.S(-3j, 1)
    pts = shell.trace_internal_ray(lam0, 0.0, 1e-6)
    dev_u = max(abs((2 * p.cycle.points[0] ** 2).real) / (1 + abs(p.cycle.points[0]) ** 2) for p in pts)
    dev_arg = max(abs(cmath.phase(p.lam) - math.pi / 4) for p in pts)
    out.append(_record("rays", "period1-ray-on-imaginary-u-axis", len(pts), dev_u, dev_u < 1e-9, seed))
    out.append(_record("rays", "period1-ray-along-diagonal", len(pts), dev_arg, dev_arg < 1e-9, seed))
    out.append(_record("rays", "period1-ray-diverges", len(pts), None, abs(pts[-1].lam) > abs(pts[0].lam), seed,
                       final_modulus=abs(pts[-1].lam)))

    bud = bud_ray()
    for name, ray in (("period1", pts), ("period2-bud", bud)):
        res = max(abs(p.cycle.multiplier - p.r * cmath.exp(2j * math.pi * p.alpha)) for p in ray)
        mono = all(b.r < a.r for a, b in zip(ray, ray[1:]))
        out.append(_record("rays", f"{name}-multiplier-exact", len(ray), res, res < 1e-9 and mono, seed))

    # virtual-cycle diagnostics along the bud ray
    end = bud[-1]
    mid = min(bud, key=lambda p: abs(math.log(p.r) - math.log(1e-2)))
    z1 = min(end.cycle.points, key=lambda z: abs(z - end.lam * 1j))
    z0 = max(end.cycle.points, key=abs)
    z1_mid = min(mid.cycle.points, key=lambda z: abs(z - mid.lam * 1j))
    z0_mid = max(mid.cycle.points, key=abs)
    d_end = abs(z1 - nearest_pole(z1))
    d_mid = abs(z1_mid - nearest_pole(z1_mid))
    out.append(_record("rays", "bounded-cycle-point-tends-to-asymptotic-value", len(bud),
                       abs(z1 - end.lam * 1j), abs(z1 - end.lam * 1j) < 1e-3, seed))
    out.append(_record("rays", "bounded-cycle-point-approaches-pole", len(bud), d_end, d_end < d_mid, seed))
    out.append(_record("rays", "escaping-cycle-point-grows", len(bud), None, abs(z0) > abs(z0_mid), seed,
                       modulus_mid=abs(z0_mid), modulus_end=abs(z0)))
    d_vc = min(abs(end.lam - s) for s in solve.poles(40))
    out.append(_record("rays", "bud-ray-distance-to-virtual-center", len(bud), d_vc, None, seed))

    # a ray seeded in the thin part of a period-two component next to i s_0
    lam_star = 1j * pole(0)
    s = shell.seed_near_virtual_center(lam_star)
    near = shell.trace_internal_ray(s, 0.0, 1e-6)
    d_near = abs(near[-1].lam - lam_star)
    out.append(_record("rays", "near-center-ray-ends-at-virtual-center", len(near), d_near, d_near < 1e-3, seed))
    return out


# -- quadruplets -----------------------------------------------------------

def suite_quadruplets(samples, seed, budget=VERIFY_BUDGET):
    out = []
    for lam_star, label in ((1j * pole(0), "i*s0"), (pole(0), "s0"), (1j * pole(1), "i*s1")):
        for radius in (0.05, 0.02, 0.01):
            q = shell.quadruplet(lam_star, 2, radius)
            out.append(_record("quadruplets", f"four-tracts-at-{label}-radius-{radius}", 4,
                               4 - len(q), len(q) == 4, seed))
    # under lam -> -lam the tract of f(lam i) maps by z -> -z (quadrant + 2)
    q = shell.quadruplet(1j * pole(0), 2, 0.02)
    bad = 0
    for tract, lam in q:
        v = classify(-lam, budget)
        z = kernel.iterate(-lam, -lam * 1j, 1)
        t = kernel.tract_of(z, shell.QUADRUPLET_TRACT) if z is not kernel.INFINITY else None
        if v.tag is not Tag.SHELL or t is None or t.quadrant != (tract.quadrant + 1) % 4 + 1:
            bad += 1
    out.append(_record("quadruplets", "tracts-permute-under-negation", len(q), bad, bad == 0, seed))
    return out


# -- buds ------------------------------------------------------------------

def period2_boxes(extent=3.0, px=96, budget=5000):
    """Bounding boxes (width, height) of the connected period-2 regions seen
    on a px-by-px grid of [-extent, extent]^2."""
    from scipy import ndimage

    h = 2 * extent / px
    mask = np.zeros((px, px), dtype=bool)
    for i in range(px):
        for j in range(px):
            lam = complex(-extent + (j + 0.5) * h, extent - (i + 0.5) * h)
            v = classify(lam, budget)
            mask[i, j] = v.tag is Tag.SHELL and v.period == 2
    labels, n = ndimage.label(mask)
    boxes = []
    for sl in ndimage.find_objects(labels):
        boxes.append(((sl[1].stop - sl[1].start) * h, (sl[0].stop - sl[0].start) * h))
    return boxes


def suite_buds(samples, seed, budget=VERIFY_BUDGET):
    out = []
    for q, p in ((1, 2), (1, 3)):
        _, root = shell.bud_root_parameter(q, p)
        b = shell.find_bud(root, p, q, 1, 0.05)
        out.append(_record("buds", f"bud-{q}/{p}-has-period-{p}", 1, None, b is not None, seed))
    _, root0 = shell.bud_root_parameter(0, 1)
    out.append(_record("buds", "no-bud-at-argument-0", 1, None, shell.find_bud(root0, 1, 0, 1, 0.05) is None, seed))
    boxes = period2_boxes()
    big = max((max(b) for b in boxes), default=0.0)
    out.append(_record("buds", "period2-bounding-boxes", len(boxes), big, None, seed))
    return out


# -- boundary --------------------------------------------------------------

def asymptote_deviation(x_min=3.0, x_max=6.0, steps=31):
    """max |y(x)/e^{2x} - 1| along the upper branch of |H(u)| = 1."""
    samples = shell.trace_unit_H_boundary(x_min, x_max, steps)
    return max(abs(s.u.imag / math.exp(2 * s.t) - 1.0) for s in samples), samples


def diagonal_gap(lam):
    """Angular distance of lam from the nearest diagonal direction."""
    a = cmath.phase(lam)
    return min(abs(math.remainder(a - (2 * k + 1) * math.pi / 4, 2 * math.pi)) for k in range(4))


def suite_boundary(samples, seed, budget=VERIFY_BUDGET):
    out = []
    dev, pts = asymptote_deviation()
    out.append(_record("boundary", "exponential-asymptote-x-in-3..6", len(pts), dev, dev < 0.05, seed))
    y4 = shell.unit_boundary_height(4.0)
    out.append(_record("boundary", "exponential-asymptote-at-x=4", 1, abs(y4 / math.exp(8) - 1), abs(y4 / math.exp(8) - 1) < 0.05, seed))
    # the branch actually grows like log(4|u|)
    log_dev = max(abs(s.u.imag - math.log(4 * abs(s.u))) for s in pts)
    out.append(_record("boundary", "logarithmic-growth-x-in-3..6", len(pts), log_dev, None, seed))
    gaps = [diagonal_gap(s.lam) for s in pts]
    out.append(_record("boundary", "lambda-boundary-approaches-diagonals", len(pts), gaps[-1],
                       gaps[-1] < gaps[0], seed))
    y0 = shell.unit_boundary_height(0.0)
    out.append(_record("boundary", "height-at-x=0", 1, abs(math.sinh(y0) - 2 * y0), abs(math.sinh(y0) - 2 * y0) < 1e-9, seed))
    # boundary samples carry a neutral fixed point
    worst = 0.0
    grid = shell.trace_unit_H_boundary(-4.0, 4.0, max(samples // 10, 9))
    for s in grid:
        cyc = refine_cycle(s.lam, [shell.fixed_point_of(s.u)], 1)
        worst = max(worst, abs(abs(cyc.multiplier) - 1.0))
    out.append(_record("boundary", "boundary-samples-neutral", len(grid), worst, worst <= 1e-4, seed))
    return out


# -- solve residuals -------------------------------------------------------

def accumulation_distances(k_max=10, branch=1, quarter=0):
    """Distances of order-2 virtual centers (pole index k growing) to their
    limit, the order-1 virtual center."""
    limit = solve.virtual_center_limit(ComponentCode(1, (branch,), CodeKind.PRE_POLE, quarter=quarter))
    return [abs(solve.virtual_center(ComponentCode(k, (branch,), CodeKind.PRE_POLE, quarter=quarter)).root - limit)
            for k in range(1, k_max + 1)]


def suite_solve_residuals(samples, seed, budget=VERIFY_BUDGET):
    out = []
    worst = 0.0
    n = 0
    for k in range(1, 6):
        r = solve.capture_center(ComponentCode(k))
        worst = max(worst, abs(r.root - math.sqrt(k * math.pi)))
        n += 1
    for j in range(6):
        worst = max(worst, abs(solve.pole(j) - math.sqrt((2 * j + 1) * math.pi / 2)))
    out.append(_record("solve-residuals", "order1-centers-and-poles", n + 6, worst, worst < 1e-10, seed))

    worst = 0.0
    n = 0
    for k in (1, -1, 2, 3):
        for js in ((0,), (1,), (2,), (1, 1)):
            try:
                r = solve.capture_center(ComponentCode(k, js))
            except TanPlaneError:
                continue
            n += 1
            worst = max(worst, r.residual)
    out.append(_record("solve-residuals", "capture-center-residuals", n, worst, n > 0 and worst < 1e-9, seed))

    worst = 0.0
    n = 0
    for k in range(0, 4):
        for q in range(4):
            code = ComponentCode(k, (1,), CodeKind.PRE_POLE, quarter=q)
            r = solve.virtual_center(code)
            z = kernel.iterate(r.root, r.root * 1j, 1)
            worst = max(worst, abs(z - code.target()))
            n += 1
    out.append(_record("solve-residuals", "virtual-center-residuals", n, worst, worst < 1e-9, seed))

    d = accumulation_distances()
    mono = all(b < a for a, b in zip(d, d[1:]))
    out.append(_record("solve-residuals", "order2-accumulation-monotone", len(d), None, mono, seed))
    out.append(_record("solve-residuals", "order2-accumulation-within-1e-2-at-k=10", len(d), d[-1], d[-1] < 1e-2, seed))
    return out


SUITE_FUNCS: Dict[str, Callable] = {
    "symmetry": suite_symmetry,
    "axes": suite_axes,
    "multiplier": suite_multiplier,
    "period1": suite_period1,
    "rays": suite_rays,
    "quadruplets": suite_quadruplets,
    "buds": suite_buds,
    "boundary": suite_boundary,
    "solve-residuals": suite_solve_residuals,
}


def run_verify(suite: str, samples: int = 200, seed: int = 0,
               budget: int = VERIFY_BUDGET) -> List[dict]:
    if suite not in SUITE_FUNCS:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    return SUITE_FUNCS[suite](samples, seed, budget)


def failed(records: List[dict]) -> bool:
    return any(r["pass"] is False for r in records)
