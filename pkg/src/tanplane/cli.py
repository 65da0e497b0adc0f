"""Command-line interface.

Exit codes: 0 success, 1 invalid arguments, 2 numerical failure (or a
failed verification property).
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import render, shell, solve, verify
from .classify import DEFAULT_BUDGET, VERIFY_BUDGET, classify
from .errors import NumericalFailure, TanPlaneError
from .solve import CodeKind, ComponentCode


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_complex(text: str) -> complex:
    """'re,im' -> complex."""
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected re,im but got {text!r}")
    try:
        re_, im_ = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None
    if not (math.isfinite(re_) and math.isfinite(im_)):
        raise argparse.ArgumentTypeError("complex parts must be finite")
    return complex(re_, im_)


def parse_range(text: str) -> Tuple[int, int]:
    """'a..b' -> (a, b), inclusive."""
    a, sep, b = text.partition("..")
    try:
        lo, hi = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b but got {text!r}") from None
    if not sep or hi < lo:
        raise argparse.ArgumentTypeError(f"expected a..b with a <= b, got {text!r}")
    return lo, hi


def parse_float_range(text: str) -> Tuple[float, float]:
    a, sep, b = text.partition("..")
    try:
        lo, hi = float(a), float(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b but got {text!r}") from None
    if not sep or not hi > lo:
        raise argparse.ArgumentTypeError(f"expected a..b with a < b, got {text!r}")
    return lo, hi


def parse_size(text: str) -> Tuple[float, float]:
    """'WxH' (or a single number for a square) -> positive (w, h)."""
    parts = text.lower().split("x")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH but got {text!r}") from None
    if len(vals) == 1:
        vals = vals * 2
    if len(vals) != 2 or not all(v > 0 and math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected positive WxH, got {text!r}")
    return vals[0], vals[1]


def parse_px(text: str) -> Tuple[int, int]:
    w, h = parse_size(text)
    if w != int(w) or h != int(h):
        raise argparse.ArgumentTypeError(f"pixel counts must be integers, got {text!r}")
    return int(w), int(h)


def parse_ints(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def unit_interval(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {v}")
    return v


def fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r}") from None


def _fmt(z: complex) -> str:
    return f"{z.real:.12g},{z.imag:.12g}"


def _verdict_dict(lam, v):
    d = {"lambda": [lam.real, lam.imag], "tag": v.tag.value}
    if v.depth is not None:
        d["depth"] = v.depth
    if v.period is not None:
        d["period"] = v.period
        d["multiplier"] = [v.multiplier.real, v.multiplier.imag]
        d["mod_multiplier"] = abs(v.multiplier)
    if v.reason is not None:
        d["reason"] = v.reason
    return d


def _emit(out, line: str):
    out.write(line + "\n")


def _write_raster(raster, path):
    if path.lower().endswith(".csv"):
        render.write_grid_csv(raster, path)
    else:
        render.write_ppm(raster, path)


# -- subcommands -------------------------------------------------------------

def cmd_render_param(a, out):
    w, h = a.px
    raster = render.render_parameter_plane(render.Region(a.center, *a.size), w, h, a.budget,
                                           threads=a.threads, supersample=a.supersample)
    _write_raster(raster, a.out)
    _emit(out, f"wrote {a.out} ({w}x{h})")


def cmd_render_dyn(a, out):
    if a.lam == 0:
        raise UsageError("--lam must be nonzero")
    w, h = a.px
    raster = render.render_dynamic_plane(a.lam, render.Region(a.center, *a.size), w, h, a.budget,
                                         threads=a.threads)
    _write_raster(raster, a.out)
    _emit(out, f"wrote {a.out} ({w}x{h})")


def cmd_classify(a, out):
    lams = a.lam_list or ([a.lam] if a.lam is not None else [])
    if not lams:
        raise UsageError("give at least one parameter")
    for lam in lams:
        if lam == 0:
            raise UsageError("lambda must be nonzero")
        _emit(out, json.dumps(_verdict_dict(lam, classify(lam, a.budget)), sort_keys=True))


def _codes(a, kind) -> List[ComponentCode]:
    if a.code:
        k, *js = a.code
        return [ComponentCode(k, tuple(js), kind, quarter=a.quarter if kind is CodeKind.PRE_POLE else 0)]
    lo, hi = a.k_range
    length = a.order - (1 if kind is CodeKind.PRE_ZERO else 2)
    if length < 0:
        raise UsageError("order too small for this kind of code")
    branches = tuple(a.branch for _ in range(length))
    codes = []
    for k in range(lo, hi + 1):
        if kind is CodeKind.PRE_ZERO and k == 0:
            continue
        if kind is CodeKind.PRE_POLE and k < 0:
            continue
        codes.append(ComponentCode(k, branches, kind,
                                   quarter=a.quarter if kind is CodeKind.PRE_POLE else 0))
    return codes


def cmd_centers(a, out):
    codes = _codes(a, CodeKind.PRE_ZERO)
    _emit(out, "code\tre\tim\tresidual")
    for code in codes:
        r = solve.capture_center(code)
        label = ",".join(str(x) for x in (code.base_index, *code.branch_indices))
        _emit(out, f"{label}\t{r.root.real:.12f}\t{r.root.imag:.12f}\t{r.residual:.3e}")


def cmd_virtual_centers(a, out):
    codes = _codes(a, CodeKind.PRE_POLE)
    _emit(out, "code\tre\tim\tresidual\tdistance_to_limit")
    for code in codes:
        p = code.order
        r = solve.virtual_center(code, p)
        dist = ""
        if code.branch_indices:
            dist = f"{abs(r.root - solve.virtual_center_limit(code)):.6e}"
        label = ",".join(str(x) for x in (code.base_index, *code.branch_indices))
        _emit(out, f"{label}\t{r.root.real:.12f}\t{r.root.imag:.12f}\t{r.residual:.3e}\t{dist}")


def cmd_ray(a, out):
    if a.lam is None:
        raise UsageError("--lam is required")
    pts = shell.trace_internal_ray(a.lam, a.alpha_value, a.r_stop, a.steps, a.budget)
    rows = ["r,re,im,mult_re,mult_im"]
    for p in pts:
        m = p.cycle.multiplier
        rows.append(f"{p.r!r},{p.lam.real!r},{p.lam.imag!r},{m.real!r},{m.imag!r}")
    if a.out:
        with open(a.out, "w") as fh:
            fh.write("\n".join(rows) + "\n")
        _emit(out, f"wrote {a.out} ({len(pts)} points)")
    else:
        for row in rows:
            _emit(out, row)
    near = min(solve.poles(40), key=lambda s: abs(pts[-1].lam - s))
    _emit(out, f"# end {_fmt(pts[-1].lam)} nearest order-1 virtual center {_fmt(near)} "
               f"distance {abs(pts[-1].lam - near):.3e}")


def cmd_buds(a, out):
    frac = a.alpha_fraction
    q, p = frac.numerator, frac.denominator
    u, root = shell.bud_root_parameter(q, p)
    bud = shell.find_bud(root, p, q, 1, a.radius, a.budget)
    result = {"argument": f"{q}/{p}", "u": [u.real, u.imag], "root": [root.real, root.imag],
              "bud": None if bud is None else [bud.real, bud.imag]}
    if bud is not None:
        result["verdict"] = _verdict_dict(bud, classify(bud, a.budget))
    _emit(out, json.dumps(result, sort_keys=True))


def cmd_quadruplets(a, out):
    lam_star = a.center
    if lam_star == 0:
        raise UsageError("--center must be a virtual center, not 0")
    found = shell.quadruplet(lam_star, a.order, a.radius, budget=a.budget)
    for tract, lam in found:
        _emit(out, json.dumps({"tract": tract.quadrant, "lambda": [lam.real, lam.imag]}, sort_keys=True))
    _emit(out, f"# {len(found)} of 4 tracts represented")


def cmd_boundary(a, out):
    lo, hi = a.x_range
    half = shell.Half.UPPER if a.half == "upper" else shell.Half.LOWER
    samples = shell.trace_unit_H_boundary(lo, hi, a.samples, half)
    rows = ["x,y,lambda_re,lambda_im,y_over_exp2x"]
    for s in samples:
        rows.append(f"{s.t!r},{s.u.imag!r},{s.lam.real!r},{s.lam.imag!r},{s.u.imag / math.exp(2 * abs(s.t))!r}")
    if a.out:
        with open(a.out, "w") as fh:
            fh.write("\n".join(rows) + "\n")
        _emit(out, f"wrote {a.out} ({len(samples)} samples)")
    else:
        for row in rows:
            _emit(out, row)


def cmd_verify(a, out):
    suites = verify.SUITES if a.suite == "all" else (a.suite,)
    records = []
    for s in suites:
        for rec in verify.run_verify(s, a.samples, a.seed, a.budget):
            records.append(rec)
            _emit(out, json.dumps(rec, sort_keys=True))
    return 2 if verify.failed(records) else 0


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tanplane", description="Parameter plane of lam * tan(z^2).")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, budget=DEFAULT_BUDGET):
        sp.add_argument("--budget", type=positive_int, default=budget, help=f"iteration budget (default {budget})")

    sp = sub.add_parser("render-param", help="classify a grid of parameters and write PPM or CSV")
    sp.add_argument("--center", type=parse_complex, default=0j, help="region center re,im (default 0,0)")
    sp.add_argument("--size", type=parse_size, default=(6.0, 6.0), help="region WxH (default 6x6)")
    sp.add_argument("--px", type=parse_px, default=(512, 512), help="pixels N or WxH (default 512)")
    sp.add_argument("--out", required=True, help="output path; .csv writes the grid, anything else PPM")
    sp.add_argument("--threads", type=positive_int, default=os.cpu_count() or 1)
    sp.add_argument("--supersample", action="store_true", help="2x2 supersampled colors (images only)")
    common(sp)
    sp.set_defaults(func=cmd_render_param)

    sp = sub.add_parser("render-dyn", help="orbit fates on a grid of starting points for fixed lam")
    sp.add_argument("--lam", type=parse_complex, required=True)
    sp.add_argument("--center", type=parse_complex, default=0j)
    sp.add_argument("--size", type=parse_size, default=(4.0, 4.0), help="region WxH (default 4x4)")
    sp.add_argument("--px", type=parse_px, default=(512, 512))
    sp.add_argument("--out", required=True)
    sp.add_argument("--threads", type=positive_int, default=os.cpu_count() or 1)
    common(sp)
    sp.set_defaults(func=cmd_render_dyn)

    sp = sub.add_parser("classify", help="verdict for one or more parameters")
    sp.add_argument("lam_list", nargs="*", type=parse_complex, metavar="RE,IM")
    sp.add_argument("--lam", type=parse_complex)
    common(sp)
    sp.set_defaults(func=cmd_classify)

    for name, func, order in (("centers", cmd_centers, 1), ("virtual-centers", cmd_virtual_centers, 3)):
        sp = sub.add_parser(name, help=f"solve coded {name.replace('-', ' ')}")
        sp.add_argument("--order", type=positive_int, default=order, help=f"period of the component (default {order})")
        sp.add_argument("--k-range", type=parse_range, default=(1, 5) if order == 1 else (0, 10))
        sp.add_argument("--branch", type=int, default=1 if order > 1 else 0,
                        help="branch index used for every position when --code is absent")
        sp.add_argument("--code", type=parse_ints, help="explicit code k,j1,j2,...")
        sp.add_argument("--quarter", type=int, choices=range(4), default=1,
                        help="pole direction i**quarter for pre-pole codes (default 1)")
        sp.set_defaults(func=func)

    sp = sub.add_parser("ray", help="trace an internal ray from a shell parameter")
    sp.add_argument("--lam", type=parse_complex, help="seed parameter inside a shell component")
    sp.add_argument("--alpha", dest="alpha_value", type=float, default=0.0)
    sp.add_argument("--r-stop", type=unit_interval, default=1e-6)
    sp.add_argument("--steps", type=positive_int, default=64)
    sp.add_argument("--out")
    common(sp)
    sp.set_defaults(func=cmd_ray)

    sp = sub.add_parser("buds", help="locate a bud at internal argument q/p of a period-one component")
    sp.add_argument("--alpha", dest="alpha_fraction", type=fraction, default=Fraction(1, 2),
                    help="internal argument as q/p (default 1/2)")
    sp.add_argument("--radius", type=float, default=0.05)
    common(sp)
    sp.set_defaults(func=cmd_buds)

    sp = sub.add_parser("quadruplets", help="probe the four components at a virtual center")
    sp.add_argument("--center", type=parse_complex, default=complex(0, math.sqrt(math.pi / 2)))
    sp.add_argument("--order", type=positive_int, default=2)
    sp.add_argument("--radius", type=float, default=0.02)
    common(sp)
    sp.set_defaults(func=cmd_quadruplets)

    sp = sub.add_parser("boundary", help="trace |H(u)| = 1 and its image in the parameter plane")
    sp.add_argument("--x-range", type=parse_float_range, default=(3.0, 6.0))
    sp.add_argument("--samples", type=positive_int, default=31)
    sp.add_argument("--half", choices=("upper", "lower"), default="upper")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_boundary)

    sp = sub.add_parser("verify", help="run property suites, JSON lines on stdout")
    sp.add_argument("--suite", choices=("all",) + verify.SUITES, default="all")
    sp.add_argument("--samples", type=positive_int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    common(sp, VERIFY_BUDGET)
    sp.set_defaults(func=cmd_verify)
    return p


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "radius", 1.0) <= 0:
            raise UsageError("--radius must be positive")
        code = args.func(args, out)
        return code or 0
    except UsageError as exc:
        err.write(f"tanplane: error: {exc}\n")
        return 1
    except ValueError as exc:
        err.write(f"tanplane: invalid input: {exc}\n")
        return 1
    except (NumericalFailure, TanPlaneError) as exc:
        err.write(f"tanplane: numerical failure: {type(exc).__name__}: {exc}\n")
        return 2
    except OSError as exc:
        err.write(f"tanplane: {exc}\n")
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
