"""Rasters of the parameter plane (classification per pixel) and of the
dynamic plane (orbit fate per pixel), with PPM and CSV writers."""
from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

from . import kernel
from .classify import DEFAULT_BUDGET, Classification, Tag, capture_radius, classify
from .kernel import Fate, OrbitOutcome

RGB = Tuple[int, int, int]

# 16-step ramp for capture depth / trap step, cycled
DEPTH_RAMP: List[RGB] = [
    (250, 240, 200), (245, 220, 160), (240, 200, 120), (235, 175, 90),
    (225, 150, 70), (210, 125, 60), (190, 100, 55), (165, 80, 55),
    (140, 65, 60), (115, 55, 70), (95, 50, 85), (80, 50, 105),
    (70, 55, 125), (65, 65, 145), (65, 80, 165), (70, 100, 185),
]
# categorical palette indexed by period - 1, cycled
PERIOD_PALETTE: List[RGB] = [
    (31, 119, 180), (214, 39, 40), (44, 160, 44), (148, 103, 189),
    (255, 127, 14), (23, 190, 207), (227, 119, 194), (188, 189, 34),
    (140, 86, 75), (127, 127, 127), (57, 59, 121), (99, 121, 57),
]
BLACK: RGB = (0, 0, 0)
POLE_COLOR: RGB = (255, 255, 255)
ESCAPE_COLOR: RGB = (96, 96, 96)


@dataclass(frozen=True)
class Region:
    center: complex
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("region width and height must be positive")

    def pixel_center(self, i: int, j: int, width_px: int, height_px: int) -> complex:
        """Row i counts down from the top, column j to the right.

        The offsets are odd integers times a half pixel, so pixels mirrored
        through the region center get exactly negated offsets.
        """
        dx = (2 * j + 1 - width_px) * self.width / (2 * width_px)
        dy = (2 * i + 1 - height_px) * self.height / (2 * height_px)
        return complex(self.center.real + dx, self.center.imag - dy)


@dataclass
class Raster:
    region: Region
    width_px: int
    height_px: int
    mode: str                      # "parameter" or "dynamic"
    pixels: List[list]             # row-major, top row first
    lam: Optional[complex] = None  # the fixed parameter in dynamic mode
    subpixels: Optional[List[list]] = field(default=None, repr=False)

    def coord(self, i: int, j: int) -> complex:
        return self.region.pixel_center(i, j, self.width_px, self.height_px)


def _check_dims(width_px, height_px, budget):
    if width_px < 1 or height_px < 1:
        raise ValueError("raster dimensions must be >= 1")
    if budget < 1:
        raise ValueError("budget must be >= 1")


def _classify_point(lam, budget):
    if lam == 0:
        return Classification.unresolved("zero")
    return classify(lam, budget)


def _param_row(args):
    region, i, w, h, budget, supersample = args
    row, subs = [], []
    for j in range(w):
        row.append(_classify_point(region.pixel_center(i, j, w, h), budget))
        if supersample:
            # the four quarter-pixel centers
            quads = []
            for a in (0, 1):
                for b in (0, 1):
                    quads.append(_classify_point(region.pixel_center(2 * i + a, 2 * j + b, 2 * w, 2 * h), budget))
            subs.append(quads)
    return i, row, subs


def _dyn_point(lam, z, budget, trap):
    return kernel.orbit(lam, z, budget, trap)


def _dyn_row(args):
    lam, region, i, w, h, budget = args
    trap = capture_radius(lam)
    return i, [_dyn_point(lam, region.pixel_center(i, j, w, h), budget, trap) for j in range(w)], []


def _run_rows(fn, jobs, threads):
    """Evaluate row jobs, serially or on a process pool; rows are placed
    by index so the result does not depend on the schedule."""
    n = len(jobs)
    out: List[Optional[list]] = [None] * n
    subs: List[Optional[list]] = [None] * n
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1 or n == 1:
        for job in jobs:
            i, row, sub = fn(job)
            out[i], subs[i] = row, sub
    else:
        with ProcessPoolExecutor(max_workers=min(threads, n)) as pool:
            for i, row, sub in pool.map(fn, jobs, chunksize=max(1, n // (4 * threads))):
                out[i], subs[i] = row, sub
    return out, subs


def render_parameter_plane(region: Region, width_px: int, height_px: int,
                           budget: int = DEFAULT_BUDGET, threads: Optional[int] = 1,
                           supersample: bool = False) -> Raster:
    """classify() at every pixel center (lam = 0 is Unresolved).

    With ``supersample`` the four quarter-pixel verdicts are kept as well,
    for presentation images only; ``pixels`` always holds the center verdict.
    """
    _check_dims(width_px, height_px, budget)
    jobs = [(region, i, width_px, height_px, budget, supersample) for i in range(height_px)]
    rows, subs = _run_rows(_param_row, jobs, threads)
    return Raster(region, width_px, height_px, "parameter", rows,
                  subpixels=subs if supersample else None)


def render_dynamic_plane(lam: complex, region: Region, width_px: int, height_px: int,
                         budget: int = DEFAULT_BUDGET, threads: Optional[int] = 1) -> Raster:
    """Orbit fate of every pixel-center z under f_lam."""
    if lam == 0:
        raise ValueError("lam must be nonzero")
    _check_dims(width_px, height_px, budget)
    jobs = [(complex(lam), region, i, width_px, height_px, budget) for i in range(height_px)]
    rows, _ = _run_rows(_dyn_row, jobs, threads)
    return Raster(region, width_px, height_px, "dynamic", rows, lam=complex(lam))


# -- colors and writers ------------------------------------------------------

def default_colormap(v) -> RGB:
    """Depth ramp for captures and trap entries, period palette for shells
    and cycles, black for Unresolved/Exhausted."""
    if isinstance(v, Classification):
        if v.tag is Tag.CAPTURE:
            return DEPTH_RAMP[v.depth % len(DEPTH_RAMP)]
        if v.tag is Tag.SHELL:
            return PERIOD_PALETTE[(v.period - 1) % len(PERIOD_PALETTE)]
        return BLACK
    if isinstance(v, OrbitOutcome):
        if v.fate is Fate.TRAP:
            return DEPTH_RAMP[v.step % len(DEPTH_RAMP)]
        if v.fate is Fate.CYCLE:
            return PERIOD_PALETTE[(v.period - 1) % len(PERIOD_PALETTE)]
        if v.fate is Fate.POLE:
            return POLE_COLOR
        if v.fate is Fate.ESCAPED:
            return ESCAPE_COLOR
        return BLACK
    raise TypeError(f"no color for {type(v).__name__}")


def _pixel_rgb(raster, i, j, colormap):
    if raster.subpixels is not None:
        cols = [colormap(s) for s in raster.subpixels[i][j]]
        return tuple((sum(c[k] for c in cols) + 2) // 4 for k in range(3))
    return colormap(raster.pixels[i][j])


def ppm_bytes(raster: Raster, colormap: Callable = default_colormap) -> bytes:
    body = bytearray()
    for i in range(raster.height_px):
        for j in range(raster.width_px):
            body.extend(bytes(_pixel_rgb(raster, i, j, colormap)))
    header = f"P6\n{raster.width_px} {raster.height_px}\n255\n".encode("ascii")
    return header + bytes(body)


def write_ppm(raster: Raster, path, colormap: Callable = default_colormap) -> None:
    """Binary PPM (P6, maxval 255), top row first."""
    data = ppm_bytes(raster, colormap)
    with open(path, "wb") as fh:
        fh.write(data)


CSV_HEADER = ["i", "j", "re", "im", "tag", "index", "mod_multiplier"]


def _csv_fields(v):
    if isinstance(v, Classification):
        idx = v.index
        mod = v.mod_multiplier
        return v.tag.value, "" if idx is None else str(idx), "" if mod is None else repr(mod)
    # dynamic mode: the fate, then trap step or cycle period
    idx = v.period if v.fate is Fate.CYCLE else v.step
    return v.fate.value, "" if idx is None else str(idx), ""


def write_grid_csv(raster: Raster, path) -> None:
    """One row per pixel; coordinates written with repr so they round-trip."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for i in range(raster.height_px):
            for j in range(raster.width_px):
                z = raster.coord(i, j)
                w.writerow([i, j, repr(z.real), repr(z.imag), *_csv_fields(raster.pixels[i][j])])


def read_grid_csv(path) -> List[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
