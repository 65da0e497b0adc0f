"""Dynamics and parameter plane of the family f(z) = lam * tan(z**2)."""
from .classify import Classification, Tag, capture_radius, classify, symmetry_images, zero_trap_radius
from .cycles import Cycle, Stability, detect_cycle, multiplier_chain, multiplier_product_formula, refine_cycle
from .kernel import INFINITY, Fate, OrbitOutcome, Tract, eval_df, eval_f, inverse_branch, orbit, tract_of
from .solve import CodeKind, ComponentCode, capture_center, newton_param, poles, virtual_center

__version__ = "0.1.0"
