import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from tanplane import shell
from tanplane.classify import (
    Classification,
    Tag,
    capture_radius,
    classify,
    symmetry_images,
    zero_trap_radius,
)
from tanplane.kernel import eval_f

from conftest import SHELL1_LAM, images8

coord = st.floats(-3, 3, allow_nan=False)
lams = st.builds(complex, coord, coord).filter(lambda z: abs(z) > 1e-3)


def test_trap_radius_examples():
    assert zero_trap_radius(1.0) == 0.25
    assert zero_trap_radius(0.1) == 0.5
    with pytest.raises(ValueError):
        zero_trap_radius(0)


@given(lams)
def test_capture_radius_is_certified(lam):
    R = capture_radius(lam)
    assert R >= zero_trap_radius(lam)
    assert abs(lam) * math.tan(R * R) < R


@given(lams, st.floats(0, 0.999), st.floats(0, 2 * math.pi))
def test_capture_disk_contracts(lam, frac, th):
    R = capture_radius(lam)
    z = frac * R * cmath.exp(1j * th)
    for _ in range(30):
        nz = eval_f(lam, z)
        assert abs(nz) <= abs(z) + 1e-15
        z = nz


def test_small_real_parameter_captures_at_once():
    assert classify(0.5) == Classification.capture(0)


def test_exact_period_one_parameter():
    v = classify(shell.S(-3j))
    assert v.tag is Tag.SHELL and v.period == 1
    assert abs(abs(v.multiplier) - 6 / math.sinh(3)) < 1e-9


def test_rounded_period_one_parameter():
    v = classify(SHELL1_LAM)
    assert v.tag is Tag.SHELL and v.period == 1
    assert abs(v.mod_multiplier - 0.59893) < 1e-3


def test_capture_center_captures_early():
    v = classify(math.sqrt(math.pi))
    assert v.tag is Tag.CAPTURE and v.depth <= 2


def test_zero_parameter_unresolved():
    assert classify(0).tag is Tag.UNRESOLVED
    with pytest.raises(ValueError):
        classify(1.0, 0)


def test_index_and_modulus():
    assert Classification.capture(3).index == 3
    assert Classification.shell(2, 0.5j).index == 2
    assert Classification.shell(2, 0.5j).mod_multiplier == 0.5
    assert Classification.unresolved("x").index is None


def test_symmetry_image_counts():
    assert len(symmetry_images(complex(1, 2)).members) == 8
    assert len(symmetry_images(1.0).members) == 4
    # points on the diagonals are fixed by one reflection
    assert len(symmetry_images(complex(1, 1)).members) == 4
    with pytest.raises(ValueError):
        symmetry_images(0)


def _key(v):
    return v.tag, v.depth, v.period


@given(lams)
def test_verdict_constant_on_symmetry_orbit(lam):
    vs = [classify(m) for m in images8(lam)]
    ref = vs[0]
    for v in vs[1:]:
        assert _key(v) == _key(ref)
        if ref.multiplier is not None:
            assert abs(v.mod_multiplier - ref.mod_multiplier) <= 1e-9


@given(st.floats(1e-3, 10), st.sampled_from([1, 1j, -1, -1j]))
def test_no_shell_on_the_axes(r, d):
    assert classify(r * d).tag is not Tag.SHELL


@given(st.floats(1e-3, math.sqrt(math.pi / 4) - 1e-9), st.sampled_from([1, 1j, -1, -1j]))
def test_small_axis_parameters_capture_at_depth_zero(r, d):
    lam = r * d
    assert classify(lam) == Classification.capture(0)
    z = lam * 1j
    for _ in range(50):
        z = eval_f(lam, z)
        assert abs(z) <= abs(lam)


def test_period_one_parametrization_sampled():
    rng = np.random.default_rng(11)
    from tanplane.verify import admissible_u, period1_check

    pairs = admissible_u(rng, 40)
    failures, worst = period1_check(pairs)
    assert failures == 0 and worst < 1e-8
