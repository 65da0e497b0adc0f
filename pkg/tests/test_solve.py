import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tanplane import kernel, solve
from tanplane.classify import Tag, classify
from tanplane.errors import DomainError
from tanplane.kernel import INFINITY, Fate, orbit
from tanplane.solve import (
    CodeKind,
    ComponentCode,
    capture_center,
    fixed_point_iteration_step,
    newton_param,
    pole,
    virtual_center,
    virtual_center_limit,
)

from conftest import images8

ROOT_PI = math.sqrt(math.pi)


@pytest.mark.parametrize("j", range(6))
def test_pole_values(j):
    assert abs(pole(j) - math.sqrt((2 * j + 1) * math.pi / 2)) < 1e-15
    for s in solve.poles(j)[-4:]:
        assert kernel.eval_f(1.0, s) is INFINITY


def test_poles_rejects_negative_index():
    with pytest.raises(ValueError):
        solve.poles(-1)


def test_order_one_prepoles_hit_the_pole_at_once():
    for lam in solve.prepole_parameters_order1(3):
        assert orbit(lam, lam * 1j, 5, 1e-9).fate is Fate.POLE


@pytest.mark.parametrize("k", range(1, 6))
def test_order_one_capture_centers(k):
    r = capture_center(ComponentCode(k))
    assert abs(r.root - math.sqrt(k * math.pi)) < 1e-10
    assert r.residual < 1e-12


def test_negative_index_capture_center_is_imaginary():
    r = capture_center(ComponentCode(-1))
    assert abs(r.root - 1j * ROOT_PI) < 1e-10


def test_newton_param_examples():
    assert abs(newton_param(1, 0, 1.7).root - ROOT_PI) < 1e-10
    r = newton_param(1, INFINITY, 1.3j)
    assert abs(r.root - 1j * pole(0)) < 1e-10
    with pytest.raises(ValueError):
        newton_param(-1, 0, 1.0)


@pytest.mark.parametrize("k", [1, 2, -1])
@pytest.mark.parametrize("j", [1, 2, 3, 5, 8])
def test_order_two_capture_centers(k, j):
    r = capture_center(ComponentCode(k, (j,)))
    assert r.residual < 1e-9
    assert classify(r.root).tag is Tag.CAPTURE


def test_order_two_centers_approach_the_poles():
    d = [abs(capture_center(ComponentCode(1, (j,))).root - pole(j - 1)) for j in (1, 2, 3, 5, 8, 12)]
    assert all(b < a for a, b in zip(d, d[1:]))
    assert abs(capture_center(ComponentCode(1, (8,))).root - pole(8)) < 0.5


def test_order_two_centers_with_growing_base_index():
    # the zero preimage runs off to infinity, the center to the pole s_{j-1}
    d = [abs(capture_center(ComponentCode(k, (2,))).root - pole(1)) for k in (1, 3, 10, 30, 100)]
    assert all(b < a for a, b in zip(d, d[1:]))
    assert d[-1] < 0.03


def test_capture_centers_are_closed_under_symmetry():
    lam = capture_center(ComponentCode(-1, (1,))).root
    for m in images8(lam):
        assert abs(kernel.iterate(m, m * 1j, 2)) < 1e-9


def test_fixed_point_iteration_converges_for_positive_branch():
    lam = 1.5 + 0.2j
    for _ in range(200):
        lam = fixed_point_iteration_step(lam, ROOT_PI, 1)
    assert abs(kernel.eval_f(lam, lam * 1j) - ROOT_PI) < 1e-12
    assert abs(lam - capture_center(ComponentCode(1, (1,))).root) < 1e-10


def test_fixed_point_iteration_branch_zero():
    lam = 1 + 0.5j
    for _ in range(200):
        lam = fixed_point_iteration_step(lam, ROOT_PI, 0)
    assert abs(kernel.eval_f(lam, lam * 1j) - ROOT_PI) < 1e-12


@given(st.floats(0.3, 3), st.floats(-1, 1), st.floats(0.2, 4), st.integers(0, 3))
def test_real_and_complex_targets_agree(x, y, p, j):
    # the closed-form real-target step equals the generic complex one
    lam = complex(x, y)
    a = fixed_point_iteration_step(lam, p, j)
    w = -p / lam
    b = cmath.sqrt(cmath.atan(w) + j * math.pi)
    assert abs(a * a - b * b) < 1e-9 * (1 + abs(b) ** 2)
    # off the square-root cut the principal roots coincide
    if b.real > 1e-6:
        assert abs(a - b) < 1e-9 * (1 + abs(b))


def test_fixed_point_iteration_domain():
    with pytest.raises(DomainError):
        fixed_point_iteration_step(0, 1.0, 0)


def test_code_validation():
    with pytest.raises(ValueError):
        ComponentCode(0)
    with pytest.raises(ValueError):
        ComponentCode(-1, (), CodeKind.PRE_POLE)
    with pytest.raises(ValueError):
        ComponentCode(1, (), CodeKind.PRE_ZERO, quarter=4)
    assert ComponentCode(3, (1, 2)).order == 3
    assert ComponentCode(3, (1,), CodeKind.PRE_POLE).order == 3


@pytest.mark.parametrize("q", range(4))
def test_order_two_virtual_centers(q):
    code = ComponentCode(0, (), CodeKind.PRE_POLE, quarter=q)
    lam = virtual_center(code).root
    assert abs(abs(lam) - pole(0)) < 1e-15
    assert kernel.eval_f(lam, lam * 1j) is INFINITY


def test_imaginary_axis_virtual_center():
    lam = virtual_center(ComponentCode(0, (), CodeKind.PRE_POLE, quarter=2)).root
    assert abs(lam - 1j * pole(0)) < 1e-15


@pytest.mark.parametrize("js", [(1,), (2,), (1, 1), (2, 0)])
def test_higher_order_virtual_centers(js):
    code = ComponentCode(0, js, CodeKind.PRE_POLE, quarter=1)
    r = virtual_center(code)
    z = kernel.iterate(r.root, r.root * 1j, code.order - 2)
    assert abs(z - code.target()) < 1e-9
    assert kernel.eval_f(r.root, z) is INFINITY


def test_virtual_center_period_mismatch():
    with pytest.raises(ValueError):
        virtual_center(ComponentCode(0, (1,), CodeKind.PRE_POLE), p=2)
    with pytest.raises(ValueError):
        virtual_center(ComponentCode(1, (1,)))


def test_order_three_accumulation_reaches_limit():
    code = lambda k: ComponentCode(k, (1,), CodeKind.PRE_POLE)
    limit = virtual_center_limit(code(1))
    assert abs(limit - pole(0)) < 1e-12
    d = [abs(virtual_center(code(k)).root - limit) for k in range(1, 11)]
    assert all(b < a for a, b in zip(d, d[1:]))
