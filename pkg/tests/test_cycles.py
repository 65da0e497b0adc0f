import math

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from tanplane import shell
from tanplane.cycles import (
    Stability,
    detect_cycle,
    multiplier_chain,
    multiplier_product_formula,
    refine_cycle,
    refine_minimal,
    stability_of,
)
from tanplane.errors import NotMinimalPeriod, RefinementDiverged, ZeroInCycle

from conftest import SHELL1_LAM

# 6/sinh 3 to 30 digits, the multiplier at u = -3i
SIX_OVER_SINH3 = float(mpmath.mpf(6) / mpmath.sinh(3))


def test_frozen_constant():
    assert abs(SIX_OVER_SINH3 - 0.5989294180) < 1e-10
    assert round(SIX_OVER_SINH3, 5) == 0.59893


def test_repelling_fixed_point_has_multiplier_pi():
    r = math.sqrt(math.pi / 4)
    cyc = refine_cycle(r, [r], 1)
    assert abs(cyc.multiplier - math.pi) < 1e-10
    assert cyc.stability is Stability.REPELLING


def test_zero_is_superattracting():
    cyc = refine_cycle(0.7, [0j], 1)
    assert cyc.multiplier == 0 and cyc.stability is Stability.SUPERATTRACTING


def test_stability_bands():
    assert stability_of(0.5) is Stability.ATTRACTING
    assert stability_of(1 + 1e-12) is Stability.NEUTRAL
    assert stability_of(1.1j) is Stability.REPELLING
    assert stability_of(0.3, contains_zero=True) is Stability.SUPERATTRACTING


def test_detect_fixed_point_of_rounded_parameter():
    cyc = detect_cycle(SHELL1_LAM)
    assert cyc.period == 1
    assert abs(cyc.points[0] - complex(0.86603, -0.86603)) < 1e-4
    # the rounded parameter sits within 1e-4 of the exact multiplier
    assert abs(abs(cyc.multiplier) - SIX_OVER_SINH3) < 1e-3


def test_exact_parameter_has_exact_multiplier():
    lam = shell.S(-3j)
    cyc = detect_cycle(lam)
    assert abs(cyc.multiplier - SIX_OVER_SINH3) < 1e-10
    assert abs(multiplier_product_formula(cyc) - SIX_OVER_SINH3) < 1e-10


@pytest.mark.parametrize("lam", [0.5, math.sqrt(math.pi), 1e-3])
def test_no_cycle_when_captured(lam):
    assert detect_cycle(lam) is None


def test_spurious_candidate_raises():
    lam = complex(2.7460498077459823, 3.3099064567252133e-140)
    with pytest.raises(RefinementDiverged):
        detect_cycle(lam)


def test_product_formula_rejects_zero():
    cyc = refine_cycle(0.7, [0j], 1)
    with pytest.raises(ZeroInCycle):
        multiplier_product_formula(cyc)


def test_non_minimal_period():
    lam = shell.S(-3j)
    z = shell.fixed_point_of(-3j)
    with pytest.raises(NotMinimalPeriod) as ei:
        refine_cycle(lam, [z, z], 2)
    assert ei.value.divisor == 1
    assert refine_minimal(lam, [z, z], 2).period == 1


def test_refinement_at_pole_diverges():
    with pytest.raises(RefinementDiverged):
        refine_cycle(1.0, [math.sqrt(math.pi / 2)], 1)


def test_period_must_be_positive():
    with pytest.raises(ValueError):
        refine_cycle(1.0, [0.1], 0)


coord = st.floats(-3, 3, allow_nan=False)


def _cycle_or_reject(lam):
    # chaotic real-axis orbits can revisit lam*i by coincidence; Newton then
    # fails on the spurious candidate, which detect_cycle reports by raising
    try:
        cyc = detect_cycle(lam, 5000)
    except RefinementDiverged:
        cyc = None
    assume(cyc is not None and not cyc.contains_zero())
    return cyc


@given(st.builds(complex, coord, coord))
def test_two_multiplier_formulas_agree(lam):
    assume(abs(lam) > 1e-3)
    cyc = _cycle_or_reject(lam)
    a, b = multiplier_chain(lam, cyc), multiplier_product_formula(cyc)
    assert abs(a - b) <= 1e-8 * (1 + abs(a))


@given(st.builds(complex, coord, coord))
def test_symmetric_cycles_share_the_multiplier(lam):
    # images under lam -> -lam, +-i lam carry the same multiplier, the
    # conjugate image its conjugate
    assume(abs(lam) > 1e-3)
    cyc = _cycle_or_reject(lam)
    for mu, rot in ((-lam, -1), (1j * lam, -1j), (-1j * lam, 1j)):
        c2 = refine_cycle(mu, [rot * z for z in cyc.points], cyc.period)
        assert abs(c2.multiplier - cyc.multiplier) <= 1e-9
    c3 = refine_cycle(lam.conjugate(), [z.conjugate() for z in cyc.points], cyc.period)
    assert abs(c3.multiplier - cyc.multiplier.conjugate()) <= 1e-9
