import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rdperiods import local_model as lm
from rdperiods.local_model import StratumKind

orders = st.integers(min_value=1, max_value=8)
angles = st.floats(min_value=-20, max_value=20, allow_nan=False)
units = st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False, allow_infinity=False)


def test_make_model_valid():
    m = lm.make_model(1, 2, 1)
    assert (m.m1, m.m2, m.u0) == (1, 2, 1 + 0j)


@pytest.mark.parametrize("args, exc", [((0, 0, 1), lm.NotIrregular), ((1, -2, 1), lm.NotGood), ((1, 1, 0), lm.ZeroUnit)])
def test_make_model_rejects(args, exc):
    with pytest.raises(exc):
        lm.make_model(*args)


def test_stokes_examples():
    assert lm.stokes_contains(lm.make_model(1, 0), math.pi, 0.3)
    assert not lm.stokes_contains(lm.make_model(1, 0), 0.0, 0.3)
    assert lm.stokes_contains(lm.make_model(1, 1), math.pi / 2, math.pi / 2)


def test_boundary_directions_are_excluded():
    # phase exactly pi/2 and 3pi/2
    m = lm.make_model(1, 0)
    assert not lm.stokes_contains(m, -math.pi / 2, 0)
    assert not lm.stokes_contains(m, -3 * math.pi / 2, 0)


@given(orders, orders, angles, angles, st.integers(-3, 3), st.integers(-3, 3))
def test_stokes_periodic(m1, m2, t1, t2, n1, n2):
    m = lm.make_model(m1, m2)
    a = lm.stokes_contains(m, t1, t2)
    b = lm.stokes_contains(m, t1 + 2 * math.pi * n1, t2 + 2 * math.pi * n2)
    ph = (-m1 * t1 - m2 * t2) % (2 * math.pi)
    if abs(math.cos(ph)) > 1e-6:  # away from the walls rounding cannot flip it
        assert a == b


@given(orders, orders, angles, angles, st.floats(-3, 3))
def test_stokes_phase_shift(m1, m2, t1, t2, s):
    """Rotating u0 by m1*s matches shifting theta1 by s."""
    m = lm.make_model(m1, m2, 1)
    rotated = lm.make_model(m1, m2, cmath.exp(1j * m1 * s))
    if abs(math.cos(-m1 * t1 - m2 * t2)) > 1e-6:
        assert lm.stokes_contains(m, t1, t2) == lm.stokes_contains(rotated, t1 + s, t2)


@pytest.mark.parametrize("m1, m2, u0", [(1, 1, 1), (2, 5, 1j), (3, 0, -1), (0, 4, 2 + 1j)])
def test_stokes_half_measure(m1, m2, u0):
    rng = np.random.default_rng(1234)
    m = lm.make_model(m1, m2, u0)
    n = 20000
    th = rng.uniform(0, 2 * math.pi, size=(n, 2))
    frac = sum(lm.stokes_contains(m, a, b) for a, b in th) / n
    assert abs(frac - 0.5) <= 3 * math.sqrt(0.25 / n)


@pytest.mark.parametrize("m1, m2, u0, samples, expected", [
    (2, 3, 1, 512, 1),
    (4, 6, 1, 512, 2),
    (3, 3, cmath.exp(1j * math.pi / 4), 256, 3),
])
def test_component_count_examples(m1, m2, u0, samples, expected):
    assert lm.stokes_component_count(lm.make_model(m1, m2, u0), samples) == expected


def test_component_count_needs_resolution():
    with pytest.raises(lm.ResolutionTooCoarse):
        lm.stokes_component_count(lm.make_model(4, 4), 16)


def test_torus_wraparound():
    # a band touching both seams is one component
    mask = np.zeros((8, 8), dtype=bool)
    mask[:, 0] = mask[:, 7] = True
    assert lm.count_torus_components(mask) == 1
    mask = np.zeros((8, 8), dtype=bool)
    mask[2, :] = mask[5, :] = True
    assert lm.count_torus_components(mask) == 2


@pytest.mark.parametrize("model, stratum, rd, dr", [
    ((2, 2), StratumKind.CROSSING, {2: 2, 3: 2}, {0: 2, 1: 2}),
    ((4, 6), StratumKind.CROSSING, {2: 2, 3: 2}, {0: 2, 1: 2}),
    ((3, 0), StratumKind.SMOOTH, {1: 3}, {0: 3}),
    ((1, 0), StratumKind.SMOOTH, {1: 1}, {0: 1}),
    ((5, 0), StratumKind.COMPONENT, {1: 5, 2: 5}, {0: 5, 1: 5}),
    ((2, 2), StratumKind.COMPONENT, {1: 2, 2: 2}, {0: 2, 1: 2}),
])
def test_dimension_tables(model, stratum, rd, dr):
    m = lm.make_model(*model)
    assert lm.rd_dimensions(m, stratum) == rd
    assert lm.dr_dimensions(m, stratum) == dr


def test_smooth_needs_m2_zero():
    with pytest.raises(lm.InvalidStratum):
        lm.rd_dimensions(lm.make_model(1, 1), StratumKind.SMOOTH)
    with pytest.raises(lm.InvalidStratum):
        lm.dr_dimensions(lm.make_model(1, 1), "smooth")


def test_stratum_parse():
    assert StratumKind.parse("CrossingPoint") is StratumKind.CROSSING
    assert StratumKind.parse("component_at_crossing") is StratumKind.COMPONENT
    with pytest.raises(lm.InvalidStratum):
        StratumKind.parse("corner")


@pytest.mark.parametrize("model, stratum", [((2, 3), "crossing"), ((4, 0), "smooth"), ((6, 4), "component")])
def test_duality_examples(model, stratum):
    assert lm.duality_check(lm.make_model(*model), stratum)


@given(st.integers(0, 12), st.integers(0, 12), units, st.sampled_from(list(StratumKind)))
def test_duality_always_holds_and_ignores_u0(m1, m2, u0, stratum):
    if m1 + m2 == 0 or abs(u0) == 0:
        return
    m = lm.make_model(m1, m2, u0)
    try:
        rd = lm.rd_dimensions(m, stratum)
    except lm.InvalidStratum:
        return
    assert lm.duality_check(m, stratum)
    base = lm.make_model(m1, m2, 1)
    assert rd == lm.rd_dimensions(base, stratum)
    assert lm.dr_dimensions(m, stratum) == lm.dr_dimensions(base, stratum)


def test_gcd0():
    assert lm.gcd0(0, 5) == 5 and lm.gcd0(4, 6) == 2


def test_json():
    m = lm.make_model(2, 3, 1j)
    assert m.to_json() == {"m1": 2, "m2": 3, "u0_re": 0.0, "u0_im": 1.0}
    assert lm.table_json({3: 1, 2: 1}) == {"2": 1, "3": 1}
