import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pswg.geometry import Torus, in_annulus, in_disc, torus_distance, wrap_coords

L = 10.0
coord = st.floats(min_value=0.0, max_value=L, exclude_max=True,
                  allow_nan=False, allow_infinity=False)
point = st.tuples(coord, coord)


def test_distance_identity():
    assert torus_distance(L, (1.0, 1.0), (1.0, 1.0)) == 0.0


def test_distance_wraps_one_axis():
    assert torus_distance(L, (1.0, 1.0), (9.0, 1.0)) == pytest.approx(2.0)


def test_distance_wraps_both_axes():
    assert torus_distance(L, (0.5, 0.5), (9.5, 9.5)) == pytest.approx(math.sqrt(2.0))


def test_distance_vectorised():
    pts = np.array([[1.0, 1.0], [9.0, 1.0], [6.0, 1.0]])
    d = torus_distance(L, (1.0, 1.0), pts)
    assert np.allclose(d, [0.0, 2.0, 5.0])


def test_annulus_membership():
    t = (0.0, 0.0)
    assert in_annulus(L * 10, t, 8.0, (3.0, 0.0))          # 2 < 3 <= 4
    assert not in_annulus(L * 10, t, 8.0, (1.0, 0.0))      # inside inner disc
    assert in_annulus(L * 10, t, 8.0, (4.0, 0.0))          # outer boundary in
    assert not in_annulus(L * 10, t, 8.0, (2.0, 0.0))      # inner boundary out


def test_annulus_rejects_bad_radius():
    with pytest.raises(ValueError):
        in_annulus(L, (0.0, 0.0), 0.0, (1.0, 1.0))


def test_disc_membership():
    assert in_disc(100.0, (0.0, 0.0), 5.0, (3.0, 4.0))     # distance exactly 5
    assert in_disc(100.0, (0.0, 0.0), 0.0, (0.0, 0.0))
    assert not in_disc(10.0, (1.0, 1.0), 1.0, (9.5, 1.0))  # wrap distance 1.5


def test_disc_rejects_negative_radius():
    with pytest.raises(ValueError):
        in_disc(L, (0.0, 0.0), -1.0, (0.0, 0.0))


def test_torus_validates_side():
    with pytest.raises(ValueError):
        Torus(0.0)


def test_wrap_coords():
    assert np.allclose(wrap_coords(L, (12.5, -0.5)), (2.5, 9.5))


@given(p=point, q=point)
def test_distance_symmetric(p, q):
    assert torus_distance(L, p, q) == torus_distance(L, q, p)


@given(p=point, q=point)
def test_distance_bounded_by_half_diagonal(p, q):
    assert torus_distance(L, p, q) <= L / math.sqrt(2) + 1e-12


@given(p=point, q=point, s=point)
def test_triangle_inequality(p, q, s):
    dpq = torus_distance(L, p, q)
    dqs = torus_distance(L, q, s)
    dps = torus_distance(L, p, s)
    assert dpq + dqs >= dps - 1e-9


@settings(max_examples=200)
@given(p=point, q=point, shift=point)
def test_translation_invariance(p, q, shift):
    p2 = wrap_coords(L, np.add(p, shift))
    q2 = wrap_coords(L, np.add(q, shift))
    assert torus_distance(L, p, q) == pytest.approx(
        float(torus_distance(L, p2, q2)), abs=1e-9)


@given(t=point, y=point, r=st.floats(min_value=0.1, max_value=20.0))
def test_annulus_inside_outer_disc_outside_inner(t, y, r):
    if in_annulus(L, t, r, y):
        assert in_disc(L, t, r / 2, y)
        assert not in_disc(L, t, r / 4, y)
