import math

import pytest

from quadlab.common.errors import DegenerateBearing
from quadlab.geo import EARTH_RADIUS_M, course_to, distance_between, heading_error


def test_one_degree_of_longitude_on_the_equator():
    assert distance_between(0.0, 0.0, 0.0, 1.0) == pytest.approx(111226.0, abs=1.0)
    assert distance_between(0.0, 0.0, 0.0, 1.0) == pytest.approx(EARTH_RADIUS_M * math.pi / 180.0)


def test_distance_is_symmetric_and_zero_for_same_point():
    a = (48.1, 11.5)
    b = (52.5, 13.4)
    assert distance_between(*a, *b) == pytest.approx(distance_between(*b, *a))
    assert distance_between(*a, *a) == 0.0


def test_quarter_meridian():
    assert distance_between(0.0, 0.0, 90.0, 0.0) == pytest.approx(EARTH_RADIUS_M * math.pi / 2)


@pytest.mark.parametrize("lat2, lon2, expected", [(0.0, 1.0, 90.0), (1.0, 0.0, 0.0), (0.0, -1.0, 270.0),
                                                   (-1.0, 0.0, 180.0)])
def test_course_compass_points(lat2, lon2, expected):
    assert course_to(0.0, 0.0, lat2, lon2) == pytest.approx(expected, abs=1e-9)


def test_course_in_range():
    c = course_to(10.0, 170.0, -10.0, -170.0)
    assert 0.0 <= c < 360.0


def test_identical_points_have_no_bearing():
    with pytest.raises(DegenerateBearing):
        course_to(12.0, 34.0, 12.0, 34.0)


def test_antipodes_have_no_bearing():
    with pytest.raises(DegenerateBearing):
        course_to(0.0, 0.0, 0.0, 180.0)


@pytest.mark.parametrize("course, heading, expected", [(10.0, 350.0, 20.0), (350.0, 10.0, -20.0),
                                                       (90.0, 90.0, 0.0), (180.0, 0.0, 180.0)])
def test_heading_error_wraps(course, heading, expected):
    assert heading_error(course, heading) == pytest.approx(expected)


def test_invalid_coordinates():
    with pytest.raises(ValueError):
        distance_between(91.0, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        course_to(0.0, 0.0, 0.0, 181.0)


def test_course_just_west_of_north_stays_below_360():
    c = course_to(0.0, 0.0, 10.0, -1e-15)
    assert 0.0 <= c < 360.0
    assert c == pytest.approx(0.0, abs=1e-9) or c == pytest.approx(360.0, abs=1e-9)
