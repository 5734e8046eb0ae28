# quadlab/geo/greatcircle.py
"""Waypoint geometry on a spherical earth. Angles in degrees, distances in meters."""
from __future__ import annotations

import math

from quadlab.common.errors import DegenerateBearing

EARTH_RADIUS_M = 6372795.0
# central angles closer than this to 0 or pi have no defined bearing
_DEGENERATE_RAD = 1e-12


def _check(lat: float, lon: float) -> None:
    if not -90.0 <= lat <= 90.0 or not -180.0 <= lon <= 180.0:
        raise ValueError(f"({lat}, {lon}) is not a valid latitude/longitude in degrees")


def central_angle(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Haversine central angle (rad)."""
    for lat, lon in ((lat1, lon1), (lat2, lon2)):
        _check(lat, lon)
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dlat = p2 - p1
    dlon = math.radians(lon2 - lon1)
    h = math.sin(dlat / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dlon / 2) ** 2
    return 2.0 * math.asin(min(1.0, math.sqrt(h)))


def distance_between(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    return EARTH_RADIUS_M * central_angle(lat1, lon1, lat2, lon2)


def course_to(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """
    Initial great-circle bearing from point 1 to point 2 in [0, 360), North = 0, East = 90.

    Raises:
        DegenerateBearing: the points coincide or are antipodal.
    """
    c = central_angle(lat1, lon1, lat2, lon2)
    if c < _DEGENERATE_RAD or math.pi - c < 1e-9:
        raise DegenerateBearing(f"no unique bearing from ({lat1}, {lon1}) to ({lat2}, {lon2})")
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dlon = math.radians(lon2 - lon1)
    y = math.sin(dlon) * math.cos(p2)
    x = math.cos(p1) * math.sin(p2) - math.sin(p1) * math.cos(p2) * math.cos(dlon)
    course = math.degrees(math.atan2(y, x)) % 360.0
    # float modulo of a tiny negative angle rounds up to 360.0
    return course if course < 360.0 else 0.0


def heading_error(course: float, compass_heading: float) -> float:
    """Turn needed from the compass heading onto the course, in (-180, 180]; positive = clockwise."""
    diff = (course - compass_heading) % 360.0
    return diff - 360.0 if diff > 180.0 else diff
