from quadlab.geo.greatcircle import EARTH_RADIUS_M, course_to, distance_between, heading_error

__all__ = ["EARTH_RADIUS_M", "distance_between", "course_to", "heading_error"]
