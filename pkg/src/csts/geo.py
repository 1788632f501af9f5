"""Distance metrics between event instances and timestamp normalization.

Planar mode treats (x, y) as meters and uses the Euclidean distance;
geodesic mode treats (x, y) as (longitude, latitude) in degrees and uses the
haversine great-circle distance. Both return meters.
"""

from __future__ import annotations

import math
from datetime import datetime
from typing import Callable

from .model import EventInstance, METRIC_EUCLIDEAN, METRIC_GEODESIC

DEFAULT_EARTH_RADIUS_KM = 6371.0


def euclidean_distance(a: EventInstance, b: EventInstance) -> float:
    """Planar distance in meters: sqrt((ax-bx)^2 + (ay-by)^2)."""
    return math.hypot(a.x - b.x, a.y - b.y)


def haversine_meters(lon1: float, lat1: float, lon2: float, lat2: float,
                     earth_radius_km: float = DEFAULT_EARTH_RADIUS_KM) -> float:
    """Great-circle distance in meters between two degree coordinates.

    Uses the half-angle (haversine) form:
    2 * radius_m * asin(sqrt(sin^2(dlat/2) + sin^2(dlon/2) * cos(lat1) * cos(lat2)))

    Raises ValueError for coordinates outside [-180, 180] x [-90, 90].
    """
    if not (-180.0 <= lon1 <= 180.0 and -180.0 <= lon2 <= 180.0):
        raise ValueError("longitude out of range [-180, 180]")
    if not (-90.0 <= lat1 <= 90.0 and -90.0 <= lat2 <= 90.0):
        raise ValueError("latitude out of range [-90, 90]")
    rlat1 = math.radians(lat1)
    rlat2 = math.radians(lat2)
    d_slat = math.sin(math.radians(lat2 - lat1) / 2.0)
    d_slon = math.sin(math.radians(lon2 - lon1) / 2.0)
    a = d_slat * d_slat + d_slon * d_slon * math.cos(rlat1) * math.cos(rlat2)
    # Clamp the radicand: rounding can push it a hair above 1 for antipodes.
    return 2.0 * earth_radius_km * 1000.0 * math.asin(min(1.0, math.sqrt(a)))


def geodesic_distance(a: EventInstance, b: EventInstance,
                      earth_radius_km: float = DEFAULT_EARTH_RADIUS_KM) -> float:
    """Haversine distance in meters; x is longitude, y is latitude."""
    return haversine_meters(a.x, a.y, b.x, b.y, earth_radius_km)


def distance_function(metric: str, earth_radius_km: float = DEFAULT_EARTH_RADIUS_KM,
                      ) -> Callable[[EventInstance, EventInstance], float]:
    """Pick the pairwise distance callable for a metric name."""
    if metric == METRIC_EUCLIDEAN:
        return euclidean_distance
    if metric == METRIC_GEODESIC:
        return lambda a, b: geodesic_distance(a, b, earth_radius_km)
    raise ValueError(f"unknown metric {metric!r}")


def timestamp_to_minutes(t: datetime, epoch: datetime) -> int:
    """Whole minutes elapsed from epoch to t, truncating seconds toward zero.

    Raises ValueError when t precedes the epoch (callers reject such rows).
    """
    delta = t - epoch
    seconds = delta.total_seconds()
    if seconds < 0:
        raise ValueError(f"timestamp {t.isoformat()} precedes epoch {epoch.isoformat()}")
    return int(seconds // 60)
