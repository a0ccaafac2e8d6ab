"""Flat-torus geometry: wrap-around distance and disc/annulus membership.

All positions live on the square [0, L)^2 with opposite edges identified,
so the distance between two points is the Euclidean length of the shortest
wrapped displacement.  Everything here is a pure function of its arguments
and accepts scalars or numpy arrays of points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Torus", "wrap_coords", "torus_distance", "in_disc", "in_annulus"]


def wrap_coords(L: float, xy):
    """Normalise coordinates into [0, L). Accepts (..., 2) arrays."""
    return np.mod(np.asarray(xy, dtype=np.float64), L)


def _axis_delta(L: float, a, b):
    d = np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64))
    return np.minimum(d, L - d)


def torus_distance(L: float, p, q):
    """Wrapped Euclidean distance between points p and q on [0, L)^2.

    p and q are array-likes whose last axis holds (x, y); broadcasting
    works as usual, so one of them may be a single point.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    dx = _axis_delta(L, p[..., 0], q[..., 0])
    dy = _axis_delta(L, p[..., 1], q[..., 1])
    return np.hypot(dx, dy)


def in_disc(L: float, centre, radius: float, y):
    """True iff y lies within (closed) distance `radius` of `centre`."""
    if radius < 0:
        raise ValueError("disc radius must be >= 0")
    return torus_distance(L, centre, y) <= radius


def in_annulus(L: float, t, r: float, y):
    """Membership in the target annulus around t at scale r.

    The annulus is the disc of radius r/2 minus the disc of radius r/4;
    the outer boundary is included and the inner one excluded, so a hop
    landing exactly on the outer rim still triggers a radius halving.
    """
    if r <= 0:
        raise ValueError("annulus scale r must be > 0")
    d = torus_distance(L, t, y)
    return (d > r / 4) & (d <= r / 2)


@dataclass(frozen=True)
class Torus:
    """The square [0, L)^2 with opposite edges identified."""

    L: float

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("torus side length must be positive")

    @property
    def max_distance(self) -> float:
        """Largest attainable point-to-point distance, L/sqrt(2)."""
        return self.L / np.sqrt(2.0)

    def wrap(self, xy):
        return wrap_coords(self.L, xy)

    def distance(self, p, q):
        return torus_distance(self.L, p, q)

    def in_disc(self, centre, radius: float, y):
        return in_disc(self.L, centre, radius, y)

    def in_annulus(self, t, r: float, y):
        return in_annulus(self.L, t, r, y)
