"""Disk-intersection feasible areas: membership, projection, centroid.

Every cluster's feasible stop region is the intersection of the member
space windows (closed disks), hence convex. All operations here are pure
and deterministic.
"""

import logging
import math

import numpy as np

from .model import EPS_GEOM, SpaceWindow, dist

log = logging.getLogger("swroute.geometry")

#: fixed sampling grid (per axis) for the centroid estimate
CENTROID_GRID = 256

_MAX_SWEEPS = 5000


def _project_disk(point, window):
    """Closed-form Euclidean projection onto one disk."""
    dx = point[0] - window.center[0]
    dy = point[1] - window.center[1]
    d = math.hypot(dx, dy)
    if d <= window.radius or d == 0.0:
        return point
    s = window.radius / d
    return (window.center[0] + dx * s, window.center[1] + dy * s)


def max_violation(point, windows):
    """Largest distance by which the point leaves any member disk."""
    return max(dist(point, w.center) - w.radius for w in windows)


def project_onto_windows(point, windows, tol=EPS_GEOM):
    """Nearest point of the disk intersection, by Dykstra's algorithm.

    Plain cyclic projection only finds *some* feasible point; Dykstra's
    correction terms make the limit the true nearest point, which the
    placement solver relies on. Single disks are handled in closed form.
    """
    if len(windows) == 1:
        return _project_disk(point, windows[0])
    x = point
    increments = [(0.0, 0.0)] * len(windows)
    for _ in range(_MAX_SWEEPS):
        moved = 0.0
        for i, w in enumerate(windows):
            yx, yy = increments[i]
            px, py = x[0] - yx, x[1] - yy
            nx = _project_disk((px, py), w)
            increments[i] = (nx[0] - px, nx[1] - py)
            moved = max(moved, dist(nx, x))
            x = nx
        if moved < tol * 1e-3 or moved < 1e-14:
            break
    return x


def area_nonempty(windows, tol=EPS_GEOM):
    """True iff all disks share a common point (within tolerance).

    Decided by driving a candidate point into the intersection with cyclic
    projections and checking the residual violation.
    """
    if not windows:
        return False
    for i, a in enumerate(windows):
        for b in windows[i + 1:]:
            if dist(a.center, b.center) > a.radius + b.radius + tol:
                return False
    x = (
        sum(w.center[0] for w in windows) / len(windows),
        sum(w.center[1] for w in windows) / len(windows),
    )
    for _ in range(_MAX_SWEEPS):
        moved = 0.0
        for w in windows:
            nx = _project_disk(x, w)
            moved = max(moved, dist(nx, x))
            x = nx
        if max_violation(x, windows) <= tol:
            return True
        if moved < tol * 1e-3:
            break
    return max_violation(x, windows) <= tol


class Area:
    """Feasible stop region of one cluster: a certified-nonempty disk
    intersection with projection and centroid support."""

    def __init__(self, windows, tol=EPS_GEOM):
        if not windows:
            raise ValueError("area needs at least one space window")
        self.windows = tuple(windows)
        self.tol = tol
        if not area_nonempty(self.windows, tol):
            raise ValueError("empty intersection")
        self._centroid = None

    @classmethod
    def point(cls, xy):
        """Degenerate single-point area (depot, frozen pickup)."""
        return cls((SpaceWindow((float(xy[0]), float(xy[1])), 0.0),))

    @property
    def degenerate(self):
        return all(w.radius <= self.tol for w in self.windows)

    @property
    def tightest(self):
        return min(self.windows, key=lambda w: w.radius)

    def contains(self, point, tol=None):
        t = self.tol if tol is None else tol
        return max_violation(point, self.windows) <= t

    def project(self, point):
        if self.contains(point, tol=0.0):
            return (float(point[0]), float(point[1]))
        return project_onto_windows(point, self.windows, self.tol)

    def centroid(self):
        """Center of mass of the region, via a fixed deterministic grid.

        Samples a CENTROID_GRID^2 lattice over the tightest disk's bounding
        box and averages the points inside every disk. Sliver intersections
        that miss the lattice fall back to projecting the mean center.
        """
        if self._centroid is None:
            self._centroid = self._compute_centroid()
        return self._centroid

    def _compute_centroid(self):
        tight = self.tightest
        if tight.radius <= 0.0:
            return tight.center
        cx, cy = tight.center
        r = tight.radius
        axis = np.linspace(-r, r, CENTROID_GRID)
        gx, gy = np.meshgrid(cx + axis, cy + axis)
        inside = np.ones(gx.shape, dtype=bool)
        for w in self.windows:
            inside &= (gx - w.center[0]) ** 2 + (gy - w.center[1]) ** 2 <= w.radius**2
        if not inside.any():
            log.warning("sliver intersection: centroid falls back to projection")
            mean = (
                sum(w.center[0] for w in self.windows) / len(self.windows),
                sum(w.center[1] for w in self.windows) / len(self.windows),
            )
            return self.project(mean)
        return (float(gx[inside].mean()), float(gy[inside].mean()))


def project_onto_area(point, area):
    return area.project(point)


def area_centroid(area):
    return area.centroid()


def min_area_distance(area_a, area_b):
    """Lower bound on the distance between two disk intersections.

    Each area sits inside every one of its member disks, so the largest
    pairwise disk separation is a valid bound (0 when all pairs overlap).
    """
    best = 0.0
    for wa in area_a.windows:
        for wb in area_b.windows:
            gap = dist(wa.center, wb.center) - wa.radius - wb.radius
            if gap > best:
                best = gap
    return best


def scenario_areas(scenario):
    """Area per cluster id, index 0 = the start point (depot)."""
    from .model import cluster_windows

    areas = [Area.point(scenario.depot)]
    for cluster in scenario.pattern.clusters:
        areas.append(Area(cluster_windows(scenario, cluster), scenario.config.eps_geom))
    return areas
