"""Uncertainty clouds and greedy constant-velocity world-line clustering.

An interference report localizes its source to an annular sector (bearing
interval times distance interval) seen from the victim, during a time
interval.  A moving source traces a straight line in space-time; the
clusterer repeatedly picks the earliest unexplained cloud and keeps the
feasible line through it that passes through the most other clouds.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from sklearn.base import BaseEstimator

from ._validation import ParameterError, check_finite, check_interval, check_positive

DEGENERATE_PAD = 1e-6  # half-size in m of the box standing in for point/segment clouds
HIT_TOL = 1e-9


def _sector_outline(x, y, a_lo, a_hi, d_lo, d_hi):
    """Points whose convex hull contains the annular sector."""
    pts = []
    width = a_hi - a_lo
    n_pieces = max(1, math.ceil(width / (math.pi / 3)))
    edges = np.linspace(a_lo, a_hi, n_pieces + 1)
    for a in edges:
        pts.append((x + d_lo * math.cos(a), y + d_lo * math.sin(a)))
        pts.append((x + d_hi * math.cos(a), y + d_hi * math.sin(a)))
    if width > 0 and d_hi > 0:
        # tangents at the ends of each arc piece meet at d_hi / cos(half-width)
        for a0, a1 in zip(edges[:-1], edges[1:]):
            r = d_hi / math.cos(0.5 * (a1 - a0))
            mid = 0.5 * (a0 + a1)
            pts.append((x + r * math.cos(mid), y + r * math.sin(mid)))
    if width >= math.pi:
        pts.append((x, y))
    return np.array(pts)


def _hull(pts):
    """CCW hull vertices; degenerate sets become a small axis-aligned box."""
    try:
        hull = ConvexHull(pts)
        return pts[hull.vertices], False
    except (QhullError, ValueError):
        lo = pts.min(axis=0) - DEGENERATE_PAD
        hi = pts.max(axis=0) + DEGENERATE_PAD
        box = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
        return box, True


@dataclass(frozen=True)
class UncertaintyCloud:
    """Space-time region that contains the source of one interference report.

    Attributes:
        observer_pose: ``(x, y, heading)`` of the victim, m and rad.
        angle_interval: Bearing interval relative to the heading, rad.
        distance_interval: Distance interval from the observer, m.
        time_interval: Observation time interval, s.
        cloud_id: Identifier used for tie-breaking and membership.
    """

    observer_pose: tuple
    angle_interval: tuple
    distance_interval: tuple
    time_interval: tuple
    cloud_id: int = 0
    polygon: np.ndarray = field(init=False, repr=False, compare=False)
    degenerate: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x, y, heading = (check_finite(v, "observer_pose") for v in self.observer_pose)
        a = check_interval(self.angle_interval, "angle_interval")
        d = check_interval(self.distance_interval, "distance_interval", nonnegative=True)
        t = check_interval(self.time_interval, "time_interval")
        if a[1] - a[0] >= 2 * math.pi:
            a = (-math.pi, math.pi)
        for name, val in (("observer_pose", (x, y, heading)), ("angle_interval", a),
                          ("distance_interval", d), ("time_interval", t)):
            object.__setattr__(self, name, val)
        pts = _sector_outline(x, y, heading + a[0], heading + a[1], d[0], d[1])
        poly, degenerate = _hull(pts)
        object.__setattr__(self, "polygon", poly)
        object.__setattr__(self, "degenerate", degenerate)

    @property
    def center(self):
        """Sector point at the middle bearing and middle distance."""
        x, y, heading = self.observer_pose
        a = heading + 0.5 * (self.angle_interval[0] + self.angle_interval[1])
        r = 0.5 * (self.distance_interval[0] + self.distance_interval[1])
        return np.array([x + r * math.cos(a), y + r * math.sin(a)])

    @property
    def mid_time(self):
        return 0.5 * (self.time_interval[0] + self.time_interval[1])

    def halfplanes(self):
        """``(normals, offsets)`` with the polygon equal to ``normals @ p <= offsets``."""
        p = self.polygon
        e = np.roll(p, -1, axis=0) - p
        normals = np.column_stack((e[:, 1], -e[:, 0]))
        norms = np.hypot(normals[:, 0], normals[:, 1])
        normals = normals / norms[:, None]
        return normals, np.einsum("ij,ij->i", normals, p)

    def contains(self, points, tol=1e-7):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        n, c = self.halfplanes()
        return np.all(pts @ n.T <= c + tol, axis=1)

    def sample_sector(self, n, rng):
        """Uniform-by-area draws from the exact annular sector."""
        x, y, heading = self.observer_pose
        d0, d1 = self.distance_interval
        r = np.sqrt(rng.uniform(d0**2, d1**2, n))
        a = heading + rng.uniform(*self.angle_interval, n)
        return np.column_stack((x + r * np.cos(a), y + r * np.sin(a)))


def make_cloud(report, observer_pose, cloud_id=0):
    """Build an :class:`UncertaintyCloud` from an ``(angle, distance, time)`` interval report."""
    try:
        omega, dist, times = report
    except (TypeError, ValueError):
        raise ParameterError("report must be an (angle, distance, time) triple of intervals") from None
    return UncertaintyCloud(tuple(observer_pose), tuple(omega), tuple(dist), tuple(times), cloud_id)


@dataclass(frozen=True)
class WorldLine:
    """Constant-velocity track ``x(t) = anchor + velocity * (t - anchor_time)``."""

    anchor: tuple
    anchor_time: float
    velocity: tuple
    members: tuple
    member_times: tuple = ()

    def __post_init__(self):
        if not self.members:
            raise ParameterError("a world line needs at least one member")

    @property
    def speed(self):
        return math.hypot(*self.velocity)

    @property
    def angle(self):
        """Angle between the line and the space axes in a unit space-time chart."""
        return math.atan2(1.0, self.speed)

    def position(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(self.anchor) + np.multiply.outer(t - self.anchor_time, np.asarray(self.velocity))


class _CloudTable:
    """Padded half-plane arrays for vectorized line-vs-cloud tests."""

    def __init__(self, clouds):
        k = max(len(c.polygon) for c in clouds)
        n = len(clouds)
        self.normals = np.zeros((n, k, 2))
        self.offsets = np.ones((n, k))
        for i, c in enumerate(clouds):
            nm, off = c.halfplanes()
            self.normals[i, : len(off)] = nm
            self.offsets[i, : len(off)] = off
        self.t0 = np.array([c.time_interval[0] for c in clouds])
        self.t1 = np.array([c.time_interval[1] for c in clouds])
        self.centers = np.array([c.center for c in clouds])
        self.mid_times = np.array([c.mid_time for c in clouds])

    def hits(self, anchors, anchor_times, velocities, idx):
        """Boolean ``(n_lines, len(idx))`` intersection of lines with clouds ``idx``."""
        N = self.normals[idx]
        C = self.offsets[idx]
        t0, t1 = self.t0[idx], self.t1[idx]
        # segment start and direction for every (line, cloud)
        p0 = anchors[:, None, :] + velocities[:, None, :] * (t0[None, :, None] - anchor_times[:, None, None])
        d = velocities[:, None, :] * (t1 - t0)[None, :, None]
        num = C[None] - np.einsum("ckj,lcj->lck", N, p0)
        den = np.einsum("ckj,lcj->lck", N, d)
        tol = HIT_TOL * (1 + np.abs(C[None]))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = num / den
        upper = np.where(den > 0, ratio, np.inf).min(axis=2)
        lower = np.where(den < 0, ratio, -np.inf).max(axis=2)
        parallel_ok = np.all((den != 0) | (num >= -tol), axis=2)
        lo = np.maximum(lower, 0.0)
        hi = np.minimum(upper, 1.0)
        return parallel_ok & (lo <= hi + HIT_TOL)


def cluster_worldlines(clouds, v_m, chunk=256):
    """Greedy world-line clustering.

    Each round takes the earliest unassigned cloud (lowest time lower bound,
    then lowest id) and evaluates the lines through its center and every
    other unassigned cloud center, plus the zero-velocity line.  Lines
    faster than ``v_m`` are dropped; the line hitting the most unassigned
    clouds wins, ties going to the slower line and then the lower partner
    id.  Its hits are removed and the loop repeats.
    """
    v_m = check_positive(v_m, "v_m")
    clouds = list(clouds)
    if not clouds:
        return []
    ids = [c.cloud_id for c in clouds]
    if len(set(ids)) != len(ids):
        raise ParameterError("cloud ids must be unique")
    table = _CloudTable(clouds)
    ids = np.array(ids)
    remaining = np.ones(len(clouds), dtype=bool)
    lines = []
    while remaining.any():
        rem = np.flatnonzero(remaining)
        order = np.lexsort((ids[rem], table.t0[rem]))
        seed = rem[order[0]]
        others = rem[rem != seed]
        dt = table.mid_times[others] - table.mid_times[seed]
        dx = table.centers[others] - table.centers[seed]
        same_time = dt == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            vel = np.where(same_time[:, None], np.nan, dx / np.where(same_time, 1.0, dt)[:, None])
        speeds = np.hypot(vel[:, 0], vel[:, 1])
        ok = np.isfinite(speeds) & (speeds <= v_m)
        cand_vel = np.vstack((np.zeros((1, 2)), vel[ok]))
        cand_partner = np.concatenate(([-1], others[ok]))
        cand_speed = np.concatenate(([0.0], speeds[ok]))

        best = None
        anchor = table.centers[seed]
        t_anchor = table.mid_times[seed]
        for start in range(0, len(cand_vel), chunk):
            v = cand_vel[start:start + chunk]
            h = table.hits(np.repeat(anchor[None], len(v), 0), np.full(len(v), t_anchor), v, rem)
            h[:, np.searchsorted(rem, seed)] = True
            counts = h.sum(axis=1)
            for j in range(len(v)):
                partner_id = ids[cand_partner[start + j]] if cand_partner[start + j] >= 0 else -1
                key = (-counts[j], cand_speed[start + j], partner_id)
                if best is None or key < best[0]:
                    best = (key, v[j], rem[h[j]])
        _, v, members = best
        member_ids = tuple(int(i) for i in ids[members])
        lines.append(WorldLine(tuple(anchor.tolist()), float(t_anchor), tuple(map(float, v)),
                               member_ids, tuple(float(t) for t in table.mid_times[members])))
        remaining[members] = False
    return lines


class WorldLineClusterer(BaseEstimator):
    """Estimator wrapper: ``fit(clouds)`` sets ``lines_`` and per-cloud ``labels_``."""

    def __init__(self, v_m=20.0):
        self.v_m = v_m

    def fit(self, X, y=None):
        clouds = list(X)
        self.lines_ = cluster_worldlines(clouds, self.v_m)
        where = {cid: k for k, line in enumerate(self.lines_) for cid in line.members}
        self.labels_ = np.array([where[c.cloud_id] for c in clouds], dtype=int)
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_


class Trajectory(NamedTuple):
    """Sampled ground-truth positions of one vehicle."""

    vehicle_id: int
    times: np.ndarray
    positions: np.ndarray

    def at(self, t):
        """Linearly interpolated position, ``nan`` outside the sampled span."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.column_stack([np.interp(t, self.times, self.positions[:, k]) for k in range(2)])
        outside = (t < self.times[0]) | (t > self.times[-1])
        out[outside] = np.nan
        return out


class TrackErrors(NamedTuple):
    per_line_median: np.ndarray
    per_line_mean: np.ndarray
    pooled: np.ndarray

    @property
    def pooled_median(self):
        return float(np.median(self.pooled)) if self.pooled.size else math.nan


def evaluate_tracks(lines, truth):
    """Distance from each line, at its member times, to the nearest true vehicle."""
    lines, truth = list(lines), list(truth)
    if not lines or not truth:
        return TrackErrors(np.zeros(0), np.zeros(0), np.zeros(0))
    med, mean, pooled = [], [], []
    for line in lines:
        times = np.asarray(line.member_times, dtype=float)
        pos = line.position(times).reshape(-1, 2)
        dists = np.stack([np.hypot(*(tr.at(times) - pos).T) for tr in truth])
        err = np.nanmin(np.where(np.isnan(dists), np.inf, dists), axis=0)
        err = err[np.isfinite(err)]
        med.append(float(np.median(err)) if err.size else math.nan)
        mean.append(float(np.mean(err)) if err.size else math.nan)
        pooled.append(err)
    return TrackErrors(np.array(med), np.array(mean), np.concatenate(pooled))


CLOUD_COLUMNS = ("id", "obs_x", "obs_y", "heading", "ang_lo", "ang_hi", "d_lo", "d_hi", "t_lo", "t_hi")


def save_clouds(clouds, path):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(CLOUD_COLUMNS) + "\n")
        for c in clouds:
            vals = (*c.observer_pose, *c.angle_interval, *c.distance_interval, *c.time_interval)
            fh.write(f"{c.cloud_id}," + ",".join(repr(float(v)) for v in vals) + "\n")


def load_clouds(path):
    clouds = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != CLOUD_COLUMNS:
            raise ParameterError(f"unexpected cloud file header {header}")
        for line in fh:
            if not line.strip():
                continue
            f = line.strip().split(",")
            v = [float(x) for x in f[1:]]
            clouds.append(UncertaintyCloud(tuple(v[0:3]), tuple(v[3:5]), tuple(v[5:7]),
                                           tuple(v[7:9]), int(f[0])))
    return clouds
