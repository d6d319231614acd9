"""Glue between simulated event logs and the statistics and tracking code."""

import math

import numpy as np

from . import stats
from .interference import InterferenceStage
from .worldline import Trajectory, make_cloud

# seconds; one vehicle pair's encounter (a beam crossing at road speed) stays one episode
DEFAULT_EPISODE_GAP = 10.0


def decision_events(log):
    return log.select(log.mask(InterferenceStage.DECISION))


def pair_episodes(log, max_gap=DEFAULT_EPISODE_GAP):
    """Decision-stage episodes per unordered vehicle pair.

    Mutual interference between two radars is one encounter, so both
    directions of a pair share an episode.
    """
    d = decision_events(log)
    v, j = d["victim_id"], d["interferer_id"]
    return stats.find_episodes(d["time_s"], np.minimum(v, j), np.maximum(v, j), max_gap)


def interfered_vehicles(log, stage=InterferenceStage.DECISION):
    """Ids of vehicles that were victims of at least one event at ``stage``."""
    return set(int(x) for x in np.unique(log["victim_id"][log.mask(stage)]))


def impulse_intervals(log):
    """Per-victim gaps between successive Decision-stage interfered pulses."""
    d = decision_events(log)
    return stats.per_victim_intervals(d["time_s"], d["victim_id"])


def analyze_log(log, alpha=0.05, seed=0, mc_reps=1000, episode_gap=DEFAULT_EPISODE_GAP, n_bins=30):
    """Histograms, ECDF summaries and exponential fits for one event log."""
    out = {
        "config_hash": log.config_hash,
        "seed": log.seed,
        "n_events": len(log),
        "stage_counts": {str(s): int(log.mask(s).sum()) for s in InterferenceStage},
        "interfered_vehicles": len(interfered_vehicles(log)),
    }
    if len(log):
        hist, _ = stats.empirical_distribution(log["amplitude_dBW"], n_bins)
        k = int(np.argmax(hist.counts))
        out["amplitude_dBW"] = {"histogram": hist.to_dict(),
                                "mode": 0.5 * float(hist.edges[k] + hist.edges[k + 1])}
    ep = pair_episodes(log, episode_gap)
    out["episodes"] = int(ep.start.size)
    for name, sample in (("intervals", stats.start_intervals(ep)), ("durations", ep.durations[ep.durations > 0])):
        entry = {"summary": stats.tail_summary(sample)}
        if sample.size:
            hist, ecdf = stats.empirical_distribution(sample, n_bins)
            entry["histogram"] = hist.to_dict()
            step = max(1, ecdf.shape[0] // 200)
            entry["ecdf"] = ecdf[::step].tolist()
        if sample.size >= 10:
            rate, res = stats.exponential_fit_test(sample, alpha, mc_reps, seed)
            entry["exponential_fit"] = {"rate": rate, **res.to_dict()}
        out[name] = entry
    return out


def truth_trajectories(traj):
    """Per-vehicle :class:`~radarnet.worldline.Trajectory` objects."""
    out = []
    for vid in np.unique(traj.vehicle_id):
        t, pos, _ = traj.for_vehicle(vid)
        out.append(Trajectory(int(vid), t, pos))
    return out


def clouds_from_log(log, traj, n_elements, bin_dt=1.0, stages=None):
    """One uncertainty cloud per (victim, interferer, time bin) of logged events.

    The bearing interval is the reported bearing widened by one half
    beamwidth (``1 / N`` rad) on each side; the distance interval is the
    union of the per-event intervals.  The observer pose is the victim's
    pose at the middle of the cloud's time interval.
    """
    mask = np.ones(len(log), dtype=bool)
    if stages is not None:
        mask = np.zeros(len(log), dtype=bool)
        for s in stages:
            mask |= log.mask(s)
    t = log["time_s"][mask]
    v = log["victim_id"][mask]
    j = log["interferer_id"][mask]
    b = log["bearing_rad"][mask]
    lo = log["dist_lo_m"][mask]
    hi = log["dist_hi_m"][mask]
    if t.size == 0:
        return []
    bins = np.floor(t / bin_dt).astype(np.int64)
    order = np.lexsort((t, j, v, bins))
    keys = np.column_stack((bins, v, j))[order]
    new = np.ones(order.size, dtype=bool)
    new[1:] = np.any(keys[1:] != keys[:-1], axis=1)
    starts = np.flatnonzero(new)
    ends = np.append(starts[1:], order.size)
    half = 1.0 / n_elements
    poses = {}
    clouds = []
    for cid, (s, e) in enumerate(zip(starts, ends)):
        idx = order[s:e]
        t0, t1 = float(t[idx].min()), float(t[idx].max())
        vid = int(v[idx[0]])
        if vid not in poses:
            poses[vid] = traj.for_vehicle(vid)
        times, pos, heading = poses[vid]
        tm = 0.5 * (t0 + t1)
        pose = (float(np.interp(tm, times, pos[:, 0])), float(np.interp(tm, times, pos[:, 1])),
                float(heading[0]))
        omega = (float(b[idx].min()) - half, float(b[idx].max()) + half)
        dist = (float(lo[idx].min()), float(hi[idx].max()))
        clouds.append(make_cloud((omega, dist, (t0, t1)), pose, cid))
    return clouds


def cloud_sources(log, bin_dt=1.0):
    """Interferer id behind each cloud of :func:`clouds_from_log` (same ordering)."""
    t, v, j = log["time_s"], log["victim_id"], log["interferer_id"]
    if t.size == 0:
        return []
    bins = np.floor(t / bin_dt).astype(np.int64)
    order = np.lexsort((t, j, v, bins))
    keys = np.column_stack((bins, v, j))[order]
    new = np.ones(order.size, dtype=bool)
    new[1:] = np.any(keys[1:] != keys[:-1], axis=1)
    return [int(j[order[s]]) for s in np.flatnonzero(new)]


def default_v_max(speed_limit):
    return 1.5 * speed_limit


def finite_or_none(x):
    return x if isinstance(x, (int, np.integer)) or (isinstance(x, float) and math.isfinite(x)) else None
