"""Uniformly sampled state trajectories and their region segmentation.

A trajectory visits a sequence of activation regions; the boundaries
between consecutive visits are hyperplane crossings. Sampling can lump
several crossings into one step, so each multi-bit transition is refined:
the zero of every flipped unit's affine value is interpolated between the
two samples, and if the estimated crossing times are mutually separated
the event is split into single-unit crossings (with empty intermediate
visits). Only transitions whose refined times genuinely cluster remain
degenerate-border events.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import SignVector

# snapping tolerance (in samples) when aligning window edges to the grid
GRID_SNAP = 1e-9


class WindowRangeError(ValueError):
    """Requested time window is not covered by the trajectory."""


class TrajectoryFormatError(ValueError):
    """Trajectory CSV malformed or not uniformly sampled."""


@dataclass(frozen=True)
class Trajectory:
    """Uniform samples x_k at times t0 + k*ts."""

    ts: float
    t0: float
    samples: np.ndarray  # (K, n)

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"samples must be 2-D (K, n), got {arr.shape}")
        if arr.shape[0] < 2:
            raise ValueError("a trajectory needs at least 2 samples")
        if not self.ts > 0.0:
            raise ValueError(f"timestep must be > 0, got {self.ts}")
        if not np.isfinite(arr).all():
            raise ValueError("trajectory samples must be finite")
        object.__setattr__(self, "samples", arr)

    def __len__(self):
        return self.samples.shape[0]

    @property
    def n(self):
        return self.samples.shape[1]

    @property
    def t_end(self):
        return self.t0 + (len(self) - 1) * self.ts

    @property
    def span(self):
        return (len(self) - 1) * self.ts

    def times(self):
        return self.t0 + self.ts * np.arange(len(self))

    def max_norm(self):
        """Largest sample 2-norm; finite by construction (compact support)."""
        return float(np.linalg.norm(self.samples, axis=1).max())


def window(traj, tau, duration):
    """Sub-trajectory covering [tau, tau+duration], edges snapped outward.

    The requested window must lie within the sampled span up to half a
    sample of slack at either end. The result shares the sample buffer.
    """
    if duration <= 0.0:
        raise WindowRangeError(f"window duration must be > 0, got {duration}")
    rel0 = (tau - traj.t0) / traj.ts
    rel1 = (tau + duration - traj.t0) / traj.ts
    last = len(traj) - 1
    if rel0 < -0.5 - GRID_SNAP or rel1 > last + 0.5 + GRID_SNAP:
        raise WindowRangeError(
            f"window [{tau}, {tau + duration}] outside trajectory span "
            f"[{traj.t0}, {traj.t_end}]"
        )
    i0 = max(0, math.floor(rel0 + GRID_SNAP))
    i1 = min(last, math.ceil(rel1 - GRID_SNAP))
    if i1 - i0 < 1:
        raise WindowRangeError("window covers fewer than 2 samples")
    return Trajectory(
        ts=traj.ts, t0=traj.t0 + i0 * traj.ts, samples=traj.samples[i0 : i1 + 1]
    )


@dataclass
class CrossingEvent:
    """One border crossing between consecutive visits."""

    sample_index: int  # first sample at or after the crossing
    flipped: tuple  # 1-based unit indices whose bit changed
    degenerate: bool
    refined_times: dict  # unit -> interpolated crossing time

    def time(self):
        """Earliest refined crossing time of the event."""
        return min(self.refined_times.values())


@dataclass
class Visit:
    """Maximal run of samples sharing a sign vector.

    Half-open sample range [start, stop); implied visits created when a
    multi-bit step is split have start == stop (no sample landed inside).
    """

    sign: SignVector
    start: int
    stop: int

    @property
    def num_samples(self):
        return self.stop - self.start


@dataclass
class Segmentation:
    """Ordered visits and the crossings between them."""

    visits: list = field(default_factory=list)
    crossings: list = field(default_factory=list)

    @property
    def region_count(self):
        return len(self.visits)

    def crossed_units(self):
        """Union of flipped units over all crossings (1-based)."""
        out = set()
        for ev in self.crossings:
            out.update(ev.flipped)
        return out

    def degenerate_events(self):
        return [ev for ev in self.crossings if ev.degenerate]


def sign_bits(traj, arr, boundary_tol=0.0):
    """Boolean activity matrix (K, N) for every sample of a trajectory."""
    return arr.affine_values(traj.samples) > boundary_tol


def segment(traj, arr, time_sep_tol=None, bits=None):
    """Decompose a trajectory into region visits and border crossings.

    time_sep_tol is the minimum separation between interpolated crossing
    times for a multi-bit sample step to be split into individual
    nondegenerate crossings; it defaults to ts/10. Precomputed sign bits
    can be passed to avoid re-classifying shared samples.
    """
    if time_sep_tol is None:
        time_sep_tol = traj.ts / 10.0
    vals = arr.affine_values(traj.samples)
    if bits is None:
        bits = vals > 0.0
    changed_steps = np.nonzero((bits[1:] != bits[:-1]).any(axis=1))[0]

    seg = Segmentation()
    start = 0
    for k in changed_steps:
        flips = np.nonzero(bits[k] != bits[k + 1])[0]
        t_k = traj.t0 + k * traj.ts
        times = {}
        for i in flips:
            g0 = vals[k, i]
            g1 = vals[k + 1, i]
            times[int(i) + 1] = t_k + traj.ts * (g0 / (g0 - g1))
        seg.visits.append(Visit(SignVector(tuple(bits[k])), start, k + 1))
        if len(flips) == 1:
            unit = int(flips[0]) + 1
            seg.crossings.append(
                CrossingEvent(int(k) + 1, (unit,), False, times)
            )
        else:
            ordered = sorted(times.items(), key=lambda item: (item[1], item[0]))
            gaps = [
                ordered[j + 1][1] - ordered[j][1] for j in range(len(ordered) - 1)
            ]
            if all(g > time_sep_tol for g in gaps):
                # separated sub-sample crossings: split into single flips,
                # inserting empty implied visits between them
                cur = SignVector(tuple(bits[k]))
                for j, (unit, t_unit) in enumerate(ordered):
                    seg.crossings.append(
                        CrossingEvent(int(k) + 1, (unit,), False, {unit: t_unit})
                    )
                    cur = cur.flipped(unit)
                    if j < len(ordered) - 1:
                        seg.visits.append(Visit(cur, k + 1, k + 1))
            else:
                flipped = tuple(int(i) + 1 for i in flips)
                seg.crossings.append(
                    CrossingEvent(int(k) + 1, flipped, True, times)
                )
        start = k + 1
    seg.visits.append(Visit(SignVector(tuple(bits[-1])), start, len(traj)))
    return seg


def save_trajectory_csv(traj, path):
    """Write `t,x1,...,xn` rows; floats keep full round-trip precision."""
    times = traj.times()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"x{i + 1}" for i in range(traj.n)])
        for k in range(len(traj)):
            writer.writerow(
                [repr(float(times[k]))]
                + [repr(float(v)) for v in traj.samples[k]]
            )


def load_trajectory_csv(path, n=None):
    """Read a trajectory CSV; extra columns beyond x-n are ignored.

    The header must start with t,x1,...; the time column must be uniformly
    spaced within 1e-9 * ts.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0].strip() != "t":
            raise TrajectoryFormatError(f"{path}: first column must be 't'")
        if n is None:
            n = 0
            while n + 1 < len(header) and header[n + 1].strip() == f"x{n + 1}":
                n += 1
        if n < 1 or len(header) < n + 1:
            raise TrajectoryFormatError(
                f"{path}: header must read t,x1,...,xn (got {header[:4]}...)"
            )
        for i in range(n):
            if header[i + 1].strip() != f"x{i + 1}":
                raise TrajectoryFormatError(
                    f"{path}: expected column x{i + 1}, got {header[i + 1]!r}"
                )
        times = []
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                times.append(float(row[0]))
                rows.append([float(v) for v in row[1 : n + 1]])
            except (ValueError, IndexError) as exc:
                raise TrajectoryFormatError(
                    f"{path}:{lineno}: bad row: {exc}"
                ) from exc
    if len(rows) < 2:
        raise TrajectoryFormatError(f"{path}: need at least 2 samples")
    t = np.asarray(times)
    # first difference, not the mean spacing: it reproduces the writer's
    # timestep bit-for-bit, keeping reports identical across a CSV round trip
    ts = t[1] - t[0]
    if ts <= 0.0:
        raise TrajectoryFormatError(f"{path}: time column must increase")
    dev = np.abs(np.diff(t) - ts).max()
    if dev > 1e-9 * ts:
        raise TrajectoryFormatError(
            f"{path}: time spacing varies by {dev:.3e}, not uniform"
        )
    return Trajectory(ts=float(ts), t0=float(t[0]), samples=np.asarray(rows))
