"""Hyperplane-arrangement geometry over the state space.

An arrangement of N affine functionals w_i.x + b_i cuts R^n into at most
2^N convex activation regions. Each region is labelled by a sign vector
(one bit per unit: strictly positive side vs zero side, with values on the
hyperplane itself counted as the zero side). This module classifies
points, decides which sign vectors are actually realizable (with a strict
interior witness), enumerates the realizable regions, and classifies
transitions between regions as nondegenerate (one bit flips) or
degenerate.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

# box bound on witness coordinates: keeps the max-slack LP bounded on
# unbounded regions
WITNESS_BOX = 1e6

# minimum interior slack for a region to count as strictly feasible
MIN_SLACK = 1e-9

# relative tolerance for flagging two units as the same hyperplane
DUPLICATE_RTOL = 1e-9

MAX_UNITS_ENUMERATION = 24


class ArrangementError(ValueError):
    """Invalid arrangement data (zero weights, duplicate hyperplane, shapes)."""


class CapacityError(ValueError):
    """Region enumeration requested beyond the supported unit count."""


class FeasibilityNumericalError(RuntimeError):
    """The feasibility LP failed numerically (distinct from 'infeasible')."""


@dataclass(frozen=True)
class HyperplaneArrangement:
    """N affine units over R^n: column i of W with offset b[i] is one unit."""

    W: np.ndarray  # (n, N), column i is the weight vector of unit i
    b: np.ndarray  # (N,)

    def __post_init__(self):
        w = np.asarray(self.W, dtype=float)
        bv = np.asarray(self.b, dtype=float).reshape(-1)
        if w.ndim != 2:
            raise ArrangementError(f"W must be 2-D (n x N), got ndim={w.ndim}")
        if bv.shape[0] != w.shape[1]:
            raise ArrangementError(
                f"b has {bv.shape[0]} entries but W has {w.shape[1]} columns"
            )
        if not (np.isfinite(w).all() and np.isfinite(bv).all()):
            raise ArrangementError("W and b must be finite")
        norms = np.linalg.norm(w, axis=0)
        if np.any(norms == 0.0):
            bad = int(np.nonzero(norms == 0.0)[0][0]) + 1
            raise ArrangementError(f"unit {bad} has a zero weight vector")
        # each (w_i, b_i) pair must define a distinct hyperplane: reject
        # pairs that are positive or negative scalar multiples
        stacked = np.vstack([w, bv])  # (n+1, N)
        unit_dirs = stacked / np.linalg.norm(stacked, axis=0)
        for i in range(w.shape[1]):
            for j in range(i + 1, w.shape[1]):
                d = unit_dirs[:, i] - unit_dirs[:, j]
                s = unit_dirs[:, i] + unit_dirs[:, j]
                if min(np.linalg.norm(d), np.linalg.norm(s)) <= DUPLICATE_RTOL:
                    raise ArrangementError(
                        f"duplicate hyperplane: units {i + 1} and {j + 1} are "
                        f"scalar multiples of each other"
                    )
        object.__setattr__(self, "W", w)
        object.__setattr__(self, "b", bv)

    @classmethod
    def from_unit_rows(cls, rows, b):
        """Build from a list of per-unit weight vectors (rows of W^T)."""
        rows_arr = np.asarray(rows, dtype=float)
        if rows_arr.ndim != 2:
            raise ArrangementError("unit rows must form a 2-D array (N x n)")
        return cls(W=rows_arr.T.copy(), b=np.asarray(b, dtype=float).copy())

    @property
    def n(self):
        return self.W.shape[0]

    @property
    def num_units(self):
        return self.W.shape[1]

    def affine_values(self, x):
        """w_i.x + b_i for all units; x is a point (n,) or batch (m, n)."""
        pts = np.asarray(x, dtype=float)
        if pts.shape[-1] != self.n:
            raise ArrangementError(
                f"point dimension {pts.shape[-1]} does not match state "
                f"dimension {self.n}"
            )
        return pts @ self.W + self.b


@dataclass(frozen=True)
class SignVector:
    """Active/zero pattern across all units; bit i-1 is unit i."""

    bits: tuple

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(bool(v) for v in self.bits))

    def __len__(self):
        return len(self.bits)

    def active_set(self):
        """1-based indices of the active units, ascending."""
        return tuple(i + 1 for i, v in enumerate(self.bits) if v)

    def as_string(self):
        return "".join("1" if v else "0" for v in self.bits)

    @classmethod
    def from_string(cls, s):
        if set(s) - {"0", "1"}:
            raise ValueError(f"sign vector string must be 0/1, got {s!r}")
        return cls(tuple(ch == "1" for ch in s))

    def flipped(self, unit):
        """Copy with the given 1-based unit's bit inverted."""
        bits = list(self.bits)
        bits[unit - 1] = not bits[unit - 1]
        return SignVector(tuple(bits))


@dataclass
class RegionCatalog:
    """All strictly feasible regions of an arrangement, with witnesses."""

    feasible: list  # of SignVector
    witness_points: list  # of np.ndarray, one interior point per region

    def __len__(self):
        return len(self.feasible)

    def sign_strings(self):
        return [s.as_string() for s in self.feasible]


def classify(arr, x, boundary_tol=0.0):
    """Sign vector of a point: bit i set iff w_i.x + b_i > boundary_tol.

    Values in [-boundary_tol, boundary_tol] land on the zero side, matching
    the convention that the hyperplane itself belongs to the zero half-space.
    """
    if boundary_tol < 0.0:
        raise ValueError(f"boundary_tol must be >= 0, got {boundary_tol}")
    pt = np.asarray(x, dtype=float).reshape(-1)
    if not np.isfinite(pt).all():
        raise ValueError("classify: point must be finite")
    vals = arr.affine_values(pt)
    return SignVector(tuple(bool(v) for v in vals > boundary_tol))


def _max_slack_lp(arr, bits, box=WITNESS_BOX):
    """Maximize the minimum signed slack over the first len(bits) units.

    Returns (slack, witness). Both the strict system's feasibility and a
    Chebyshev-style interior witness come out of one LP:
        max t  s.t.  sign_i * (w_i.x + b_i) >= t,  |x_j| <= box.
    """
    n = arr.n
    k = len(bits)
    if k == 0:
        return np.inf, np.zeros(n)
    signs = np.where(np.asarray(bits, dtype=bool), 1.0, -1.0)
    # variables z = (x, t); minimize -t
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    a_ub = np.empty((k, n + 1))
    a_ub[:, :n] = -(signs[:, None] * arr.W[:, :k].T)
    a_ub[:, n] = 1.0
    b_ub = signs * arr.b[:k]
    bounds = [(-box, box)] * n + [(None, None)]
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        raise FeasibilityNumericalError(
            f"feasibility LP failed (status {res.status}): {res.message}"
        )
    return res.x[n], res.x[:n].copy()


def witness_in_box(arr, s, box):
    """Interior witness constrained to |x_j| <= box, or None.

    Used for display purposes: the default witness of an unbounded region
    runs to the far box, a tighter box keeps it near the arrangement.
    """
    slack, witness = _max_slack_lp(arr, s.bits, box=box)
    if slack < MIN_SLACK:
        return None
    return witness


def region_feasible(arr, s):
    """Interior witness for a sign vector, or None if strictly infeasible.

    The witness maximizes the minimum signed slack subject to a large box
    bound, so it sits well inside the region whenever one exists.
    """
    if len(s) != arr.num_units:
        raise ArrangementError(
            f"sign vector length {len(s)} does not match unit count "
            f"{arr.num_units}"
        )
    slack, witness = _max_slack_lp(arr, s.bits)
    if slack < MIN_SLACK:
        return None
    return witness


def enumerate_regions(arr):
    """Catalog every strictly feasible sign vector with an interior witness.

    Sweeps the 2^N candidate sign vectors depth-first, extending one unit
    at a time; a prefix whose max-slack LP already fails strict feasibility
    cannot gain it by adding constraints, so its whole subtree is skipped.
    """
    n_units = arr.num_units
    if n_units > MAX_UNITS_ENUMERATION:
        raise CapacityError(
            f"enumeration supports at most {MAX_UNITS_ENUMERATION} units, "
            f"got {n_units}"
        )
    feasible = []
    witnesses = []

    def descend(prefix):
        slack, witness = _max_slack_lp(arr, prefix)
        if slack < MIN_SLACK:
            return
        if len(prefix) == n_units:
            feasible.append(SignVector(tuple(prefix)))
            witnesses.append(witness)
            return
        descend(prefix + [False])
        descend(prefix + [True])

    descend([])
    return RegionCatalog(feasible=feasible, witness_points=witnesses)


def transition_kind(s1, s2):
    """Units flipped between two sign vectors and whether that is a
    nondegenerate border crossing (exactly one flip).

    Identical sign vectors yield (no flips, False): no crossing at all.
    """
    if len(s1) != len(s2):
        raise ValueError(
            f"sign vector lengths differ: {len(s1)} vs {len(s2)}"
        )
    flipped = tuple(
        i + 1 for i, (a, b) in enumerate(zip(s1.bits, s2.bits)) if a != b
    )
    return flipped, len(flipped) == 1
