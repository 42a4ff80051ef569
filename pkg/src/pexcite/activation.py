"""Feature vectors built from positive-semidefinite activations.

The regressor phi maps a state x to N nonnegative components, one per
arrangement unit: component i is sigma(w_i.x + b_i). Two activations are
provided, scaled step and ReLU. Both vanish exactly on the zero half-space
(pre-activation <= 0), which is what ties the regressor's support to the
arrangement's activation regions. Other activations with that sign
structure can be added by subclassing Activation.
"""

from dataclasses import dataclass

import numpy as np


class Activation:
    """Scalar activation applied elementwise to unit pre-activations."""

    name = "abstract"
    # True when the feature vector is constant throughout each activation
    # region, which lets certificates skip the per-region span condition
    region_constant = False

    def apply(self, pre):
        raise NotImplementedError


@dataclass(frozen=True)
class Relu(Activation):
    """max(0, y): zero on the zero side, identity on the active side."""

    name = "relu"

    def apply(self, pre):
        return np.maximum(np.asarray(pre, dtype=float), 0.0)


@dataclass(frozen=True)
class ScaledStep(Activation):
    """Per-unit positive constants on the active side, zero otherwise."""

    c: tuple

    name = "step"
    region_constant = True

    def __post_init__(self):
        cv = tuple(float(v) for v in np.asarray(self.c, dtype=float).reshape(-1))
        if len(cv) == 0:
            raise ValueError("scaled step needs at least one scale")
        if any(not np.isfinite(v) or v <= 0.0 for v in cv):
            raise ValueError(f"scaled step requires all scales > 0, got {cv}")
        object.__setattr__(self, "c", cv)

    def scales(self):
        return np.asarray(self.c, dtype=float)

    def apply(self, pre):
        pre_arr = np.asarray(pre, dtype=float)
        c = self.scales()
        if pre_arr.shape[-1] != c.shape[0]:
            raise ValueError(
                f"pre-activation has {pre_arr.shape[-1]} units, scales have "
                f"{c.shape[0]}"
            )
        return np.where(pre_arr > 0.0, c, 0.0)

    def region_values(self, s):
        """Constant feature vector on a region: scales at active bits."""
        return np.where(np.asarray(s.bits, dtype=bool), self.scales(), 0.0)


def phi(arr, kind, x):
    """Feature vector at a single state point, length N."""
    vals = arr.affine_values(np.asarray(x, dtype=float).reshape(-1))
    return kind.apply(vals)


def phi_samples(arr, kind, points):
    """Feature vectors for a batch of states, shape (m, N)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError(f"expected a batch of points (m, n), got {pts.shape}")
    return kind.apply(arr.affine_values(pts))


def active_submatrices(arr, kind, s):
    """Rows of W^T, entries of b (and step scales) for the active units.

    Rows are ordered by ascending unit index. An empty active set yields
    0-row/0-length results.
    """
    if len(s) != arr.num_units:
        raise ValueError(
            f"sign vector length {len(s)} does not match unit count "
            f"{arr.num_units}"
        )
    idx = [i - 1 for i in s.active_set()]
    wt_active = arr.W.T[idx, :].copy()
    b_active = arr.b[idx].copy()
    c_active = None
    if isinstance(kind, ScaledStep):
        c_active = kind.scales()[idx].copy()
    return wt_active, b_active, c_active
