"""Figure rendering for the CLI report paths.

Each command that writes delimited output can also drop matplotlib
figures next to it: the region chart for 2-D arrangements, phase plots of
the tracking run, error-norm traces, and the window-eigenvalue scan. The
Agg backend is forced so rendering works headless.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .geometry import witness_in_box


def _display_box(arr):
    """Half-width of a view box surrounding the hyperplane cluster."""
    extent = 1.0
    for i in range(arr.num_units):
        w = arr.W[:, i]
        # closest point of hyperplane i to the origin
        p = -arr.b[i] * w / (w @ w)
        extent = max(extent, np.abs(p).max())
        for j in range(i + 1, arr.num_units):
            m = np.column_stack([w, arr.W[:, j]]).T
            if abs(np.linalg.det(m)) > 1e-9:
                q = np.linalg.solve(m, -np.array([arr.b[i], arr.b[j]]))
                extent = max(extent, np.abs(q).max())
    return 2.0 * extent + 1.0


def _hyperplane_segments(arr, xlim, ylim):
    """Clip each hyperplane w.x + b = 0 to the plotting box."""
    segments = []
    for i in range(arr.num_units):
        w = arr.W[:, i]
        b = arr.b[i]
        pts = []
        for x in xlim:
            if abs(w[1]) > 1e-12:
                y = -(b + w[0] * x) / w[1]
                if ylim[0] - 1e-9 <= y <= ylim[1] + 1e-9:
                    pts.append((x, y))
        for y in ylim:
            if abs(w[0]) > 1e-12:
                x = -(b + w[1] * y) / w[0]
                if xlim[0] - 1e-9 <= x <= xlim[1] + 1e-9:
                    pts.append((x, y))
        uniq = []
        for p in pts:
            if not any(np.hypot(p[0] - q[0], p[1] - q[1]) < 1e-9 for q in uniq):
                uniq.append(p)
        if len(uniq) >= 2:
            segments.append((i + 1, uniq[0], uniq[1]))
    return segments


def save_region_figure(arr, catalog, path):
    """Scatter of region witnesses with the hyperplanes, 2-D only."""
    if arr.n != 2:
        return None
    box = _display_box(arr)
    display = [witness_in_box(arr, s, box) for s in catalog.feasible]
    pts = np.array([
        d if d is not None else w
        for d, w in zip(display, catalog.witness_points)
    ])
    pts = np.clip(pts, -box, box)
    pad = 1.0
    xlim = (pts[:, 0].min() - pad, pts[:, 0].max() + pad)
    ylim = (pts[:, 1].min() - pad, pts[:, 1].max() + pad)
    fig, ax = plt.subplots(figsize=(6, 6))
    for unit, p0, p1 in _hyperplane_segments(arr, xlim, ylim):
        ax.plot([p0[0], p1[0]], [p0[1], p1[1]], "k-", lw=1)
        ax.annotate(f"H{unit}", xy=p0, fontsize=8, color="gray")
    ax.scatter(pts[:, 0], pts[:, 1], c=np.arange(len(pts)), cmap="tab20", s=40)
    for sign, p in zip(catalog.feasible, pts):
        ax.annotate(sign.as_string(), xy=(p[0], p[1]), fontsize=7,
                    xytext=(3, 3), textcoords="offset points")
    ax.set_xlim(*xlim)
    ax.set_ylim(*ylim)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title(f"{len(catalog)} feasible activation regions")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_phase_figure(sim, arr, path):
    """State-space phase plot of plant and reference trajectories."""
    x = sim.traj_x.samples
    xr = sim.traj_xr.samples
    both = np.vstack([x, xr])
    pad = 0.1 * max(np.ptp(both, axis=0).max(), 1.0)
    xlim = (both[:, 0].min() - pad, both[:, 0].max() + pad)
    ylim = (both[:, 1].min() - pad, both[:, 1].max() + pad)
    fig, ax = plt.subplots(figsize=(6, 6))
    if arr is not None and arr.n == 2:
        for unit, p0, p1 in _hyperplane_segments(arr, xlim, ylim):
            ax.plot([p0[0], p1[0]], [p0[1], p1[1]], "k-", lw=1)
            ax.annotate(f"H{unit}", xy=p0, fontsize=8, color="gray")
    ax.plot(x[:, 0], x[:, 1], color="c", lw=0.8, label="plant x")
    ax.plot(xr[:, 0], xr[:, 1], color="m", lw=0.8, ls="--", label="reference")
    ax.set_xlim(*xlim)
    ax.set_ylim(*ylim)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("phase plot")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_error_figure(sim, path):
    """Tracking-error and estimate-error norms over time."""
    t = sim.times
    fig, axes = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    axes[0].plot(t, sim.e_norm, lw=0.8)
    axes[0].set_ylabel("||e||")
    axes[0].set_title("tracking error")
    axes[1].plot(t, sim.theta_err_norm, lw=0.8, color="tab:red")
    axes[1].set_ylabel("||theta_hat - theta||")
    axes[1].set_xlabel("t [s]")
    axes[1].set_title("parameter estimate error")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_scan_figure(scan, path):
    """Window Gramian eigenvalue extremes against the window shift."""
    taus = [w.tau for w in scan.windows]
    lo = [w.lambda_min for w in scan.windows]
    hi = [w.lambda_max for w in scan.windows]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(taus, lo, "o-", ms=3, label="lambda_min")
    ax.plot(taus, hi, "s-", ms=3, label="lambda_max")
    if min(lo) > 0.0:
        ax.set_yscale("log")
    ax.set_xlabel("window start tau [s]")
    ax.set_ylabel("eigenvalue")
    ax.set_title(f"window Gramian spectrum (T={scan.T}, stride={scan.stride})")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
