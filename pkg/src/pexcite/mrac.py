"""Model-reference adaptive control loop with a feature-vector nonlinearity.

The plant is a second-order system in controllable canonical form whose
input channel carries an unknown linear combination of the feature vector,
theta^T phi(x). The controller uses exact matching gains (computable here
because the linear part is known), plus an adaptive estimate theta_hat
updated by a Lyapunov-based law. With the matching identity substituted,
the closed loop integrated is

    x'      = A_r x + B_r r - B (theta_hat - theta)^T phi(x)
    x_r'    = A_r x_r + B_r r
    theta_hat' = Gamma phi(x) (e^T P_x B),   e = x - x_r

which is algebraically the plant under the control law
u = K_x^T x + K_r r - theta_hat^T phi(x); integrating this form keeps the
tuned equilibrium (theta_hat = theta, x = x_r) an exact fixed point of the
Euler recursion. Forward Euler is used throughout so runs at the default
timestep are directly comparable with halved-step consistency checks.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .linalg import solve_linear, solve_lyapunov, sym_eig
from .trajectory import Trajectory


class MatchingError(ValueError):
    """Matching gains are not computable (degenerate input channel)."""


class DivergenceError(RuntimeError):
    """Simulation state left the finite range."""

    def __init__(self, step, message):
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class CanonicalPlant:
    """x' = A x + B (u + theta^T phi(x)) with
    A = [[0, 1], [-a1, 2 a2]], B = [0, beta]^T (scalar input)."""

    a1: float
    a2: float
    beta: float
    arr: object  # HyperplaneArrangement over R^2
    kind: object  # Activation
    theta: np.ndarray  # (N,) true feature weights

    def __post_init__(self):
        for name in ("a1", "a2", "beta"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0.0):
                raise ValueError(f"plant {name} must be a positive scalar, got {v}")
        if self.arr.n != 2:
            raise ValueError(
                f"canonical plant needs a 2-D arrangement, got n={self.arr.n}"
            )
        th = np.asarray(self.theta, dtype=float).reshape(-1)
        if th.shape[0] != self.arr.num_units:
            raise ValueError(
                f"theta has {th.shape[0]} entries, arrangement has "
                f"{self.arr.num_units} units"
            )
        if not np.isfinite(th).all():
            raise ValueError("theta must be finite")
        object.__setattr__(self, "theta", th)

    @property
    def A(self):
        return np.array([[0.0, 1.0], [-self.a1, 2.0 * self.a2]])

    @property
    def B(self):
        return np.array([0.0, self.beta])

    def eig_A(self):
        """Analytic eigenvalues a2 +- sqrt(a2^2 - a1) (complex pair allowed)."""
        disc = complex(self.a2 * self.a2 - self.a1)
        root = disc ** 0.5
        return (self.a2 - root, self.a2 + root)


@dataclass(frozen=True)
class ReferenceModel:
    """Unity-gain damped oscillator x_r' = A_r x_r + B_r r."""

    omega0: float
    xi: float

    def __post_init__(self):
        for name in ("omega0", "xi"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0.0):
                raise ValueError(f"reference {name} must be > 0, got {v}")

    @property
    def A_r(self):
        w0 = self.omega0
        return np.array([[0.0, 1.0], [-w0 * w0, -2.0 * self.xi * w0]])

    @property
    def B_r(self):
        return np.array([0.0, self.omega0 * self.omega0])

    def eig_A_r(self):
        """Analytic eigenvalues (-xi +- sqrt(xi^2 - 1)) * omega0."""
        disc = complex(self.xi * self.xi - 1.0)
        root = disc ** 0.5
        return (
            (-self.xi - root) * self.omega0,
            (-self.xi + root) * self.omega0,
        )


class AdaptationConfig:
    """Adaptation rates Gamma and the Lyapunov pair (Q_x, P_x).

    P_x solves P_x A_r + A_r^T P_x = -Q_x for the given reference model;
    both Gamma and Q_x must be symmetric positive definite.
    """

    def __init__(self, gamma, qx, ref):
        g = np.asarray(gamma, dtype=float)
        if g.ndim == 1:
            g = np.diag(g)
        q = np.asarray(qx, dtype=float)
        for name, m in (("gamma", g), ("qx", q)):
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValueError(f"{name} must be square, got shape {m.shape}")
            eigs, _ = sym_eig(m)
            if eigs[0] <= 0.0:
                raise ValueError(f"{name} must be positive definite")
        self.gamma = g
        self.qx = q
        self.px = solve_lyapunov(ref.A_r, q)
        self.gamma_norm = float(np.linalg.norm(g, "fro"))


@dataclass(frozen=True)
class ReferenceInput:
    """Bounded input r(t) = offset + sum_k amp_k * sin(omega_k t)."""

    offset: float
    terms: tuple  # of (amplitude, angular frequency)

    @classmethod
    def r1(cls):
        return cls(offset=0.0, terms=((10.0, 0.5),))

    @classmethod
    def r2(cls):
        return cls(offset=40.0, terms=((10.0, 0.25), (10.0, 0.5)))

    @classmethod
    def custom(cls, offset, terms):
        return cls(offset=float(offset), terms=tuple((float(a), float(w)) for a, w in terms))

    def value(self, t):
        out = self.offset
        for amp, omega in self.terms:
            out = out + amp * math.sin(omega * t)
        return out

    def values(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = np.full_like(t_arr, self.offset)
        for amp, omega in self.terms:
            out += amp * np.sin(omega * t_arr)
        return out


def reference_input(kind, t, offset=0.0, terms=()):
    """Evaluate one of the stock inputs ("r1", "r2") or a custom series."""
    key = str(kind).lower()
    if key == "r1":
        return ReferenceInput.r1().value(t)
    if key == "r2":
        return ReferenceInput.r2().value(t)
    if key == "custom":
        return ReferenceInput.custom(offset, terms).value(t)
    raise ValueError(f"unknown reference input kind {kind!r}")


def matching_gains(plant, ref):
    """Feedback/feedforward gains making plant + feedback equal the
    reference model: A + B K_x^T = A_r and B K_r = B_r.

    For the canonical forms these are available in closed form.
    """
    if abs(plant.beta) < 1e-12:
        raise MatchingError(f"input gain beta={plant.beta} too small to match")
    w0 = ref.omega0
    kx = np.array(
        [
            -(w0 * w0 - plant.a1) / plant.beta,
            -(2.0 * ref.xi * w0 + 2.0 * plant.a2) / plant.beta,
        ]
    )
    kr = w0 * w0 / plant.beta
    return kx, kr


def compute_c(ref, plant, qx):
    """Effective adaptation speed scalar 0.5 (A_r^-1 B)^T Q_x (A_r^-1 B).

    A_r is Hurwitz hence invertible; positive definiteness of Q_x makes
    the result strictly positive.
    """
    q = np.asarray(qx, dtype=float)
    v = solve_linear(ref.A_r, plant.B)
    return float(0.5 * v @ q @ v)


@dataclass
class SimResult:
    """Closed-loop signals sampled at the integration grid."""

    traj_x: Trajectory
    traj_xr: Trajectory
    theta_hat: np.ndarray  # (K, N)
    e_norm: np.ndarray  # (K,)
    theta_err_norm: np.ndarray  # (K,)
    u: np.ndarray  # (K,)
    phi: np.ndarray  # (K, N)
    kx: np.ndarray
    kr: float

    @property
    def times(self):
        return self.traj_x.times()


def simulate(plant, ref, adapt, input_signal, ts=1e-3, t_final=200.0,
             x0=(0.0, 0.0), xr0=(0.0, 0.0), theta_hat0=None):
    """Forward-Euler run of the adaptive loop; records every signal.

    Raises DivergenceError (with the offending step index) if the state
    leaves the finite range.
    """
    if ts <= 0.0:
        raise ValueError(f"ts must be > 0, got {ts}")
    if t_final < ts:
        raise ValueError(f"t_final must be >= ts, got {t_final}")
    n_units = plant.arr.num_units
    steps = int(round(t_final / ts))
    count = steps + 1

    kx, kr = matching_gains(plant, ref)
    a_r = ref.A_r
    b_r = ref.B_r
    b = plant.B
    theta = plant.theta
    gamma = adapt.gamma
    pxb = adapt.px @ b
    wt = plant.arr.W.T  # (N, n)
    b_units = plant.arr.b
    kind = plant.kind

    x_hist = np.empty((count, 2))
    xr_hist = np.empty((count, 2))
    th_hist = np.empty((count, n_units))
    u_hist = np.empty(count)
    phi_hist = np.empty((count, n_units))

    x = np.asarray(x0, dtype=float).reshape(2).copy()
    xr = np.asarray(xr0, dtype=float).reshape(2).copy()
    th = (
        np.zeros(n_units)
        if theta_hat0 is None
        else np.asarray(theta_hat0, dtype=float).reshape(n_units).copy()
    )

    r_series = input_signal.values(np.arange(count) * ts)
    # overflow on a diverging run is expected; the finiteness check below
    # turns it into a typed error with the step index
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(count):
            r = r_series[k]
            feat = kind.apply(wt @ x + b_units)
            x_hist[k] = x
            xr_hist[k] = xr
            th_hist[k] = th
            phi_hist[k] = feat
            u_hist[k] = kx @ x + kr * r - th @ feat
            if k == steps:
                break
            mismatch = (th - theta) @ feat
            dx = a_r @ x + b_r * r - b * mismatch
            dxr = a_r @ xr + b_r * r
            e = x - xr
            dth = (e @ pxb) * (gamma @ feat)
            x = x + ts * dx
            xr = xr + ts * dxr
            th = th + ts * dth
            if not (np.isfinite(x).all() and np.isfinite(th).all()):
                raise DivergenceError(
                    k + 1,
                    f"simulation diverged at step {k + 1} (t={(k + 1) * ts:.6g})",
                )

    e_norm = np.linalg.norm(x_hist - xr_hist, axis=1)
    theta_err_norm = np.linalg.norm(th_hist - theta, axis=1)
    return SimResult(
        traj_x=Trajectory(ts=ts, t0=0.0, samples=x_hist),
        traj_xr=Trajectory(ts=ts, t0=0.0, samples=xr_hist),
        theta_hat=th_hist,
        e_norm=e_norm,
        theta_err_norm=theta_err_norm,
        u=u_hist,
        phi=phi_hist,
        kx=kx,
        kr=kr,
    )


def ltv_error_sim(phi_series, gamma, c_scalar, theta_err0, ts, substeps=1):
    """Forward-Euler run of the estimation-error flow
    err' = -c * Gamma * phi phi^T * err driven by a recorded feature series.

    substeps > 1 refines the integration grid, interpolating the features
    linearly inside each recorded interval.
    """
    if c_scalar <= 0.0:
        raise ValueError(f"c_scalar must be > 0, got {c_scalar}")
    if ts <= 0.0:
        raise ValueError(f"ts must be > 0, got {ts}")
    phis = np.asarray(phi_series, dtype=float)
    if phis.ndim != 2:
        raise ValueError(f"phi series must be (K, N), got shape {phis.shape}")
    g = np.asarray(gamma, dtype=float)
    if g.ndim == 1:
        g = np.diag(g)
    y = np.asarray(theta_err0, dtype=float).reshape(-1).copy()
    count = phis.shape[0]
    out = np.empty((count, y.shape[0]))
    out[0] = y
    h = ts / substeps
    for k in range(count - 1):
        if substeps == 1:
            feat = phis[k]
            y = y - h * c_scalar * (feat @ y) * (g @ feat)
        else:
            delta = (phis[k + 1] - phis[k]) / substeps
            feat = phis[k].copy()
            for _ in range(substeps):
                y = y - h * c_scalar * (feat @ y) * (g @ feat)
                feat += delta
        if not np.isfinite(y).all():
            raise DivergenceError(k + 1, f"error flow diverged at step {k + 1}")
        out[k + 1] = y
    return out


SIM_CSV_PREFIX = ["t", "x1", "x2", "xr1", "xr2", "u", "e_norm", "theta_err_norm"]


def write_sim_csv(result, path):
    """Simulation CSV:
    t,x1,x2,xr1,xr2,u,e_norm,theta_err_norm,theta_hat_*,phi_*."""
    n_units = result.theta_hat.shape[1]
    header = list(SIM_CSV_PREFIX)
    header += [f"theta_hat_{i + 1}" for i in range(n_units)]
    header += [f"phi_{i + 1}" for i in range(n_units)]
    times = result.times
    xs = result.traj_x.samples
    xrs = result.traj_xr.samples
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in range(len(times)):
            row = [
                times[k], xs[k, 0], xs[k, 1], xrs[k, 0], xrs[k, 1],
                result.u[k], result.e_norm[k], result.theta_err_norm[k],
            ]
            row += list(result.theta_hat[k])
            row += list(result.phi[k])
            writer.writerow([repr(float(v)) for v in row])
