"""Sliding-window excitation analysis of a feature trajectory.

Two complementary checks of persistency of excitation:

* the direct route: the windowed Gramian integral of phi(x_t) phi(x_t)^T,
  whose smallest eigenvalue over all window shifts is the excitation
  level alpha1;
* the certificate route: geometric sufficient conditions on the visited
  activation regions. Region-constant activations (scaled step) need every
  hyperplane crossed, at nondegenerate borders only, inside every window.
  State-dependent activations (ReLU) additionally need, per visited
  region, the sample differences to span enough of the active row space
  (a rank condition), since within a region the features are affine in
  the state.

A certificate PASS is sufficient for a positive-definite Gramian, never
necessary, so FAIL verdicts list which condition broke and where.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .activation import phi_samples
from .trajectory import WindowRangeError, segment, window


@dataclass(frozen=True)
class RankProbeConfig:
    """How difference columns are harvested inside each region visit.

    max_columns defaults to the state dimension; a difference matrix of
    full row rank already certifies the span condition for any active set.
    """

    max_columns: int = None
    rank_rel_tol: float = linalg.DEFAULT_RANK_TOL


@dataclass
class WindowEigs:
    tau: float
    lambda_min: float
    lambda_max: float


@dataclass
class PeScanResult:
    """Gramian eigenvalue extremes per window shift."""

    T: float
    stride: float
    windows: list = field(default_factory=list)

    @property
    def alpha1(self):
        return min(w.lambda_min for w in self.windows)

    @property
    def alpha2(self):
        return max(w.lambda_max for w in self.windows)


@dataclass
class WindowCheck:
    """Certificate condition outcomes for one window shift."""

    tau: float
    crossed_all: bool
    uncrossed: tuple  # 1-based units never flipped in this window
    nondegenerate_only: bool
    degenerate_events: list  # of CrossingEvent
    rank_ok: bool = None  # None when the rank condition does not apply
    rank_failures: list = field(default_factory=list)  # sign strings

    def passed(self):
        ok = self.crossed_all and self.nondegenerate_only
        if self.rank_ok is not None:
            ok = ok and self.rank_ok
        return ok


@dataclass
class CertificateReport:
    theorem: str  # "Step" or "Relu" condition set
    T: float
    stride: float
    verdict: str  # "PASS" / "FAIL"
    per_window: list = field(default_factory=list)

    @property
    def passed(self):
        return self.verdict == "PASS"


def gramian(traj, arr, kind):
    """Trapezoidal estimate of the windowed feature Gramian, N x N.

    Integrates phi(x_t) phi(x_t)^T over the trajectory's time span and
    symmetrizes the result; nonnegative quadrature weights keep it PSD.
    """
    phis = phi_samples(arr, kind, traj.samples)
    weights = np.full(len(traj), traj.ts)
    weights[0] = weights[-1] = 0.5 * traj.ts
    g = (phis * weights[:, None]).T @ phis
    return 0.5 * (g + g.T)


def scan_shifts(traj, T, stride):
    """Window start times t0, t0+stride, ... that fit inside the span."""
    if stride <= 0.0:
        raise ValueError(f"stride must be > 0, got {stride}")
    if T > traj.span + 0.5 * traj.ts:
        raise WindowRangeError(
            f"window length {T} exceeds trajectory span {traj.span}"
        )
    taus = []
    j = 0
    while traj.t0 + j * stride + T <= traj.t_end + 0.5 * traj.ts:
        taus.append(traj.t0 + j * stride)
        j += 1
    return taus


def pe_scan(traj, arr, kind, T, stride):
    """Eigenvalue extremes of the Gramian over all window shifts.

    alpha1 > 0 across every shift is the sampled analogue of persistency
    of excitation for this window length.
    """
    result = PeScanResult(T=T, stride=stride)
    for tau in scan_shifts(traj, T, stride):
        view = window(traj, tau, T)
        eigs, _ = linalg.sym_eig(gramian(view, arr, kind))
        result.windows.append(
            WindowEigs(tau=tau, lambda_min=float(eigs[0]), lambda_max=float(eigs[-1]))
        )
    return result


def _difference_matrix(samples, max_columns, rel_tol):
    """Greedy span probe: columns x_k - x_first that raise the rank."""
    n = samples.shape[1]
    diffs = samples[1:] - samples[0]
    kept = []
    rank = 0
    for d in diffs:
        if rank >= max_columns:
            break
        cand = np.column_stack(kept + [d])
        if np.linalg.norm(cand, "fro") == 0.0:
            continue
        new_rank = linalg.rank_tol(cand, rel_tol)
        if new_rank > rank:
            kept.append(d)
            rank = new_rank
        if rank >= n:
            break
    if not kept:
        return np.zeros((n, 0))
    return np.column_stack(kept)


def _check_rank_condition(view, seg, arr, probe):
    """Span condition per visited region: sample differences must reach
    the active rows' rank. Visits with fewer than two in-window samples
    contribute no differences and are skipped; empty active sets are
    exempt (nothing to span)."""
    max_cols = probe.max_columns if probe.max_columns is not None else arr.n
    failures = []
    for visit in seg.visits:
        active = visit.sign.active_set()
        if not active or visit.num_samples < 2:
            continue
        idx = [i - 1 for i in active]
        wt_active = arr.W.T[idx, :]
        target = linalg.rank_tol(wt_active, probe.rank_rel_tol)
        d = _difference_matrix(
            view.samples[visit.start : visit.stop], max_cols, probe.rank_rel_tol
        )
        if d.shape[1] == 0:
            product_rank = 0
        else:
            product_rank = linalg.rank_tol(wt_active @ d, probe.rank_rel_tol)
        if product_rank != target:
            failures.append(visit.sign.as_string())
    return failures


def certify(traj, arr, kind, T, stride, rank_probe=RankProbeConfig(),
            time_sep_tol=None):
    """Run the geometric sufficient-condition certificate over all shifts.

    Region-constant activations are checked against the crossing and
    nondegeneracy conditions; state-dependent ones additionally against
    the per-region span condition. PASS means every window satisfied
    every applicable condition.
    """
    needs_rank = not kind.region_constant
    report = CertificateReport(
        theorem="Relu" if needs_rank else "Step",
        T=T,
        stride=stride,
        verdict="PASS",
    )
    all_units = set(range(1, arr.num_units + 1))
    for tau in scan_shifts(traj, T, stride):
        view = window(traj, tau, T)
        if len(view) < 2:
            raise WindowRangeError(f"window at tau={tau} has fewer than 2 samples")
        seg = segment(view, arr, time_sep_tol=time_sep_tol)
        uncrossed = tuple(sorted(all_units - seg.crossed_units()))
        degenerate = seg.degenerate_events()
        check = WindowCheck(
            tau=tau,
            crossed_all=not uncrossed,
            uncrossed=uncrossed,
            nondegenerate_only=not degenerate,
            degenerate_events=degenerate,
        )
        if needs_rank:
            failures = _check_rank_condition(view, seg, arr, rank_probe)
            check.rank_ok = not failures
            check.rank_failures = failures
        report.per_window.append(check)
        if not check.passed():
            report.verdict = "FAIL"
    return report


def write_scan_csv(result, path):
    """Scan CSV: tau,lambda_min,lambda_max with round-trip float precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tau", "lambda_min", "lambda_max"])
        for w in result.windows:
            writer.writerow(
                [repr(float(w.tau)), repr(float(w.lambda_min)), repr(float(w.lambda_max))]
            )


def certificate_to_dict(report):
    """JSON-ready view of a certificate report."""
    windows = []
    for check in report.per_window:
        entry = {
            "tau": check.tau,
            "cond1_crossed_all": check.crossed_all,
            "uncrossed": list(check.uncrossed),
            "cond2_nondegenerate_only": check.nondegenerate_only,
            "degenerate_events": [
                {
                    "sample_index": ev.sample_index,
                    "units": list(ev.flipped),
                    "times": [ev.refined_times[u] for u in ev.flipped],
                }
                for ev in check.degenerate_events
            ],
            "cond3_rank_ok": check.rank_ok,
            "failing_regions": list(check.rank_failures),
        }
        windows.append(entry)
    return {
        "theorem": report.theorem,
        "T": report.T,
        "stride": report.stride,
        "verdict": report.verdict,
        "per_window": windows,
    }


def write_certificate_json(report, path):
    with open(path, "w") as fh:
        json.dump(certificate_to_dict(report), fh, indent=2)
        fh.write("\n")
