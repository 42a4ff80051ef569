"""Command-line front end.

Three subcommands cover the pipeline:

* ``regions``   enumerate feasible activation regions of the configured
                network (JSON report + region chart);
* ``simulate``  run the adaptive tracking loop (CSV of all signals, phase
                and error figures, summary JSON on stdout);
* ``certify``   scan a trajectory's windowed Gramian spectrum and run the
                geometric excitation certificate (scan CSV, certificate
                JSON, eigenvalue figure, summary JSON on stdout).

Exit codes: 0 success / certificate PASS, 1 certificate FAIL, 2 usage or
configuration error, 3 numerical divergence.
"""

import argparse
import json
import os
import sys

from . import excitation, mrac, plots
from .config import ConfigError, load_config
from .geometry import ArrangementError, CapacityError, enumerate_regions
from .mrac import DivergenceError
from .trajectory import (
    TrajectoryFormatError,
    WindowRangeError,
    load_trajectory_csv,
    window,
)

EXIT_OK = 0
EXIT_CERT_FAIL = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def _out_sibling(out_path, suffix):
    stem, _ = os.path.splitext(out_path)
    return stem + suffix


def _print_summary(payload):
    print(json.dumps(payload, indent=2))


def _run_simulation(cfg, input_override=None):
    plant = cfg.plant()
    ref = cfg.reference()
    adapt = cfg.adaptation()
    signal = cfg.reference_signal(input_override)
    sim_cfg = cfg.sim
    return mrac.simulate(
        plant, ref, adapt, signal,
        ts=sim_cfg["ts"], t_final=sim_cfg["t_final"],
        x0=sim_cfg["x0"], xr0=sim_cfg["xr0"],
        theta_hat0=sim_cfg["theta_hat0"],
    )


def cmd_regions(args):
    cfg = load_config(args.config)
    arr = cfg.arrangement()
    catalog = enumerate_regions(arr)
    payload = {
        "count": len(catalog),
        "regions": [
            {
                "sign": sign.as_string(),
                "active_set": list(sign.active_set()),
                "witness": [float(v) for v in witness],
            }
            for sign, witness in zip(catalog.feasible, catalog.witness_points)
        ],
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    if not args.no_plots:
        plots.save_region_figure(arr, catalog, _out_sibling(args.out, "_regions.png"))
    _print_summary({"count": len(catalog)})
    return EXIT_OK


def cmd_simulate(args):
    cfg = load_config(args.config)
    sim = _run_simulation(cfg, args.input)
    mrac.write_sim_csv(sim, args.out)
    if not args.no_plots:
        plots.save_phase_figure(sim, cfg.arrangement(),
                                _out_sibling(args.out, "_phase.png"))
        plots.save_error_figure(sim, _out_sibling(args.out, "_errors.png"))
    adapt = cfg.adaptation()
    _print_summary({
        "kx": [float(v) for v in sim.kx],
        "kr": float(sim.kr),
        "px": [[float(v) for v in row] for row in adapt.px],
        "final_e_norm": float(sim.e_norm[-1]),
        "final_theta_err_norm": float(sim.theta_err_norm[-1]),
    })
    return EXIT_OK


def cmd_certify(args):
    cfg = load_config(args.config)
    if args.trajectory and args.from_sim:
        raise ConfigError("pass either a trajectory CSV or --from-sim, not both")
    if args.trajectory:
        traj = load_trajectory_csv(args.trajectory, n=cfg.arrangement().n)
    elif args.from_sim:
        traj = _run_simulation(cfg, args.input).traj_x
    else:
        raise ConfigError("certify needs a trajectory CSV or --from-sim")

    pe_cfg = cfg.pe
    t_window = args.window if args.window is not None else pe_cfg["T"]
    stride = args.stride if args.stride is not None else pe_cfg["stride"]
    start = pe_cfg["scan_start"]
    end = pe_cfg["scan_end"]
    if start is not None or end is not None:
        start = traj.t0 if start is None else start
        end = traj.t_end if end is None else end
        traj = window(traj, start, end - start)

    arr = cfg.arrangement()
    kind = cfg.activation()
    scan = excitation.pe_scan(traj, arr, kind, t_window, stride)
    probe = excitation.RankProbeConfig(rank_rel_tol=pe_cfg["rank_tol"])
    report = excitation.certify(
        traj, arr, kind, t_window, stride,
        rank_probe=probe, time_sep_tol=pe_cfg["time_sep_tol"],
    )
    excitation.write_scan_csv(scan, args.out)
    excitation.write_certificate_json(report, _out_sibling(args.out, ".cert.json"))
    if not args.no_plots:
        plots.save_scan_figure(scan, _out_sibling(args.out, "_eigs.png"))
    _print_summary({
        "alpha1": float(scan.alpha1),
        "alpha2": float(scan.alpha2),
        "verdict": report.verdict,
    })
    return EXIT_OK if report.passed else EXIT_CERT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pexcite",
        description="Excitation verification and adaptive-control simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="experiment config JSON")
    common.add_argument("--out", required=True, help="primary output path")
    common.add_argument("--no-plots", action="store_true",
                        help="skip figure rendering next to the output")

    p_regions = sub.add_parser("regions", parents=[common],
                               help="enumerate feasible activation regions")
    p_regions.set_defaults(func=cmd_regions)

    p_sim = sub.add_parser("simulate", parents=[common],
                           help="run the adaptive tracking simulation")
    p_sim.add_argument("--input", choices=["r1", "r2"],
                       help="override the configured reference input")
    p_sim.set_defaults(func=cmd_simulate)

    p_cert = sub.add_parser("certify", parents=[common],
                            help="scan excitation and run the certificate")
    p_cert.add_argument("--trajectory", help="trajectory CSV (t,x1,...,xn)")
    p_cert.add_argument("--from-sim", action="store_true",
                        help="simulate first, then certify that trajectory")
    p_cert.add_argument("--input", choices=["r1", "r2"],
                        help="override the configured reference input")
    p_cert.add_argument("--window", type=float, help="window length T")
    p_cert.add_argument("--stride", type=float, help="window shift stride")
    p_cert.set_defaults(func=cmd_certify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ArrangementError, CapacityError,
            TrajectoryFormatError, WindowRangeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"divergence: {exc} (step {exc.step})", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
