"""Experiment configuration: one JSON document describing the network,
plant, reference model, adaptation matrices, simulation grid, reference
input, and excitation-scan parameters.

Loading validates every invariant the runtime objects rely on and reports
failures with the dotted path of the offending field (JSON syntax errors
keep their line/column from the parser). A loaded config is a plain
normalized dict wrapped with typed builder methods.
"""

import copy
import json
import math

import numpy as np

from .activation import Relu, ScaledStep
from .geometry import ArrangementError, HyperplaneArrangement
from .mrac import AdaptationConfig, CanonicalPlant, ReferenceInput, ReferenceModel


class ConfigError(ValueError):
    """Invalid experiment configuration; message carries the field path."""


def default_config():
    """Demo configuration: 4 ReLU units over R^2 with the oscillatory
    plant / critically damped reference pair used throughout the docs."""
    return {
        "plant": {"a1": 2.0, "a2": 0.5, "beta": 0.75},
        "reference": {"omega0": 2.0, "xi": 1.0},
        "network": {
            "W": [[2.0, 1.0], [1.0, -2.0], [1.5, -0.5], [0.5, 2.0]],
            "b": [1.0, 2.0, 2.5, 3.0],
        },
        "activation": {"kind": "relu"},
        "theta": [-1.2, 2.7, 0.8, -3.2],
        "gamma": [5.0, 1.0, 5.0, 2.0],
        "qx": [[1.0, 0.0], [0.0, 10.0]],
        "sim": {
            "ts": 0.001,
            "t_final": 200.0,
            "x0": [0.0, 0.0],
            "xr0": [0.0, 0.0],
            "theta_hat0": [0.0, 0.0, 0.0, 0.0],
        },
        "input": {"kind": "r1"},
        "pe": {
            "T": 20.0,
            "stride": 1.0,
            "scan_start": 100.0,
            "scan_end": 200.0,
            "rank_tol": 1e-8,
            "time_sep_tol": None,
        },
    }


def _fail(path, message):
    raise ConfigError(f"{path}: {message}")


def _require_keys(section, path, required, optional=()):
    if not isinstance(section, dict):
        _fail(path, f"expected an object, got {type(section).__name__}")
    for key in required:
        if key not in section:
            _fail(path, f"missing required key '{key}'")
    extra = set(section) - set(required) - set(optional)
    if extra:
        _fail(path, f"unknown keys {sorted(extra)}")


def _as_number(value, path, positive=False, nonnegative=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        _fail(path, f"must be finite, got {value!r}")
    if positive and v <= 0.0:
        _fail(path, f"must be > 0, got {value!r}")
    if nonnegative and v < 0.0:
        _fail(path, f"must be >= 0, got {value!r}")
    return v


def _as_vector(value, path, length=None):
    if not isinstance(value, list):
        _fail(path, f"expected a list, got {type(value).__name__}")
    out = [_as_number(v, f"{path}[{i}]") for i, v in enumerate(value)]
    if length is not None and len(out) != length:
        _fail(path, f"expected {length} entries, got {len(out)}")
    return out


def _as_matrix(value, path, rows=None, cols=None):
    if not isinstance(value, list) or not value or not isinstance(value[0], list):
        _fail(path, "expected a nested list of rows")
    width = len(value[0])
    out = []
    for i, row in enumerate(value):
        r = _as_vector(row, f"{path}[{i}]")
        if len(r) != width:
            _fail(path, f"row {i} has {len(r)} entries, expected {width}")
        out.append(r)
    if rows is not None and len(out) != rows:
        _fail(path, f"expected {rows} rows, got {len(out)}")
    if cols is not None and width != cols:
        _fail(path, f"expected {cols} columns, got {width}")
    return out


class ExperimentConfig:
    """Validated configuration plus builders for the runtime objects."""

    def __init__(self, data):
        self.data = _validate(data)

    def __eq__(self, other):
        return isinstance(other, ExperimentConfig) and self.data == other.data

    def to_json_dict(self):
        return copy.deepcopy(self.data)

    # builders ---------------------------------------------------------

    def arrangement(self):
        net = self.data["network"]
        try:
            return HyperplaneArrangement.from_unit_rows(net["W"], net["b"])
        except ArrangementError as exc:
            raise ConfigError(f"network: {exc}") from exc

    def activation(self):
        act = self.data["activation"]
        if act["kind"] == "relu":
            return Relu()
        return ScaledStep(tuple(act["c"]))

    def plant(self):
        p = self.data["plant"]
        return CanonicalPlant(
            a1=p["a1"], a2=p["a2"], beta=p["beta"],
            arr=self.arrangement(), kind=self.activation(),
            theta=np.asarray(self.data["theta"]),
        )

    def reference(self):
        r = self.data["reference"]
        return ReferenceModel(omega0=r["omega0"], xi=r["xi"])

    def adaptation(self):
        return AdaptationConfig(
            gamma=np.asarray(self.data["gamma"]),
            qx=np.asarray(self.data["qx"]),
            ref=self.reference(),
        )

    def reference_signal(self, override_kind=None):
        spec = dict(self.data["input"])
        kind = override_kind or spec["kind"]
        if kind == "r1":
            return ReferenceInput.r1()
        if kind == "r2":
            return ReferenceInput.r2()
        if kind != "custom":
            raise ConfigError(f"input.kind: unknown kind {kind!r}")
        return ReferenceInput.custom(spec.get("offset", 0.0), spec.get("terms", []))

    @property
    def sim(self):
        return self.data["sim"]

    @property
    def pe(self):
        return self.data["pe"]

    @property
    def num_units(self):
        return len(self.data["network"]["b"])


def _validate(data):
    if not isinstance(data, dict):
        raise ConfigError("top level: expected a JSON object")
    _require_keys(
        data, "top level",
        required=["plant", "reference", "network", "activation", "theta",
                  "gamma", "qx"],
        optional=["sim", "input", "pe"],
    )
    out = {}

    p = data["plant"]
    _require_keys(p, "plant", ["a1", "a2", "beta"])
    out["plant"] = {k: _as_number(p[k], f"plant.{k}", positive=True)
                    for k in ("a1", "a2", "beta")}

    r = data["reference"]
    _require_keys(r, "reference", ["omega0", "xi"])
    out["reference"] = {k: _as_number(r[k], f"reference.{k}", positive=True)
                        for k in ("omega0", "xi")}

    net = data["network"]
    _require_keys(net, "network", ["W", "b"])
    w_rows = _as_matrix(net["W"], "network.W")
    n_units = len(w_rows)
    n_dim = len(w_rows[0])
    b = _as_vector(net["b"], "network.b", length=n_units)
    out["network"] = {"W": w_rows, "b": b}

    act = data["activation"]
    _require_keys(act, "activation", ["kind"], optional=["c"])
    kind = act["kind"]
    if kind not in ("relu", "step"):
        _fail("activation.kind", f"must be 'relu' or 'step', got {kind!r}")
    if kind == "step":
        if "c" not in act:
            _fail("activation.c", "scaled step requires per-unit scales c")
        c = _as_vector(act["c"], "activation.c", length=n_units)
        if any(v <= 0.0 for v in c):
            _fail("activation.c", f"all scales must be > 0, got {c}")
        out["activation"] = {"kind": "step", "c": c}
    else:
        if "c" in act:
            _fail("activation.c", "relu takes no scales; remove 'c'")
        out["activation"] = {"kind": "relu"}

    out["theta"] = _as_vector(data["theta"], "theta", length=n_units)

    gamma = data["gamma"]
    if gamma and isinstance(gamma, list) and isinstance(gamma[0], list):
        out["gamma"] = _as_matrix(gamma, "gamma", rows=n_units, cols=n_units)
        gamma_mat = np.asarray(out["gamma"])
    else:
        out["gamma"] = _as_vector(gamma, "gamma", length=n_units)
        gamma_mat = np.diag(out["gamma"])
    _check_spd(gamma_mat, "gamma")

    out["qx"] = _as_matrix(data["qx"], "qx", rows=n_dim, cols=n_dim)
    _check_spd(np.asarray(out["qx"]), "qx")

    sim = data.get("sim", {})
    _require_keys(sim, "sim", [], optional=["ts", "t_final", "x0", "xr0",
                                            "theta_hat0"])
    out["sim"] = {
        "ts": _as_number(sim.get("ts", 1e-3), "sim.ts", positive=True),
        "t_final": _as_number(sim.get("t_final", 200.0), "sim.t_final",
                              positive=True),
        "x0": _as_vector(sim.get("x0", [0.0] * n_dim), "sim.x0", length=n_dim),
        "xr0": _as_vector(sim.get("xr0", [0.0] * n_dim), "sim.xr0", length=n_dim),
        "theta_hat0": _as_vector(sim.get("theta_hat0", [0.0] * n_units),
                                 "sim.theta_hat0", length=n_units),
    }
    if out["sim"]["t_final"] < out["sim"]["ts"]:
        _fail("sim.t_final", "must be at least one timestep")

    inp = data.get("input", {"kind": "r1"})
    _require_keys(inp, "input", ["kind"], optional=["offset", "terms"])
    if inp["kind"] not in ("r1", "r2", "custom"):
        _fail("input.kind", f"must be r1, r2, or custom, got {inp['kind']!r}")
    norm_inp = {"kind": inp["kind"]}
    if inp["kind"] == "custom":
        norm_inp["offset"] = _as_number(inp.get("offset", 0.0), "input.offset")
        terms = inp.get("terms", [])
        if not isinstance(terms, list):
            _fail("input.terms", "expected a list of [amplitude, omega] pairs")
        norm_terms = []
        for i, pair in enumerate(terms):
            vals = _as_vector(pair, f"input.terms[{i}]", length=2)
            norm_terms.append(vals)
        norm_inp["terms"] = norm_terms
    elif "offset" in inp or "terms" in inp:
        _fail("input", "offset/terms only apply to kind 'custom'")
    out["input"] = norm_inp

    pe = data.get("pe", {})
    _require_keys(pe, "pe", [], optional=["T", "stride", "scan_start",
                                          "scan_end", "rank_tol",
                                          "time_sep_tol"])
    out["pe"] = {
        "T": _as_number(pe.get("T", 20.0), "pe.T", positive=True),
        "stride": _as_number(pe.get("stride", 1.0), "pe.stride", positive=True),
        "scan_start": (None if pe.get("scan_start") is None
                       else _as_number(pe["scan_start"], "pe.scan_start",
                                       nonnegative=True)),
        "scan_end": (None if pe.get("scan_end") is None
                     else _as_number(pe["scan_end"], "pe.scan_end",
                                     positive=True)),
        "rank_tol": _as_number(pe.get("rank_tol", 1e-8), "pe.rank_tol",
                               positive=True),
        "time_sep_tol": (None if pe.get("time_sep_tol") is None
                         else _as_number(pe["time_sep_tol"], "pe.time_sep_tol",
                                         positive=True)),
    }
    start, end = out["pe"]["scan_start"], out["pe"]["scan_end"]
    if start is not None and end is not None and end <= start:
        _fail("pe.scan_end", f"must exceed scan_start, got [{start}, {end}]")

    return out


def _check_spd(m, path):
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * (1.0 + np.abs(m).max())):
        _fail(path, "must be symmetric")
    if np.linalg.eigvalsh(0.5 * (m + m.T)).min() <= 0.0:
        _fail(path, "must be positive definite")


def load_config(path):
    """Parse and validate a config file; errors cite the offending field."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    cfg = ExperimentConfig(data)
    # surface arrangement problems (duplicate hyperplanes, zero rows) at
    # load time rather than first use
    cfg.arrangement()
    return cfg


def save_config(cfg, path):
    data = cfg.to_json_dict() if isinstance(cfg, ExperimentConfig) else cfg
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
