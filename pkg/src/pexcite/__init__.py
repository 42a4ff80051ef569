"""Persistency-of-excitation verification for step/ReLU feature vectors.

The package checks excitation of a feature trajectory two ways: directly,
through sliding-window Gramian eigenvalue scans, and geometrically,
through sufficient-condition certificates on the sequence of activation
regions the state visits. A model-reference adaptive control simulation
ties the two together: parameter estimates converge exactly when the
certificate conditions hold along the closed-loop trajectory.
"""

from .activation import Activation, Relu, ScaledStep, active_submatrices, phi
from .config import ExperimentConfig, default_config, load_config
from .excitation import (
    CertificateReport,
    PeScanResult,
    RankProbeConfig,
    certify,
    gramian,
    pe_scan,
)
from .geometry import (
    HyperplaneArrangement,
    RegionCatalog,
    SignVector,
    classify,
    enumerate_regions,
    region_feasible,
    transition_kind,
)
from .mrac import (
    AdaptationConfig,
    CanonicalPlant,
    ReferenceInput,
    ReferenceModel,
    SimResult,
    compute_c,
    ltv_error_sim,
    matching_gains,
    reference_input,
    simulate,
)
from .trajectory import Segmentation, Trajectory, segment, window

__version__ = "0.1.0"

__all__ = [
    "Activation", "Relu", "ScaledStep", "active_submatrices", "phi",
    "ExperimentConfig", "default_config", "load_config",
    "CertificateReport", "PeScanResult", "RankProbeConfig",
    "certify", "gramian", "pe_scan",
    "HyperplaneArrangement", "RegionCatalog", "SignVector",
    "classify", "enumerate_regions", "region_feasible", "transition_kind",
    "AdaptationConfig", "CanonicalPlant", "ReferenceInput", "ReferenceModel",
    "SimResult", "compute_c", "ltv_error_sim", "matching_gains",
    "reference_input", "simulate",
    "Segmentation", "Trajectory", "segment", "window",
    "__version__",
]
