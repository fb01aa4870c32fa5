"""Synthetic 12-lead ECG generation and fidelity evaluation."""

import json

from . import _core
from ._core import (
    Error,
    FormatError,
    InvalidInput,
    ParseError,
    auroc,
    bootstrap_auc_ci,
    detect_r_peaks,
    extract_features,
    feature_names,
    ks_distance,
    load_records,
    median_bandwidth,
    mmd2,
    psd_welch,
    write_record_csv,
)

LEAD_NAMES = list(_core.lead_names)
DEFAULT_BOOTSTRAP_RESAMPLES = _core.default_bootstrap_resamples


def default_config():
    """Default generation config as a dict."""
    return json.loads(_core.default_config())


def _dump(config):
    return "" if config is None else json.dumps(config)


def config_digest(config=None):
    return _core.config_digest(_dump(config))


def synthesize(label="Normal", seed=0, config=None):
    """One record as a dict with 'signals' (12 x n), 'sampling_rate', 'label', 'seed' and lead II 'r_peaks'."""
    return _core.synthesize(_dump(config), label, seed)


def generate_dataset(out_dir, config=None, threads=1):
    """Writes a dataset directory and returns the number of records."""
    return _core.generate_dataset(_dump(config), str(out_dir), threads)


def fidelity_report(real_dir, synthetic_dir, seed=0):
    return json.loads(_core.fidelity_report(str(real_dir), str(synthetic_dir), seed))


__all__ = [
    "DEFAULT_BOOTSTRAP_RESAMPLES",
    "LEAD_NAMES",
    "Error",
    "FormatError",
    "InvalidInput",
    "ParseError",
    "auroc",
    "bootstrap_auc_ci",
    "config_digest",
    "default_config",
    "detect_r_peaks",
    "extract_features",
    "feature_names",
    "fidelity_report",
    "generate_dataset",
    "ks_distance",
    "load_records",
    "median_bandwidth",
    "mmd2",
    "psd_welch",
    "synthesize",
    "write_record_csv",
]
