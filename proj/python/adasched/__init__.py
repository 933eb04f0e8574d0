"""Adaptive timestep scheduling and few-step sampling on analytic Gaussian mixtures."""

import json

from . import _core
from ._core import (
    ImportanceCurve,
    MixtureModel,
    NoiseSchedule,
    NumericalError,
    TimestepSchedule,
    adaptive_schedule,
    build_schedule,
    color_balance,
    compounding_scale,
    compute_importance,
    epsilon_prediction,
    equidistant_schedule,
    exposure_correct,
    guide_interpolate,
    guide_negative,
    importance_schedule,
    mixture_from_json,
    mixture_preset,
    mixture_preset_names,
    quantile_clip,
    sample_ground_truth,
    saturation_fraction,
    sliced_wasserstein,
    snr,
    wasserstein_1d,
)

__version__ = "0.1.0"


def _dump(config):
    return json.dumps(config or {})


def normalize_config(config=None):
    """Return the fully resolved experiment config as a dict."""
    return json.loads(_core.normalize_config(_dump(config)))


def run_experiment(config=None, threads=0, include_wall_time=True):
    """Run a sampling experiment; returns (report dict, samples array)."""
    report, samples = _core.run_experiment(_dump(config), threads, include_wall_time)
    return json.loads(report), samples


def importance_csv(config=None):
    return _core.importance_csv(_dump(config))


def timestep_table_csv(config=None):
    return _core.timestep_table_csv(_dump(config))
