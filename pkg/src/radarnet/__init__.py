"""Simulation and analysis of mutual interference between FMCW automotive radars."""

from ._validation import DomainError, NumericalError, ParameterError
from .detection import (
    LinearClassifier,
    SpectralFeatureExtractor,
    classify,
    gen_synthetic_dataset,
    train_classifier,
)
from .diversity import DiversityPolicy, gate_by_duration, if_interference_duration
from .interference import (
    InterferenceStage,
    NetworkGeometry,
    TimingModel,
    is_interfered,
    mc_experiment,
    prob_bound_poisson,
    prob_bound_single,
)
from .multiuser import DelayPoly, divide_multi, divide_single, freq_domain_estimate
from .rx_chain import IFConfig, estimate_range, estimate_velocity, synth_if_output
from .stats import exponential_fit_test
from .traffic import EventLog, ScenarioConfig, run_scenario
from .waveform import ChirpConfig, synth_chirp
from .worldline import WorldLineClusterer, cluster_worldlines, make_cloud

__version__ = "0.1.0"

__all__ = [
    "ChirpConfig", "DelayPoly", "DiversityPolicy", "DomainError", "EventLog", "IFConfig",
    "InterferenceStage", "LinearClassifier", "NetworkGeometry", "NumericalError", "ParameterError",
    "ScenarioConfig", "SpectralFeatureExtractor", "TimingModel", "WorldLineClusterer", "classify",
    "cluster_worldlines", "divide_multi", "divide_single", "estimate_range", "estimate_velocity",
    "exponential_fit_test", "freq_domain_estimate", "gate_by_duration", "gen_synthetic_dataset",
    "if_interference_duration", "is_interfered", "make_cloud", "mc_experiment", "prob_bound_poisson",
    "prob_bound_single", "run_scenario", "synth_chirp", "synth_if_output", "train_classifier",
]
