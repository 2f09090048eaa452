"""Microstate model, exact enumeration and Metropolis sampling."""

from .exact import ExactDistribution, compositions, enumerate_exact
from .experiment import (
    AlphabetGrid,
    EmergenceResult,
    ExperimentConfig,
    ExperimentKind,
    ExperimentResult,
    OracleComparison,
    alphabet_ccdf,
    compare_to_exact,
    load_experiment_config,
    powerlaw_emergence_experiment,
    run_experiment,
)
from .model import (
    EnsembleSystem,
    EquilibriumPrediction,
    Microstate,
    boltzmann_equilibrium,
    enumeration_size,
    expected_U,
    information_epsilon,
    multinomial_weight,
    solve_beta,
)
from .sampler import SampleSummary, initial_state, merge_summaries, metropolis_sample, sample_chains

__all__ = [
    "AlphabetGrid",
    "EmergenceResult",
    "EnsembleSystem",
    "EquilibriumPrediction",
    "ExactDistribution",
    "ExperimentConfig",
    "ExperimentKind",
    "ExperimentResult",
    "Microstate",
    "OracleComparison",
    "SampleSummary",
    "alphabet_ccdf",
    "boltzmann_equilibrium",
    "compare_to_exact",
    "compositions",
    "enumerate_exact",
    "enumeration_size",
    "expected_U",
    "information_epsilon",
    "initial_state",
    "load_experiment_config",
    "merge_summaries",
    "metropolis_sample",
    "multinomial_weight",
    "powerlaw_emergence_experiment",
    "run_experiment",
    "sample_chains",
    "solve_beta",
]
