"""Brute-force distribution over every microstate of a small system."""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp

from ..config import DEFAULT_MAX_STATES, ERROR_MESSAGES
from ..errors import StateSpaceTooLargeError
from .model import EnsembleSystem, Microstate, enumeration_size

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExactDistribution:
    """Probability of every composition of T into M parts.

    ``states`` has one row per microstate; ``probabilities`` sums to 1.
    """
    system: EnsembleSystem
    states: np.ndarray
    probabilities: np.ndarray

    def as_mapping(self) -> Dict[Tuple[int, ...], float]:
        return {tuple(int(x) for x in row): float(p) for row, p in zip(self.states, self.probabilities)}

    @property
    def marginal_means(self) -> np.ndarray:
        return self.probabilities @ self.states

    @property
    def marginal_stds(self) -> np.ndarray:
        second = self.probabilities @ (self.states.astype(float) ** 2)
        return np.sqrt(np.maximum(second - self.marginal_means ** 2, 0.0))

    @property
    def mode(self) -> Microstate:
        """Most probable microstate (first one on ties)."""
        return Microstate(t=[int(x) for x in self.states[int(np.argmax(self.probabilities))]])

    @property
    def empty_component_mass(self) -> float:
        """Probability of states in which some component holds no token."""
        return float(self.probabilities[(self.states == 0).any(axis=1)].sum())

    def marginal_histogram(self, component: int) -> np.ndarray:
        """P(t_component = k) for k = 0..T."""
        return np.bincount(
            self.states[:, component], weights=self.probabilities, minlength=self.system.T + 1
        )


def compositions(T: int, M: int) -> np.ndarray:
    """All compositions of T into M non-negative parts, one per row, in lexicographic bar order."""
    if M == 1:
        return np.array([[T]], dtype=np.int64)
    bars = np.array(list(itertools.combinations(range(T + M - 1), M - 1)), dtype=np.int64)
    edges = np.hstack([
        np.full((bars.shape[0], 1), -1, dtype=np.int64),
        bars,
        np.full((bars.shape[0], 1), T + M - 1, dtype=np.int64),
    ])
    return np.diff(edges, axis=1) - 1


def enumerate_exact(system: EnsembleSystem, max_states: int = DEFAULT_MAX_STATES) -> ExactDistribution:
    """Exact distribution P(t) proportional to W(t) * exp(-beta * sum t_i eps_i).

    Args:
        system: The system to enumerate
        max_states: Largest number of compositions to materialise

    Returns:
        ExactDistribution over all C(T+M-1, M-1) compositions

    Raises:
        StateSpaceTooLargeError: If the composition count exceeds ``max_states``
    """
    count = enumeration_size(system.T, system.M)
    if count > max_states:
        raise StateSpaceTooLargeError(
            ERROR_MESSAGES["state_space"].format(states=count, max_states=max_states)
        )
    states = compositions(system.T, system.M)
    log_w = gammaln(system.T + 1.0) - gammaln(states + 1.0).sum(axis=1)
    log_p = log_w - system.beta * (states @ system.eps)
    log_p -= logsumexp(log_p)
    probabilities = np.exp(log_p)
    probabilities /= probabilities.sum()
    logger.debug(f"Enumerated {count} states for T={system.T}, M={system.M}, beta={system.beta}")
    return ExactDistribution(system=system, states=states, probabilities=probabilities)
