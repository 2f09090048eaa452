"""Metropolis sampler over microstates.

Each step proposes moving one token from a uniformly chosen component to a
different uniformly chosen component. The proposal is symmetric, so a move from
t to t' is accepted with probability min(1, W(t') exp(-beta U(t')) / W(t) exp(-beta U(t))),
which for a single transfer i -> j is

    t_i / (t_j + 1) * exp(beta * (eps_i - eps_j)).

Moves out of an empty component are rejected. Every visited state keeps
sum t_i = T and epsilon never changes.

Statistics are collected by dwell time: a component's size is only touched when
it changes, so a step costs O(1) whatever M is.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..config import DEFAULT_BATCHES, DEFAULT_BURN_IN_FRACTION, SAMPLER_CHUNK
from ..errors import ConfigError
from .model import EnsembleSystem, Microstate

logger = logging.getLogger(__name__)


@dataclass
class SampleSummary:
    """What a chain saw after burn-in."""
    steps: int
    burn_in: int
    seed: int
    accepted: int
    means: np.ndarray
    stderr: np.ndarray
    histograms: np.ndarray = field(repr=False)
    final_state: Microstate = field(repr=False)
    batch_means: np.ndarray = field(repr=False)

    @property
    def recorded_steps(self) -> int:
        return self.steps - self.burn_in

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.steps if self.steps else 0.0

    @property
    def half_drift(self) -> float:
        """Largest gap between first-half and second-half batch means, in standard errors.

        A convergence diagnostic only; large values suggest a longer burn-in.
        """
        half = self.batch_means.shape[0] // 2
        if half < 2:
            return 0.0
        first, second = self.batch_means[:half], self.batch_means[half:]
        spread = np.sqrt(
            first.var(axis=0, ddof=1) / first.shape[0] + second.var(axis=0, ddof=1) / second.shape[0]
        )
        gap = np.abs(first.mean(axis=0) - second.mean(axis=0))
        ratios = np.divide(gap, spread, out=np.zeros_like(gap), where=spread > 0)
        return float(ratios.max())

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready form; histograms are sparse ``{size: steps}`` maps."""
        return {
            "steps": self.steps,
            "burn_in": self.burn_in,
            "seed": self.seed,
            "acceptance_rate": self.acceptance_rate,
            "half_drift": self.half_drift,
            "means": self.means.tolist(),
            "stderr": self.stderr.tolist(),
            "final_state": self.final_state.t,
            "histograms": [
                {str(k): int(row[k]) for k in np.flatnonzero(row)} for row in self.histograms
            ],
        }


def initial_state(T: int, M: int) -> List[int]:
    """Tokens split as evenly as possible, the remainder to the first components."""
    base, extra = divmod(T, M)
    return [base + 1 if i < extra else base for i in range(M)]


def metropolis_sample(
    system: EnsembleSystem,
    steps: int,
    seed: int,
    burn_in: Optional[int] = None,
    batches: int = DEFAULT_BATCHES,
) -> SampleSummary:
    """Run one Metropolis chain.

    Args:
        system: System to sample; requires T >= M
        steps: Total steps, burn-in included
        seed: Seed for ``numpy.random.default_rng``; equal seeds give equal output
        burn_in: Steps discarded first; 10% of ``steps`` by default
        batches: Batches for batch-means standard errors

    Returns:
        SampleSummary with per-component mean sizes, their standard errors and
        the histogram of steps spent at each size

    Raises:
        ConfigError: If T < M, or steps do not leave at least one step per batch
            after burn-in
    """
    T, M = system.T, system.M
    if T < M:
        raise ConfigError(f"sampler needs T >= M, got T={T}, M={M}")
    if burn_in is None:
        burn_in = int(steps * DEFAULT_BURN_IN_FRACTION)
    if batches < 2:
        raise ConfigError(f"need at least 2 batches, got {batches}")
    if burn_in < 0 or steps - burn_in < batches:
        raise ConfigError(
            f"steps={steps} must exceed burn_in={burn_in} by at least {batches} recorded steps"
        )

    rng = np.random.default_rng(seed)
    t = initial_state(T, M)
    logs = [-math.inf] + [math.log(k) for k in range(1, T + 2)]
    be = (system.beta * system.eps).tolist()
    hist: List[List[int]] = [[0] * (T + 1) for _ in range(M)]
    batch_sums = np.zeros((batches, M))

    recorded = steps - burn_in
    size = recorded // batches
    bounds = [0, burn_in] + [burn_in + b * size for b in range(1, batches)] + [steps]

    src: List[int] = []
    dst: List[int] = []
    logu: List[float] = []
    k = 0
    accepted = 0

    for segment in range(len(bounds) - 1):
        a, e = bounds[segment], bounds[segment + 1]
        recording = segment > 0
        since = [a] * M
        sums = [0] * M
        # a single component never moves
        stop = a if M == 1 else e
        for s in range(a, stop):
            if k == len(src):
                n = SAMPLER_CHUNK
                src = rng.integers(0, M, n).tolist()
                dst = rng.integers(0, M - 1, n).tolist()
                logu = np.log(rng.random(n)).tolist()
                k = 0
            i = src[k]
            j = dst[k]
            lu = logu[k]
            k += 1
            if j >= i:
                j += 1
            ti = t[i]
            tj = t[j]
            if lu < logs[ti] - logs[tj + 1] + be[i] - be[j]:
                accepted += 1
                if recording:
                    d = s - since[i]
                    if d:
                        hist[i][ti] += d
                        sums[i] += ti * d
                    d = s - since[j]
                    if d:
                        hist[j][tj] += d
                        sums[j] += tj * d
                since[i] = s
                since[j] = s
                t[i] = ti - 1
                t[j] = tj + 1
        if recording:
            for c in range(M):
                d = e - since[c]
                if d:
                    hist[c][t[c]] += d
                    sums[c] += t[c] * d
            batch_sums[segment - 1] = sums

    if sum(t) != T:
        raise RuntimeError(f"token count drifted to {sum(t)} from {T}")

    lengths = np.diff(np.asarray(bounds[1:], dtype=float))
    batch_means = batch_sums / lengths[:, None]
    means = batch_sums.sum(axis=0) / recorded
    stderr = batch_means.std(axis=0, ddof=1) / math.sqrt(batches)

    summary = SampleSummary(
        steps=steps,
        burn_in=burn_in,
        seed=seed,
        accepted=accepted,
        means=means,
        stderr=stderr,
        histograms=np.asarray(hist, dtype=np.int64),
        final_state=Microstate(t=list(t)),
        batch_means=batch_means,
    )
    logger.debug(
        f"Sampled {steps} steps (burn-in {burn_in}) for M={M}, T={T}: "
        f"acceptance {summary.acceptance_rate:.3f}"
    )
    return summary


def merge_summaries(summaries: Sequence[SampleSummary]) -> SampleSummary:
    """Pool independent chains of one system.

    Means are weighted by recorded steps, histograms add, and standard errors
    come from the pooled batch means. Seed and final state are the first chain's.
    """
    if not summaries:
        raise ValueError("no chains to merge")
    if len(summaries) == 1:
        return summaries[0]
    recorded = np.array([s.recorded_steps for s in summaries], dtype=float)
    means = np.average(np.vstack([s.means for s in summaries]), axis=0, weights=recorded)
    batch_means = np.vstack([s.batch_means for s in summaries])
    first = summaries[0]
    return SampleSummary(
        steps=sum(s.steps for s in summaries),
        burn_in=sum(s.burn_in for s in summaries),
        seed=first.seed,
        accepted=sum(s.accepted for s in summaries),
        means=means,
        stderr=batch_means.std(axis=0, ddof=1) / math.sqrt(batch_means.shape[0]),
        histograms=np.sum([s.histograms for s in summaries], axis=0),
        final_state=first.final_state,
        batch_means=batch_means,
    )


def sample_chains(
    system: EnsembleSystem,
    steps: int,
    seeds: Sequence[int],
    burn_in: Optional[int] = None,
    batches: int = DEFAULT_BATCHES,
    jobs: int = 1,
) -> SampleSummary:
    """Run one chain per seed, in worker processes when ``jobs > 1``, and pool them."""
    if jobs <= 1 or len(seeds) <= 1:
        results = [metropolis_sample(system, steps, seed, burn_in, batches) for seed in seeds]
    else:
        by_seed: Dict[int, SampleSummary] = {}
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = {
                executor.submit(metropolis_sample, system, steps, seed, burn_in, batches): seed
                for seed in seeds
            }
            for future in as_completed(futures):
                by_seed[futures[future]] = future.result()
        results = [by_seed[seed] for seed in seeds]
    logger.info(f"Pooled {len(results)} chains of {steps} steps")
    return merge_summaries(results)
