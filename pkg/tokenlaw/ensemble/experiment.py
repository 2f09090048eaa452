"""Experiments over the microstate model.

Two kinds are supported:

* ``system``: one explicit system, enumerated exactly when small enough and
  sampled when asked to (or when enumeration is out of reach). When both run,
  the sampled means are compared against the exact ones in standard errors.
* ``emergence``: components with eps_i = ln(a_i) are sampled and the mean
  sizes are tested for the a^-beta power law, reported as a ccdf exponent.
"""

import json
import logging
import math
import time
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from ..config import DEFAULT_BATCHES, DEFAULT_MAX_STATES, ERROR_MESSAGES
from ..distfit import fit_loglog, fit_tail
from ..errors import AnalysisError, ConfigError, StateSpaceTooLargeError
from ..types import CcdfCurve, EcdfPoint, LinearFit, Measure
from .exact import enumerate_exact
from .model import EnsembleSystem, EquilibriumPrediction, boltzmann_equilibrium, enumeration_size
from .sampler import SampleSummary, sample_chains

logger = logging.getLogger(__name__)


class ExperimentKind(str, Enum):
    """What an experiment configuration runs."""
    SYSTEM = "system"
    EMERGENCE = "emergence"


class AlphabetGrid(BaseModel):
    """Geometric grid of alphabet sizes, rounded to distinct integers."""
    start: int = Field(..., ge=1, description="Smallest alphabet size")
    stop: int = Field(..., ge=1, description="Largest alphabet size")
    num: int = Field(..., ge=1, description="Grid points before rounding")

    @model_validator(mode="after")
    def _ordered(self) -> "AlphabetGrid":
        if self.stop < self.start:
            raise ValueError(f"grid stop {self.stop} is below start {self.start}")
        return self

    def sizes(self) -> List[int]:
        grid = np.round(np.geomspace(self.start, self.stop, self.num)).astype(int)
        return [int(a) for a in np.unique(grid)]


class ExperimentConfig(BaseModel):
    """JSON experiment configuration.

    Exactly one of ``epsilon``, ``alphabet_sizes`` or ``alphabet_grid`` gives the
    per-token costs; alphabet sizes mean eps_i = ln(a_i).
    """
    name: str = Field(default="experiment", description="Label carried into the results")
    kind: ExperimentKind = Field(default=ExperimentKind.SYSTEM)
    M: Optional[int] = Field(None, ge=1, description="Component count; inferred when omitted")
    T: int = Field(..., ge=1, description="Total tokens")
    beta: float = Field(default=0.0, description="Coupling of the information constraint")
    epsilon: Optional[List[float]] = Field(None, description="Per-token costs")
    alphabet_sizes: Optional[List[int]] = Field(None, description="Alphabet size per component")
    alphabet_grid: Optional[AlphabetGrid] = Field(None, description="Generated alphabet sizes")
    steps: Optional[int] = Field(None, ge=1, description="Sampler steps per chain")
    seed: int = Field(default=0, description="Seed of the first chain")
    burn_in: Optional[int] = Field(None, ge=0, description="Discarded steps per chain")
    batches: int = Field(default=DEFAULT_BATCHES, ge=2, description="Batches for standard errors")
    chains: int = Field(default=1, ge=1, description="Independent chains, seeds seed..seed+chains-1")
    max_states: int = Field(default=DEFAULT_MAX_STATES, ge=1, description="Enumeration budget")
    sampler_fallback: bool = Field(default=True, description="Sample when enumeration is infeasible")

    @model_validator(mode="after")
    def _check_costs(self) -> "ExperimentConfig":
        given = [v for v in (self.epsilon, self.alphabet_sizes, self.alphabet_grid) if v is not None]
        if len(given) != 1:
            raise ValueError("give exactly one of epsilon, alphabet_sizes, alphabet_grid")
        if self.alphabet_sizes is not None and any(a < 1 for a in self.alphabet_sizes):
            raise ValueError("alphabet sizes must be positive")
        count = len(self.costs())
        if self.M is not None and self.M != count:
            raise ValueError(f"M={self.M} but {count} costs were given")
        if self.kind is ExperimentKind.EMERGENCE:
            if self.epsilon is not None:
                raise ValueError("an emergence experiment needs alphabet sizes, not epsilon")
            if self.steps is None:
                raise ValueError("an emergence experiment needs steps")
        return self

    def alphabets(self) -> Optional[List[int]]:
        if self.alphabet_grid is not None:
            return self.alphabet_grid.sizes()
        return self.alphabet_sizes

    def costs(self) -> List[float]:
        sizes = self.alphabets()
        if sizes is not None:
            return [math.log(a) for a in sizes]
        return list(self.epsilon or [])

    def system(self) -> EnsembleSystem:
        costs = self.costs()
        return EnsembleSystem(M=len(costs), T=self.T, epsilon=costs, beta=self.beta)

    def seeds(self, seed: Optional[int] = None) -> List[int]:
        first = self.seed if seed is None else seed
        return [first + k for k in range(self.chains)]


class OracleComparison(BaseModel):
    """Sampled against exact mean size of one component."""
    component: int
    exact_mean: float
    sampled_mean: float
    stderr: float
    delta: float
    delta_in_stderr: Optional[float] = Field(None, description="None when the standard error is 0")


class EmergenceResult(BaseModel):
    """Outcome of a power-law emergence run."""
    alphabet_sizes: List[int]
    beta: float
    T: int
    steps: int
    seed: int
    means: List[float] = Field(..., description="Sampled mean size per component")
    stderr: List[float] = Field(..., description="Batch-means standard error per component")
    t_star: List[float] = Field(..., description="Equilibrium mean size per component")
    max_relative_deviation: float = Field(..., description="max |mean - t*| / t* over components")
    acceptance_rate: float
    density_fit: Optional[LinearFit] = Field(None, description="ln(mean t) on ln(a) over distinct a")
    recovered_exponent: Optional[float] = Field(None, description="Density slope + 1, the ccdf exponent")
    exponent_source: str = Field(
        default="density slope + 1", description="Quantity recovered_exponent is computed from"
    )
    target_exponent: float = Field(..., description="-beta + 1")
    delta: Optional[float] = Field(None, description="recovered_exponent - target_exponent")
    ccdf: Optional[CcdfCurve] = Field(None, description="Cell-weighted token ccdf over alphabet size")
    ccdf_fit: Optional[LinearFit] = Field(
        None, description="Fit of the cell-weighted ccdf over its smallest decade; a cross-check, not the exponent"
    )
    degenerate: bool = Field(default=False, description="Every component has the same alphabet")


class ExperimentResult(BaseModel):
    """Everything a ``simulate`` run reports."""
    name: str
    kind: ExperimentKind
    method: str = Field(..., description="exact, sampler or exact+sampler")
    system: EnsembleSystem
    equilibrium: EquilibriumPrediction
    states: Optional[int] = Field(None, description="Composition count when enumerated")
    exact_means: Optional[List[float]] = None
    exact_stds: Optional[List[float]] = None
    exact_mode: Optional[List[int]] = None
    empty_component_mass: Optional[float] = None
    undersupplied: bool = Field(default=False, description="T < M; no state fills every component")
    sample: Optional[Dict[str, Any]] = None
    oracle: List[OracleComparison] = Field(default_factory=list)
    max_delta_in_stderr: Optional[float] = None
    emergence: Optional[EmergenceResult] = None
    elapsed: float = Field(default=0.0, ge=0.0, description="Wall-clock seconds")


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read and validate a JSON experiment configuration.

    Raises:
        ConfigError: If the file is missing, is not JSON, or fails validation
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(ERROR_MESSAGES["file_not_found"].format(file=path))
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(ERROR_MESSAGES["invalid_json"].format(file=path, error=e)) from e
    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment configuration '{path}': {e}") from e
    logger.debug(f"Loaded experiment '{config.name}' ({config.kind.value}) from {path}")
    return config


def compare_to_exact(exact_means: Sequence[float], sample: SampleSummary) -> List[OracleComparison]:
    """Per-component gap between sampled and exact means."""
    comparisons = []
    for i, (exact, sampled, se) in enumerate(zip(exact_means, sample.means, sample.stderr)):
        delta = float(sampled - exact)
        comparisons.append(
            OracleComparison(
                component=i,
                exact_mean=float(exact),
                sampled_mean=float(sampled),
                stderr=float(se),
                delta=delta,
                delta_in_stderr=abs(delta) / float(se) if se > 0 else None,
            )
        )
    return comparisons


def _density_fit(sizes: np.ndarray, means: np.ndarray) -> Optional[LinearFit]:
    """ln(mean size) on ln(a), one point per distinct a with a positive mean."""
    distinct = np.unique(sizes)
    grouped = np.array([means[sizes == a].mean() for a in distinct])
    keep = grouped > 0
    if (~keep).any():
        logger.warning(f"Dropping {int((~keep).sum())} alphabet sizes whose sampled mean is 0")
    if keep.sum() < 3:
        return None
    return fit_loglog(distinct[keep], grouped[keep], allow_constant_response=True)


def alphabet_ccdf(alphabet_sizes: Sequence[int], means: Sequence[float]) -> Optional[CcdfCurve]:
    """Token mass at or above each alphabet size, per unit of alphabet size.

    Each distinct size stands for a cell bounded by the geometric midpoints to
    its neighbours, weighted by the mean component size there, so a geometric
    grid does not tilt the curve. A point counts the upper half of its own cell
    and every cell above it; the last cell is symmetric about its size.

    Returns:
        The curve, or None with fewer than two distinct sizes of positive mean
    """
    sizes = np.asarray(alphabet_sizes, dtype=np.int64)
    means = np.asarray(means, dtype=float)
    distinct = np.unique(sizes)
    density = np.array([means[sizes == a].mean() for a in distinct])
    keep = density > 0
    distinct, density = distinct[keep], density[keep]
    if distinct.size < 2:
        return None

    a = distinct.astype(float)
    edges = np.sqrt(a[:-1] * a[1:])
    upper = np.append(edges - a[:-1], a[-1] - edges[-1])
    lower = np.insert(a[1:] - edges, 0, 0.0)
    lower_mass = density * lower
    cells = density * upper + lower_mass
    mass = np.cumsum(cells[::-1])[::-1] - lower_mass

    points: List[EcdfPoint] = []
    for s, count in zip(distinct, np.rint(mass).astype(np.int64)):
        if count >= 1 and (not points or count < points[-1].count):
            points.append(EcdfPoint(s=int(s), count=int(count)))
    if not points:
        return None
    return CcdfCurve(measure=Measure.ALPHABET, n_inputs=int(sizes.size), weighted=True, points=points)


def _lower_decade_fit(curve: Optional[CcdfCurve]) -> Optional[LinearFit]:
    """Fit of the cell-weighted ccdf over its smallest decade of alphabet sizes."""
    if curve is None:
        return None
    s_min = curve.points[0].s
    try:
        return fit_tail(curve, s_min, 10 * s_min)
    except AnalysisError as e:
        logger.info(f"No ccdf fit for the emergence run: {e}")
        return None


def powerlaw_emergence_experiment(
    alphabet_sizes: Sequence[int],
    beta: float,
    T: int,
    steps: int,
    seed: int,
    burn_in: Optional[int] = None,
    batches: int = DEFAULT_BATCHES,
    chains: int = 1,
    jobs: int = 1,
) -> EmergenceResult:
    """Sample components with eps_i = ln(a_i) and recover the power-law exponent.

    The sampled mean size of a component estimates T * a^-beta / Q. Its log-log
    slope against a is the density exponent -beta; adding 1 integrates it to the
    ccdf exponent -beta + 1, which is what ``recovered_exponent`` reports.

    The cell-weighted ccdf over a (see ``alphabet_ccdf``) and its fit over the
    smallest decade of alphabet sizes are reported alongside as a cross-check;
    the cutoff at the largest alphabet bends that curve down, so its slope runs
    steeper than -beta + 1.

    Args:
        alphabet_sizes: Alphabet size of each component
        beta: Coupling
        T: Total tokens; at least the number of components
        steps: Sampler steps per chain
        seed: Seed of the first chain
        burn_in: Discarded steps per chain, 10% by default
        batches: Batches for standard errors
        chains: Independent chains to pool
        jobs: Worker processes for the chains

    Returns:
        EmergenceResult; fits are None and ``degenerate`` is set when every
        component has the same alphabet
    """
    system = EnsembleSystem.from_alphabets(alphabet_sizes, T, beta)
    sample = sample_chains(
        system, steps, [seed + k for k in range(chains)], burn_in=burn_in, batches=batches, jobs=jobs
    )
    equilibrium = boltzmann_equilibrium(system)
    t_star = np.asarray(equilibrium.t_star)
    sizes = np.asarray(alphabet_sizes, dtype=np.int64)
    means = sample.means

    degenerate = np.unique(sizes).size == 1
    density_fit = None if degenerate else _density_fit(sizes, means)
    recovered = density_fit.slope + 1.0 if density_fit is not None else None
    target = -beta + 1.0

    ccdf = None if degenerate else alphabet_ccdf(sizes, means)
    ccdf_fit = _lower_decade_fit(ccdf)

    result = EmergenceResult(
        alphabet_sizes=[int(a) for a in sizes],
        beta=beta,
        T=T,
        steps=steps,
        seed=seed,
        means=means.tolist(),
        stderr=sample.stderr.tolist(),
        t_star=t_star.tolist(),
        max_relative_deviation=float(np.max(np.abs(means - t_star) / t_star)),
        acceptance_rate=sample.acceptance_rate,
        density_fit=density_fit,
        recovered_exponent=recovered,
        target_exponent=target,
        delta=recovered - target if recovered is not None else None,
        ccdf=ccdf,
        ccdf_fit=ccdf_fit,
        degenerate=degenerate,
    )
    if recovered is not None:
        logger.info(f"Recovered ccdf exponent {recovered:.4f} against {target:.4f} (beta={beta})")
    else:
        logger.info("Emergence run is degenerate: no exponent to recover")
    return result


def run_experiment(config: ExperimentConfig, seed: Optional[int] = None, jobs: int = 1) -> ExperimentResult:
    """Run a configured experiment.

    A ``system`` experiment enumerates when the composition count fits
    ``max_states``; it samples when ``steps`` is given, or when enumeration is
    infeasible and ``sampler_fallback`` allows it.

    Args:
        config: Validated configuration
        seed: Overrides the configured seed
        jobs: Worker processes for independent chains

    Raises:
        StateSpaceTooLargeError: Enumeration infeasible and sampling not possible
        ConfigError: Sampler preconditions fail
    """
    started = time.perf_counter()
    system = config.system()
    equilibrium = boltzmann_equilibrium(system)
    result = ExperimentResult(
        name=config.name,
        kind=config.kind,
        method="sampler",
        system=system,
        equilibrium=equilibrium,
        undersupplied=system.undersupplied,
    )
    if system.undersupplied:
        logger.warning(f"'{config.name}' has T={system.T} < M={system.M}: every state leaves a component empty")

    if config.kind is ExperimentKind.EMERGENCE:
        seeds = config.seeds(seed)
        result.emergence = powerlaw_emergence_experiment(
            config.alphabets() or [],
            config.beta,
            config.T,
            config.steps or 0,
            seeds[0],
            burn_in=config.burn_in,
            batches=config.batches,
            chains=config.chains,
            jobs=jobs,
        )
        result.elapsed = time.perf_counter() - started
        return result

    states = enumeration_size(system.T, system.M)
    feasible = states <= config.max_states
    methods = []
    if feasible:
        exact = enumerate_exact(system, max_states=config.max_states)
        methods.append("exact")
        result.states = states
        result.exact_means = exact.marginal_means.tolist()
        result.exact_stds = exact.marginal_stds.tolist()
        result.exact_mode = exact.mode.t
        result.empty_component_mass = exact.empty_component_mass
        logger.info(f"Enumerated {states} states of '{config.name}'")

    steps = config.steps
    if steps is None and not feasible:
        if not config.sampler_fallback:
            raise StateSpaceTooLargeError(
                ERROR_MESSAGES["state_space"].format(states=states, max_states=config.max_states)
            )
        steps = max(100 * system.T * system.M, 100_000)
        logger.warning(f"Enumeration infeasible ({states} states); sampling {steps} steps instead")

    if steps is not None:
        sample = sample_chains(
            system, steps, config.seeds(seed), burn_in=config.burn_in, batches=config.batches, jobs=jobs
        )
        methods.append("sampler")
        result.sample = sample.to_dict()
        if result.exact_means is not None:
            result.oracle = compare_to_exact(result.exact_means, sample)
            scored = [c.delta_in_stderr for c in result.oracle if c.delta_in_stderr is not None]
            result.max_delta_in_stderr = max(scored) if scored else None

    result.method = "+".join(methods)
    result.elapsed = time.perf_counter() - started
    return result
