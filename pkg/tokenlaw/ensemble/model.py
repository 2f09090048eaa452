"""The microstate model: M components sharing T tokens under a per-token cost.

A microstate t = (t_1..t_M) with sum T has multiplicity
W = T! / prod(t_i!) and weight W * exp(-beta * sum t_i eps_i). Its most likely
occupation is the Boltzmann distribution p_i = exp(-beta eps_i) / Q. With
eps_i = I_i / t_i = ln(a_i) that becomes p_i = a_i^-beta / Q, a power law in the
alphabet size.
"""

import logging
import math
from typing import List, Sequence

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator
from scipy.optimize import bisect
from scipy.special import gammaln, logsumexp

from ..errors import EmptyInputError
from ..types import ComponentRecord

logger = logging.getLogger(__name__)


class EnsembleSystem(BaseModel):
    """M components, T tokens, per-token costs epsilon and coupling beta."""
    M: int = Field(..., ge=1, description="Number of components")
    T: int = Field(..., ge=1, description="Total tokens")
    epsilon: List[float] = Field(..., description="Per-token cost of each component")
    beta: float = Field(default=0.0, description="Lagrange multiplier of the cost constraint")

    @field_validator("epsilon")
    @classmethod
    def _finite(cls, value: List[float]) -> List[float]:
        if not all(math.isfinite(e) for e in value):
            raise ValueError("epsilon must be finite")
        return value

    @model_validator(mode="after")
    def _check_shape(self) -> "EnsembleSystem":
        if len(self.epsilon) != self.M:
            raise ValueError(f"epsilon has {len(self.epsilon)} entries for M={self.M}")
        if not math.isfinite(self.beta):
            raise ValueError("beta must be finite")
        return self

    @classmethod
    def from_alphabets(cls, alphabet_sizes: Sequence[int], T: int, beta: float) -> "EnsembleSystem":
        """System with eps_i = ln(a_i)."""
        if any(a < 1 for a in alphabet_sizes):
            raise ValueError("alphabet sizes must be positive")
        return cls(M=len(alphabet_sizes), T=T, epsilon=[math.log(a) for a in alphabet_sizes], beta=beta)

    @property
    def undersupplied(self) -> bool:
        """Fewer tokens than components, so every state leaves some component empty."""
        return self.T < self.M

    @property
    def eps(self) -> np.ndarray:
        return np.asarray(self.epsilon, dtype=float)

    def U(self, state: "Microstate") -> float:
        """Total constrained quantity sum t_i eps_i of a state."""
        return float(np.dot(np.asarray(state.t, dtype=float), self.eps))


class Microstate(BaseModel):
    """One assignment of tokens to components."""
    t: List[int] = Field(..., min_length=1, description="Tokens per component")

    @field_validator("t")
    @classmethod
    def _non_negative(cls, value: List[int]) -> List[int]:
        if any(x < 0 for x in value):
            raise ValueError("token counts must be non-negative")
        return value

    @property
    def T(self) -> int:
        return sum(self.t)

    @property
    def has_empty_component(self) -> bool:
        return any(x == 0 for x in self.t)

    def check(self, system: EnsembleSystem) -> None:
        if len(self.t) != system.M or self.T != system.T:
            raise ValueError(f"state {self.t} does not fit M={system.M}, T={system.T}")


class EquilibriumPrediction(BaseModel):
    """Most likely occupation of a system."""
    p: List[float] = Field(..., description="Probability of a token sitting in each component")
    t_star: List[float] = Field(..., description="Expected tokens per component, T * p")
    partition: float = Field(..., gt=0.0, description="Q(beta) = sum exp(-beta eps_i)")
    log_partition: float = Field(..., description="ln Q(beta)")


def multinomial_weight(state: Microstate) -> float:
    """ln W = ln T! - sum ln t_i!, via log-gamma."""
    t = np.asarray(state.t, dtype=float)
    return float(gammaln(t.sum() + 1.0) - gammaln(t + 1.0).sum())


def boltzmann_equilibrium(system: EnsembleSystem) -> EquilibriumPrediction:
    """Occupation probabilities p_i = exp(-beta eps_i) / Q and t* = T p.

    Computed with a max shift (log-sum-exp) so large beta or eps cannot overflow.
    """
    logits = -system.beta * system.eps
    log_q = float(logsumexp(logits))
    p = np.exp(logits - log_q)
    p /= p.sum()
    return EquilibriumPrediction(
        p=p.tolist(),
        t_star=(system.T * p).tolist(),
        partition=math.exp(log_q) if log_q < 700 else float("inf"),
        log_partition=log_q,
    )


def information_epsilon(records: Sequence[ComponentRecord]) -> List[float]:
    """Per-token information I_i / t_i = ln(a_i) of each record.

    Raises:
        EmptyInputError: If there are no records
    """
    if not records:
        raise EmptyInputError("no records to derive epsilon from")
    return [record.info / record.t for record in records]


def expected_U(epsilon: Sequence[float], T: int, beta: float) -> float:
    """Expected sum t_i eps_i under the equilibrium at ``beta``."""
    system = EnsembleSystem(M=len(epsilon), T=T, epsilon=list(epsilon), beta=beta)
    return float(np.dot(boltzmann_equilibrium(system).t_star, system.eps))


def solve_beta(
    epsilon: Sequence[float],
    T: int,
    target_U: float,
    bracket: float = 50.0,
    xtol: float = 1e-12,
) -> float:
    """Find beta whose equilibrium gives expected U equal to ``target_U``.

    Expected U decreases monotonically in beta, from T*max(eps) to T*min(eps),
    so the root is bracketed and found by bisection.

    Raises:
        ValueError: If the target is outside the reachable range
    """
    low, high = T * min(epsilon), T * max(epsilon)
    if low == high == target_U:
        return 0.0
    if not low < target_U < high:
        raise ValueError(f"target U={target_U} outside reachable range [{low}, {high}]")

    def gap(beta: float) -> float:
        return expected_U(epsilon, T, beta) - target_U

    lo, hi = -bracket, bracket
    while gap(lo) < 0:
        lo *= 2
    while gap(hi) > 0:
        hi *= 2
    beta = float(bisect(gap, lo, hi, xtol=xtol))
    logger.debug(f"Solved beta={beta:.6g} for U={target_U}")
    return beta


def enumeration_size(T: int, M: int) -> int:
    """Number of compositions of T into M non-negative parts."""
    return math.comb(T + M - 1, M - 1)
