"""Per-component and corpus-level measurements."""

import logging
import statistics
from typing import List, Optional, Sequence

from .config import FIXED_ALPHABET_OBSERVATION, GENETIC_ALPHABET
from .errors import DegenerateFitError, EmptyInputError, GeneDataError, InsufficientDataError
from .stats import ols
from .types import AlphabetGrowth, ComponentRecord, ComponentSpan, CorpusSummary, TokenClass

logger = logging.getLogger(__name__)


def component_metrics(span: ComponentSpan) -> ComponentRecord:
    """Measure one component.

    Alphabet members are compared by token symbol, so aliased fixed lexemes count
    once.

    Args:
        span: Component with at least one token

    Returns:
        ComponentRecord with t, the fixed/variable alphabet split and t*ln(a)

    Raises:
        EmptyInputError: If the span has no tokens
    """
    if not span.tokens:
        raise EmptyInputError(f"component '{span.name}' in {span.file} has no tokens")
    fixed = set()
    variable = set()
    for token in span.tokens:
        if token.token_class is TokenClass.FIXED:
            fixed.add(token.symbol)
        else:
            variable.add(token.symbol)
    return ComponentRecord.from_counts(
        name=span.name,
        file=span.file,
        t=len(span.tokens),
        a_fixed=len(fixed),
        a_var=len(variable),
    )


def summarize_corpus(records: Sequence[ComponentRecord]) -> CorpusSummary:
    """Total tokens, components and information over ``records``.

    Raises:
        EmptyInputError: If there are no records
    """
    if not records:
        raise EmptyInputError("cannot summarize an empty corpus")
    summary = CorpusSummary.from_records(list(records))
    logger.debug(f"Corpus summary: T={summary.T}, M={summary.M}, I={summary.I:.3f}")
    return summary


def genetic_metrics(sequence: str, name: str = "sequence", file: str = "-") -> ComponentRecord:
    """Measure a nucleotide sequence as one component over {a, c, g, t}.

    Whitespace is ignored and case is folded. Every base is a variable token, so
    a_fixed is always 0.

    Raises:
        EmptyInputError: If the sequence has no bases
        GeneDataError: If a character is not a base; the message names its position
    """
    bases = []
    for position, char in enumerate(sequence, start=1):
        if char.isspace():
            continue
        base = char.lower()
        if base not in GENETIC_ALPHABET:
            raise GeneDataError(f"invalid base {char!r} at position {position} of '{name}'")
        bases.append(base)
    if not bases:
        raise EmptyInputError(f"sequence '{name}' has no bases")
    return ComponentRecord.from_counts(name=name, file=file, t=len(bases), a_fixed=0, a_var=len(set(bases)))


def _median(values: List[float]) -> Optional[float]:
    return statistics.median(values) if values else None


def alphabet_growth_regression(records: Sequence[ComponentRecord]) -> AlphabetGrowth:
    """Regress the fixed alphabet a_fixed on component size t.

    A slope near zero means components draw on a fixed alphabet that does not
    grow with their size. The variable/fixed ratio is reported per record and as
    medians of the components at or below, and above, the median size.

    Raises:
        InsufficientDataError: If there are fewer than 3 records
        DegenerateFitError: If every record has the same t
    """
    if len(records) < 3:
        raise InsufficientDataError(f"alphabet growth needs at least 3 records, got {len(records)}")
    sizes = [record.t for record in records]
    if len(set(sizes)) == 1:
        raise DegenerateFitError(
            f"degenerate fit: every record has t={sizes[0]}", zero_variance="x"
        )
    fit = ols(sizes, [record.a_fixed for record in records], allow_constant_response=True)

    ratios = [record.a_var / record.a_fixed if record.a_fixed else None for record in records]
    split = statistics.median(sizes)
    small = [r for record, r in zip(records, ratios) if r is not None and record.t <= split]
    large = [r for record, r in zip(records, ratios) if r is not None and record.t > split]
    below = sum(1 for record in records if record.a_fixed < FIXED_ALPHABET_OBSERVATION)

    logger.info(f"Fixed alphabet growth: slope={fit.slope:.3g} per token over {len(records)} records")
    return AlphabetGrowth(
        fit=fit,
        split_t=float(split),
        ratios=ratios,
        small_ratio=_median(small),
        large_ratio=_median(large),
        below_fixed_observation=below,
    )
