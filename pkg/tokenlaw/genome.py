"""Gene-length tables: kingdom regressions of total coding length on gene count.

With a fixed four-letter alphabet every gene has the same per-token cost, so
the equilibrium puts no size preference on genes: average gene length is
constant within a kingdom and a species' total coding length grows linearly
with its gene count, T = k' M.
"""

import csv
import logging
import statistics
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, Field, field_validator

from .config import ERROR_MESSAGES, MIN_GENES, MIN_SPECIES, POWER_LAW_MIN_DECADES, POWER_LAW_MIN_R_SQUARED
from .distfit import build_ccdf, decades, predicted_shape_check, tail_beyond
from .errors import GeneDataError, InsufficientDataError
from .stats import ols
from .types import LinearFit, Measure, ShapeReport

logger = logging.getLogger(__name__)

LENGTH_HEADER = ("species", "kingdom", "length")
COMPACT_HEADER = ("species", "kingdom", "lengths")


class Kingdom(str, Enum):
    """Caller-supplied grouping of species."""
    PROKARYOTE = "prokaryote"
    EUKARYOTE = "eukaryote"
    OTHER = "other"


class GeneSet(BaseModel):
    """Gene lengths of one species."""
    species: str = Field(..., min_length=1, description="Species name")
    kingdom: Kingdom = Field(..., description="Kingdom label")
    lengths: List[int] = Field(..., min_length=1, description="Gene lengths in bases")

    @field_validator("lengths")
    @classmethod
    def _positive(cls, value: List[int]) -> List[int]:
        for length in value:
            if length < 1:
                raise ValueError(f"gene length must be positive, got {length}")
        return value

    @property
    def gene_count(self) -> int:
        return len(self.lengths)

    @property
    def total_length(self) -> int:
        return sum(self.lengths)

    @property
    def mean_length(self) -> float:
        return self.total_length / self.gene_count


class KingdomRegression(BaseModel):
    """Total coding length against gene count across the species of a kingdom."""
    kingdom: Kingdom
    species: List[str] = Field(..., description="Species in regression order")
    gene_counts: List[int] = Field(..., description="M_s per species")
    total_lengths: List[int] = Field(..., description="T_s per species")
    fit: LinearFit = Field(..., description="OLS of T_s on M_s")
    mean_length: float = Field(..., description="sum T_s / sum M_s")
    k_prime: float = Field(..., description="Fitted slope")


class UniformityReport(BaseModel):
    """Whether one species' gene lengths look flat or power-law."""
    species: str
    kingdom: Kingdom
    genes: int
    mean: float
    cv: float = Field(..., ge=0.0, description="Population standard deviation over mean")
    shape: Optional[ShapeReport] = Field(None, description="None with too few distinct lengths")
    tail_fit: Optional[LinearFit] = Field(None, description="ccdf fit beyond the knee")
    tail_decades: float = Field(default=0.0, ge=0.0, description="Decades from the knee to the largest gene")
    power_law: bool = Field(default=False, description="The ccdf has a power-law tail")

    @property
    def ccdf_tail_slope_flag(self) -> str:
        return "power-law" if self.power_law else "flat-head/short-tail"


def _parse_int(value: str, path: Path, line: int) -> int:
    try:
        return int(value.strip())
    except ValueError:
        raise GeneDataError(f"{path}:{line}: '{value}' is not an integer length") from None


def _parse_kingdom(value: str, path: Path, line: int) -> Kingdom:
    try:
        return Kingdom(value.strip().lower())
    except ValueError:
        choices = ", ".join(k.value for k in Kingdom)
        raise GeneDataError(f"{path}:{line}: unknown kingdom '{value}' (expected {choices})") from None


def load_gene_lengths(path: Union[str, Path]) -> List[GeneSet]:
    """Read a gene-length CSV.

    Two layouts are accepted, told apart by the header: ``species,kingdom,length``
    with one gene per row, or ``species,kingdom,lengths`` with semicolon-separated
    lengths. Rows of one species may be spread through the file; species keep the
    order of their first appearance.

    Args:
        path: CSV file

    Returns:
        One GeneSet per species

    Raises:
        GeneDataError: If the file is missing, the header is unknown, or a row is
            malformed; the message names the line
    """
    path = Path(path)
    if not path.is_file():
        raise GeneDataError(ERROR_MESSAGES["file_not_found"].format(file=path))

    lengths: Dict[str, List[int]] = {}
    kingdoms: Dict[str, Kingdom] = {}
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = tuple(h.strip().lower() for h in next(reader, ()))
        if header not in (LENGTH_HEADER, COMPACT_HEADER):
            raise GeneDataError(
                f"{path}:1: header must be '{','.join(LENGTH_HEADER)}' or '{','.join(COMPACT_HEADER)}'"
            )
        compact = header == COMPACT_HEADER
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise GeneDataError(f"{path}:{line}: expected 3 fields, got {len(row)}")
            species = row[0].strip()
            if not species:
                raise GeneDataError(f"{path}:{line}: empty species name")
            kingdom = _parse_kingdom(row[1], path, line)
            if kingdoms.setdefault(species, kingdom) is not kingdom:
                raise GeneDataError(
                    f"{path}:{line}: species '{species}' already labelled {kingdoms[species].value}"
                )
            cells = row[2].split(";") if compact else [row[2]]
            values = [_parse_int(cell, path, line) for cell in cells if cell.strip()]
            if not values:
                raise GeneDataError(f"{path}:{line}: no lengths for species '{species}'")
            for value in values:
                if value < 1:
                    raise GeneDataError(f"{path}:{line}: gene length {value} must be positive")
            lengths.setdefault(species, []).extend(values)

    sets = [GeneSet(species=s, kingdom=kingdoms[s], lengths=v) for s, v in lengths.items()]
    logger.info(f"Loaded {len(sets)} species from {path}")
    return sets


def write_gene_lengths(sets: Sequence[GeneSet], path: Union[str, Path], compact: bool = False) -> Path:
    """Write gene sets in either CSV layout."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        if compact:
            writer.writerow(COMPACT_HEADER)
            for gene_set in sets:
                writer.writerow(
                    [gene_set.species, gene_set.kingdom.value, ";".join(str(n) for n in gene_set.lengths)]
                )
        else:
            writer.writerow(LENGTH_HEADER)
            for gene_set in sets:
                for length in gene_set.lengths:
                    writer.writerow([gene_set.species, gene_set.kingdom.value, length])
    logger.debug(f"Wrote {len(sets)} species to {path}")
    return path


def kingdom_regression(sets: Sequence[GeneSet], kingdom: Union[Kingdom, str]) -> KingdomRegression:
    """Regress total coding length T_s on gene count M_s for one kingdom.

    Args:
        sets: Gene sets of any kingdoms; only ``kingdom`` is used
        kingdom: Kingdom to regress

    Returns:
        KingdomRegression; ``k_prime`` is the slope

    Raises:
        InsufficientDataError: If the kingdom has fewer than 3 species
        DegenerateFitError: If every species has the same gene count
    """
    kingdom = Kingdom(kingdom)
    members = [s for s in sets if s.kingdom is kingdom]
    if len(members) < MIN_SPECIES:
        raise InsufficientDataError(
            ERROR_MESSAGES["insufficient_species"].format(
                kingdom=kingdom.value, found=len(members), minimum=MIN_SPECIES
            )
        )
    counts = [s.gene_count for s in members]
    totals = [s.total_length for s in members]
    fit = ols(counts, totals, allow_constant_response=True)
    regression = KingdomRegression(
        kingdom=kingdom,
        species=[s.species for s in members],
        gene_counts=counts,
        total_lengths=totals,
        fit=fit,
        mean_length=sum(totals) / sum(counts),
        k_prime=fit.slope,
    )
    logger.info(
        f"Kingdom {kingdom.value}: k'={fit.slope:.2f}, mean length {regression.mean_length:.2f}, "
        f"R²={fit.r_squared if fit.r_squared is not None else float('nan'):.4f} over {len(members)} species"
    )
    return regression


def uniformity_check(gene_set: GeneSet) -> UniformityReport:
    """Mean, coefficient of variation and ccdf shape of one species' gene lengths.

    The tail counts as a power law when the ccdf beyond the knee spans at least
    a decade of lengths and fits a line in log-log with R² >= 0.9. A fixed
    alphabet predicts no such tail.

    Raises:
        InsufficientDataError: If the species has fewer than 30 genes
    """
    if gene_set.gene_count < MIN_GENES:
        raise InsufficientDataError(
            ERROR_MESSAGES["insufficient_genes"].format(
                species=gene_set.species, found=gene_set.gene_count, minimum=MIN_GENES
            )
        )
    mean = statistics.fmean(gene_set.lengths)
    cv = statistics.pstdev(gene_set.lengths) / mean

    curve = build_ccdf(gene_set.lengths, measure=Measure.TOKENS)
    shape = None
    tail_fit = None
    span = 0.0
    power_law = False
    try:
        shape = predicted_shape_check(curve)
    except InsufficientDataError:
        logger.debug(f"{gene_set.species}: too few distinct lengths for a shape check")
    if shape is not None:
        span = max(decades(shape.knee_estimate, curve.points[-1].s), 0.0)
        tail_fit = tail_beyond(curve, shape.knee_estimate)
        power_law = (
            span >= POWER_LAW_MIN_DECADES
            and tail_fit is not None
            and not tail_fit.degenerate
            and (tail_fit.r_squared or 0.0) >= POWER_LAW_MIN_R_SQUARED
        )

    report = UniformityReport(
        species=gene_set.species,
        kingdom=gene_set.kingdom,
        genes=gene_set.gene_count,
        mean=mean,
        cv=cv,
        shape=shape,
        tail_fit=tail_fit,
        tail_decades=span,
        power_law=power_law,
    )
    logger.debug(f"{gene_set.species}: mean {mean:.1f}, cv {cv:.3f}, {report.ccdf_tail_slope_flag}")
    return report
