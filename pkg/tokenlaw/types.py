"""Data models shared across Tokenlaw."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .config import MAX_DIAGNOSTIC_MESSAGES, P_VALUE_FLOOR, SMALL_COMPONENT_TOKENS


class TokenClass(str, Enum):
    """Lexical class of a token."""
    FIXED = "fixed"
    VARIABLE = "variable"


class Measure(str, Enum):
    """Component size measure used for distributions."""
    TOKENS = "tokens"
    ALPHABET = "alphabet"


class OutputFormat(str, Enum):
    """Record file formats."""
    CSV = "csv"
    JSON = "json"


class Token(NamedTuple):
    """One lexical unit.

    ``symbol`` is the alphabet member the lexeme counts as: the lexeme itself,
    its alias target, or its upper-cased form in case-insensitive languages.
    """
    lexeme: str
    token_class: TokenClass
    line: int
    column: int
    symbol: str

    @property
    def is_fixed(self) -> bool:
        return self.token_class is TokenClass.FIXED


@dataclass(frozen=True)
class ComponentSpan:
    """A non-nested component: a contiguous slice of one file's token stream."""
    name: str
    file: str
    first_token_index: int
    last_token_index: int
    tokens: Tuple[Token, ...] = field(repr=False)

    def __post_init__(self) -> None:
        if self.first_token_index < 0:
            raise ValueError("first_token_index must be non-negative")
        if self.first_token_index > self.last_token_index:
            raise ValueError(
                f"span '{self.name}' has first_token_index {self.first_token_index} "
                f"after last_token_index {self.last_token_index}"
            )

    def __len__(self) -> int:
        return len(self.tokens)


class Diagnostics(BaseModel):
    """Tally of skipped or unrecognised constructs.

    Counts are kept per kind; positioned messages are kept up to a fixed bound so
    that a pathological file cannot exhaust memory.
    """
    counts: Dict[str, int] = Field(default_factory=dict, description="Occurrences per diagnostic kind")
    messages: List[str] = Field(default_factory=list, description="First positioned messages")
    dropped_messages: int = Field(default=0, ge=0, description="Messages beyond the retained bound")

    def record(
        self,
        kind: str,
        message: Optional[str] = None,
        file: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ) -> None:
        """Count one occurrence of ``kind`` and keep its message if there is room."""
        self.counts[kind] = self.counts.get(kind, 0) + 1
        if message is None:
            return
        where = ":".join(str(part) for part in (file, line, column) if part is not None)
        text = f"{where}: {message}" if where else message
        if len(self.messages) < MAX_DIAGNOSTIC_MESSAGES:
            self.messages.append(text)
        else:
            self.dropped_messages += 1

    def merge(self, other: "Diagnostics") -> "Diagnostics":
        """Fold ``other`` into this tally in place and return self."""
        for kind, count in other.counts.items():
            self.counts[kind] = self.counts.get(kind, 0) + count
        room = MAX_DIAGNOSTIC_MESSAGES - len(self.messages)
        self.messages.extend(other.messages[:room])
        self.dropped_messages += other.dropped_messages + max(0, len(other.messages) - room)
        return self

    def get(self, kind: str) -> int:
        return self.counts.get(kind, 0)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


class ComponentRecord(BaseModel):
    """Measurements of one component: size, alphabet split and information."""
    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="Component name")
    file: str = Field(..., description="Source file the component came from")
    t: int = Field(..., ge=1, description="Total tokens")
    a_fixed: int = Field(..., ge=0, description="Distinct fixed alphabet members used")
    a_var: int = Field(..., ge=0, description="Distinct variable alphabet members used")
    a: int = Field(..., ge=1, description="Distinct alphabet members used")
    info: float = Field(..., ge=0.0, description="Information t*ln(a) in nats")

    @model_validator(mode="after")
    def _check_decomposition(self) -> "ComponentRecord":
        if self.a != self.a_fixed + self.a_var:
            raise ValueError(f"a={self.a} is not a_fixed + a_var = {self.a_fixed} + {self.a_var}")
        if self.a > self.t:
            raise ValueError(f"alphabet a={self.a} exceeds token count t={self.t}")
        expected = self.t * math.log(self.a)
        if not math.isclose(self.info, expected, rel_tol=1e-9, abs_tol=1e-9):
            raise ValueError(f"info={self.info} does not equal t*ln(a)={expected}")
        return self

    @classmethod
    def from_counts(cls, name: str, file: str, t: int, a_fixed: int, a_var: int) -> "ComponentRecord":
        """Build a record, deriving ``a`` and ``info`` from the counts."""
        a = a_fixed + a_var
        info = t * math.log(a) if a > 0 else 0.0
        return cls(name=name, file=file, t=t, a_fixed=a_fixed, a_var=a_var, a=a, info=info)

    @property
    def is_small(self) -> bool:
        """True for components below the size the model treats as typical."""
        return self.t < SMALL_COMPONENT_TOKENS

    @property
    def epsilon(self) -> float:
        """Information per token, I/t = ln(a)."""
        return math.log(self.a)


class CorpusSummary(BaseModel):
    """Totals over a set of component records."""
    T: int = Field(..., ge=1, description="Total tokens over all components")
    M: int = Field(..., ge=1, description="Number of components")
    I: float = Field(..., ge=0.0, description="Total information in nats")
    records: List[ComponentRecord] = Field(default_factory=list, description="Component records")

    @model_validator(mode="after")
    def _check_totals(self) -> "CorpusSummary":
        if self.M != len(self.records):
            raise ValueError(f"M={self.M} but {len(self.records)} records")
        if self.T != sum(record.t for record in self.records):
            raise ValueError("T does not equal the sum of record token counts")
        return self

    @classmethod
    def from_records(cls, records: List[ComponentRecord]) -> "CorpusSummary":
        return cls(
            T=sum(record.t for record in records),
            M=len(records),
            I=math.fsum(record.info for record in records),
            records=list(records),
        )

    def merge(self, other: "CorpusSummary") -> "CorpusSummary":
        """Combine two summaries; the result is independent of grouping."""
        return CorpusSummary.from_records(self.records + other.records)


class EcdfPoint(BaseModel):
    """One point of a complementary cumulative count."""
    model_config = ConfigDict(frozen=True)

    s: int = Field(..., ge=1, description="Size value")
    count: int = Field(..., ge=1, description="Components (or weight) with size >= s")


class CcdfCurve(BaseModel):
    """A complementary cumulative count with the metadata it was built from."""
    measure: Measure = Field(..., description="Which size the points count")
    n_inputs: int = Field(..., ge=1, description="Number of sizes the curve was built from")
    weighted: bool = Field(default=False, description="Counts are summed weights rather than components")
    points: List[EcdfPoint] = Field(..., description="Points sorted by size")

    @model_validator(mode="after")
    def _check_monotone(self) -> "CcdfCurve":
        for previous, current in zip(self.points, self.points[1:]):
            if current.s <= previous.s or current.count >= previous.count:
                raise ValueError(f"ccdf not strictly monotone at s={current.s}")
        return self


class LinearFit(BaseModel):
    """Ordinary least squares fit with the statistics of a standard regression summary."""
    slope: float = Field(..., description="Fitted slope")
    intercept: float = Field(..., description="Fitted intercept")
    slope_stderr: float = Field(..., ge=0.0, description="Standard error of the slope")
    intercept_stderr: float = Field(..., ge=0.0, description="Standard error of the intercept")
    r_squared: Optional[float] = Field(None, ge=0.0, le=1.0, description="Coefficient of determination")
    t_value: Optional[float] = Field(None, description="slope / slope_stderr")
    p_value: float = Field(..., gt=0.0, le=1.0, description="Two-sided p value for slope != 0")
    p_below_threshold: bool = Field(default=False, description="p value was clamped at the reporting floor")
    residual_stderr: float = Field(..., ge=0.0, description="Residual standard error")
    df: int = Field(..., ge=1, description="Residual degrees of freedom")
    n_points: int = Field(..., ge=3, description="Points used in the fit")
    fit_range: Optional[Tuple[float, float]] = Field(None, description="(s_min, s_max) the points were restricted to")
    degenerate: bool = Field(default=False, description="The response had zero variance")

    @property
    def p_value_display(self) -> str:
        if self.p_below_threshold:
            return f"< {P_VALUE_FLOOR:.1e}"
        return f"{self.p_value:.4g}"


class ShapeReport(BaseModel):
    """Flat-head / power-tail description of a ccdf."""
    head_flatness: float = Field(..., ge=0.0, description="|slope| over the smallest decade of sizes")
    head_slope: float = Field(..., description="Signed slope over the smallest decade")
    head_range: Tuple[int, int] = Field(..., description="Sizes spanned by the head fit")
    tail_slope: float = Field(..., description="Slope over the largest decade")
    tail_range: Tuple[int, int] = Field(..., description="Sizes spanned by the tail fit")
    tail_fit: LinearFit = Field(..., description="Full tail regression")
    tail_degenerate: bool = Field(default=False, description="Tail counts are constant")
    knee_estimate: int = Field(..., ge=1, description="Size where the flat head gives way to the power tail")


class AlphabetGrowth(BaseModel):
    """Fixed alphabet against component size, with the variable/fixed ratio split."""
    fit: LinearFit = Field(..., description="OLS of a_fixed on t")
    split_t: float = Field(..., description="Median t separating small and large components")
    ratios: List[Optional[float]] = Field(..., description="a_var / a_fixed per record, None when a_fixed is 0")
    small_ratio: Optional[float] = Field(None, description="Median ratio of components with t <= split_t")
    large_ratio: Optional[float] = Field(None, description="Median ratio of components with t > split_t")
    below_fixed_observation: int = Field(..., ge=0, description="Records using fewer than 30 fixed members")


class ScanConfig(BaseModel):
    """Options for a corpus scan."""
    roots: List[str] = Field(..., min_length=1, description="Files or directories to scan")
    language: str = Field(default="auto", description="Language name or 'auto' by extension")
    include: List[str] = Field(default_factory=list, description="Glob patterns a file must match")
    exclude: List[str] = Field(default_factory=list, description="Glob patterns that skip a file")
    min_component_tokens: int = Field(default=1, ge=1, description="Smallest component kept")
    output: str = Field(default="./tokenlaw-out", description="Output directory")
    jobs: int = Field(default=1, ge=1, description="Worker processes")

    @model_validator(mode="after")
    def _check_globs(self) -> "ScanConfig":
        for pattern in self.include + self.exclude:
            if not pattern or pattern.count("[") != pattern.count("]"):
                raise ValueError(f"invalid glob pattern '{pattern}'")
        return self


class LanguageShare(BaseModel):
    """Corpus composition by language."""
    language: str
    files: int = Field(..., ge=0)
    components: int = Field(..., ge=0)
    tokens: int = Field(..., ge=0)
    lines: int = Field(..., ge=0)


class RunReport(BaseModel):
    """Summary of one scan run."""
    tool_version: str = Field(..., description="Tokenlaw version that produced the report")
    roots: List[str] = Field(default_factory=list, description="Scanned roots")
    files_scanned: int = Field(default=0, ge=0)
    T: int = Field(default=0, ge=0, description="Total tokens in components")
    M: int = Field(default=0, ge=0, description="Component count")
    I: float = Field(default=0.0, ge=0.0, description="Total information in nats")
    small_components: int = Field(default=0, ge=0, description="Components with t < 10")
    records_path: Optional[str] = Field(None, description="Where the records were written")
    diagnostics: Diagnostics = Field(default_factory=Diagnostics)
    timing: Dict[str, float] = Field(default_factory=dict, description="Wall-clock seconds per phase")
    composition: List[LanguageShare] = Field(default_factory=list)
    extra: Dict[str, Any] = Field(default_factory=dict)
