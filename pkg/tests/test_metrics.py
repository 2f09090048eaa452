"""Tests for component and corpus metrics."""

import math

import numpy as np
import pytest

from tokenlaw.errors import DegenerateFitError, EmptyInputError, GeneDataError, InsufficientDataError
from tokenlaw.lexicon import segment_components, tokenize
from tokenlaw.metrics import alphabet_growth_regression, component_metrics, genetic_metrics, summarize_corpus
from tokenlaw.types import ComponentRecord, ComponentSpan, CorpusSummary, Token, TokenClass


def _bubble_record(c_spec, bubble_source):
    spans = segment_components(tokenize(bubble_source, c_spec), c_spec, file="bubble.c")
    return component_metrics(spans[0])


class TestComponentMetrics:
    """Test per-component measurements."""

    def test_bubble_sort_alphabet(self, c_spec, bubble_source):
        """Test the bubble-sort counts: 94 tokens over 18 fixed and 8 variable members."""
        record = _bubble_record(c_spec, bubble_source)
        assert record.name == "bubble"
        assert (record.t, record.a_fixed, record.a_var, record.a) == (94, 18, 8, 26)

    def test_bubble_sort_information(self, c_spec, bubble_source):
        """Test that the bubble-sort information is 94 ln 26 nats."""
        record = _bubble_record(c_spec, bubble_source)
        assert record.info == pytest.approx(94 * math.log(26))
        assert record.info == pytest.approx(306.26, abs=0.01)

    def test_single_token_span(self):
        """Test that a one-token component carries no information."""
        token = Token("x", TokenClass.VARIABLE, 1, 1, "x")
        span = ComponentSpan(name="x", file="x.c", first_token_index=0, last_token_index=0, tokens=(token,))
        record = component_metrics(span)
        assert (record.t, record.a, record.info) == (1, 1, 0.0)

    def test_empty_span_rejected(self):
        """Test that a span without tokens is an error."""
        span = ComponentSpan(name="e", file="e.c", first_token_index=0, last_token_index=0, tokens=())
        with pytest.raises(EmptyInputError):
            component_metrics(span)

    def test_permutation_invariance(self, c_spec, bubble_source):
        """Test that shuffling tokens inside a span leaves the record unchanged."""
        spans = segment_components(tokenize(bubble_source, c_spec), c_spec, file="bubble.c")
        span = spans[0]
        rng = np.random.default_rng(3)
        order = rng.permutation(len(span.tokens))
        shuffled = ComponentSpan(
            name=span.name,
            file=span.file,
            first_token_index=span.first_token_index,
            last_token_index=span.last_token_index,
            tokens=tuple(span.tokens[k] for k in order),
        )
        assert component_metrics(shuffled) == component_metrics(span)


class TestComponentRecord:
    """Test record invariants."""

    def test_decomposition_enforced(self):
        """Test that a must equal a_fixed + a_var."""
        with pytest.raises(ValueError):
            ComponentRecord(name="x", file="x.c", t=10, a_fixed=3, a_var=3, a=5, info=10 * math.log(5))

    def test_alphabet_bounded_by_tokens(self):
        """Test that a cannot exceed t."""
        with pytest.raises(ValueError):
            ComponentRecord.from_counts("x", "x.c", 3, 2, 2)

    def test_info_consistent(self):
        """Test that info must equal t ln a."""
        with pytest.raises(ValueError):
            ComponentRecord(name="x", file="x.c", t=10, a_fixed=2, a_var=2, a=4, info=1.0)

    def test_small_flag(self):
        """Test that components under ten tokens are flagged."""
        assert ComponentRecord.from_counts("s", "s.c", 9, 3, 2).is_small
        assert not ComponentRecord.from_counts("l", "l.c", 10, 3, 2).is_small


class TestSummarizeCorpus:
    """Test corpus totals."""

    def test_two_records(self):
        """Test totals over the bubble-sort record and a one-token record."""
        records = [
            ComponentRecord.from_counts("bubble", "b.c", 94, 18, 8),
            ComponentRecord.from_counts("one", "o.c", 1, 0, 1),
        ]
        summary = summarize_corpus(records)
        assert (summary.T, summary.M) == (95, 2)
        assert summary.I == pytest.approx(306.26, abs=0.01)

    def test_single_record(self, sample_records):
        """Test that one record summarizes to itself."""
        summary = summarize_corpus(sample_records[:1])
        assert (summary.T, summary.M, summary.I) == (94, 1, sample_records[0].info)

    def test_equal_records(self):
        """Test three records of ten tokens over four members."""
        records = [ComponentRecord.from_counts(f"r{k}", "r.c", 10, 2, 2) for k in range(3)]
        summary = summarize_corpus(records)
        assert summary.T == 30
        assert summary.I == pytest.approx(30 * math.log(4))

    def test_empty_rejected(self):
        """Test that an empty corpus is an error."""
        with pytest.raises(EmptyInputError):
            summarize_corpus([])

    def test_merge_is_additive(self, sample_records):
        """Test that merging summaries adds tokens and information."""
        left = summarize_corpus(sample_records[:2])
        right = summarize_corpus(sample_records[2:])
        merged = left.merge(right)
        assert merged.T == left.T + right.T
        assert merged.I == pytest.approx(left.I + right.I)

    def test_inconsistent_totals_rejected(self, sample_records):
        """Test that a summary whose T disagrees with its records is invalid."""
        with pytest.raises(ValueError):
            CorpusSummary(T=1, M=len(sample_records), I=0.0, records=sample_records)


class TestGeneticMetrics:
    """Test nucleotide sequences as components."""

    def test_measles_prefix(self, measles_prefix):
        """Test the first 60 bases of the measles genome."""
        record = genetic_metrics(measles_prefix, name="measles")
        assert (record.t, record.a, record.a_fixed) == (60, 4, 0)
        assert record.info == pytest.approx(83.178, abs=0.001)

    def test_single_letter(self):
        """Test that a one-letter sequence carries no information."""
        record = genetic_metrics("aaaa")
        assert (record.t, record.a, record.info) == (4, 1, 0.0)

    def test_acgt(self):
        """Test the four-base sequence."""
        record = genetic_metrics("ACGT")
        assert record.info == pytest.approx(4 * math.log(4))
        assert record.info == pytest.approx(5.545, abs=0.001)

    def test_invalid_base(self):
        """Test that a non-base character is reported with its position."""
        with pytest.raises(GeneDataError, match="position 3"):
            genetic_metrics("acxt")

    def test_empty_sequence(self):
        """Test that a sequence with no bases is an error."""
        with pytest.raises(EmptyInputError):
            genetic_metrics("  \n")


class TestAlphabetGrowth:
    """Test the fixed-alphabet regression on component size."""

    def test_constant_fixed_alphabet(self):
        """Test that a constant fixed alphabet gives slope exactly zero."""
        records = [ComponentRecord.from_counts(f"r{t}", "r.c", t, 20, 5) for t in (30, 60, 90, 120)]
        growth = alphabet_growth_regression(records)
        assert growth.fit.slope == 0.0
        assert growth.fit.degenerate

    def test_known_slope_recovered(self):
        """Test recovery of a small generated slope within three standard errors."""
        rng = np.random.default_rng(11)
        sizes = rng.integers(50, 20000, 400)
        records = []
        for k, t in enumerate(sizes):
            a_fixed = int(round(20 + 0.0007 * t + rng.normal(0.0, 0.5)))
            records.append(ComponentRecord.from_counts(f"r{k}", "r.c", int(t), a_fixed, 10))
        fit = alphabet_growth_regression(records).fit
        assert abs(fit.slope - 7e-4) < 3 * fit.slope_stderr

    def test_ratio_split_by_median(self):
        """Test the variable/fixed ratio medians below and above the median size."""
        records = [
            ComponentRecord.from_counts("a", "r.c", 20, 10, 5),
            ComponentRecord.from_counts("b", "r.c", 40, 10, 5),
            ComponentRecord.from_counts("c", "r.c", 400, 10, 40),
            ComponentRecord.from_counts("d", "r.c", 800, 10, 60),
        ]
        growth = alphabet_growth_regression(records)
        assert growth.split_t == 220.0
        assert growth.small_ratio == pytest.approx(0.5)
        assert growth.large_ratio == pytest.approx(5.0)
        assert growth.below_fixed_observation == 4

    def test_equal_sizes_rejected(self):
        """Test that records all of one size cannot be regressed."""
        records = [ComponentRecord.from_counts(f"r{k}", "r.c", 50, 10 + k, 5) for k in range(3)]
        with pytest.raises(DegenerateFitError):
            alphabet_growth_regression(records)

    def test_too_few_records(self, sample_records):
        """Test that fewer than three records cannot be regressed."""
        with pytest.raises(InsufficientDataError):
            alphabet_growth_regression(sample_records[:2])
