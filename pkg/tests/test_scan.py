"""Tests for corpus scanning."""

import math
import time

import pytest

from tokenlaw.config import CORPORA_DIR, PROJECT_ROOT
from tokenlaw.distfit import build_ccdf, predicted_shape_check
from tokenlaw.errors import ConfigError, InputError
from tokenlaw.scan import FileScan, count_lines, count_outside, scan_corpus, scan_file
from tokenlaw.synth import write_c_corpus
from tokenlaw.types import ComponentSpan, ScanConfig, Token, TokenClass

CBLAS_DIR = CORPORA_DIR / "cblas"


class TestScanCorpus:
    """Test scanning source trees."""

    def test_bubble_sort_fixture(self):
        """Test that the bundled fixture gives one 94-token record."""
        result = scan_corpus(ScanConfig(roots=[str(CORPORA_DIR / "bubble")]))
        assert len(result.records) == 1
        record = result.records[0]
        assert (record.name, record.t, record.a_fixed, record.a_var) == ("bubble", 94, 18, 8)
        assert result.report.T == 94
        assert result.report.M == 1
        assert result.report.files_scanned == 1
        assert result.report.composition[0].language == "C"

    def test_empty_directory(self, temp_dir):
        """Test that a tree with no analyzable file is an input error."""
        (temp_dir / "notes.txt").write_text("nothing here\n", encoding="utf-8")
        with pytest.raises(InputError, match="no analyzable files"):
            scan_corpus(ScanConfig(roots=[str(temp_dir)]))

    def test_missing_root(self, temp_dir):
        """Test that a missing root is an input error."""
        with pytest.raises(InputError, match="not found"):
            scan_corpus(ScanConfig(roots=[str(temp_dir / "absent")]))

    def test_unknown_extensions_counted(self, temp_dir, two_functions_source):
        """Test that unregistered files are skipped and counted."""
        (temp_dir / "a.c").write_text(two_functions_source, encoding="utf-8")
        (temp_dir / "b.txt").write_text("text\n", encoding="utf-8")
        (temp_dir / "c.xyz").write_text("data\n", encoding="utf-8")
        result = scan_corpus(ScanConfig(roots=[str(temp_dir)]))
        assert [r.name for r in result.records] == ["f", "g"]
        assert result.report.diagnostics.get("unknown_extension") == 2

    def test_explicit_language(self, temp_dir, two_functions_source):
        """Test that an explicit language overrides extensions."""
        (temp_dir / "source.txt").write_text(two_functions_source, encoding="utf-8")
        result = scan_corpus(ScanConfig(roots=[str(temp_dir)], language="c"))
        assert result.report.M == 2

    def test_unknown_language(self, temp_dir, two_functions_source):
        """Test that an unregistered explicit language is a configuration error."""
        (temp_dir / "a.c").write_text(two_functions_source, encoding="utf-8")
        with pytest.raises(ConfigError, match="Unknown language 'cobol'"):
            scan_corpus(ScanConfig(roots=[str(temp_dir)], language="cobol"))

    def test_include_exclude(self, temp_dir):
        """Test glob filtering of discovered files."""
        write_c_corpus(temp_dir, functions=60, per_file=20, seed=2)
        everything = scan_corpus(ScanConfig(roots=[str(temp_dir)]))
        excluded = scan_corpus(ScanConfig(roots=[str(temp_dir)], exclude=["unit_000.c"]))
        included = scan_corpus(ScanConfig(roots=[str(temp_dir)], include=["unit_00[12].c"]))
        assert everything.report.files_scanned == 3
        assert excluded.report.files_scanned == 2
        assert [f.path.rsplit("/", 1)[-1] for f in included.files] == ["unit_001.c", "unit_002.c"]

    def test_invalid_glob(self):
        """Test that an unbalanced glob is rejected."""
        with pytest.raises(ValueError):
            ScanConfig(roots=["."], include=["[abc"])

    def test_min_component_tokens(self, temp_dir, two_functions_source):
        """Test that components below the minimum are dropped and counted."""
        (temp_dir / "a.c").write_text(two_functions_source, encoding="utf-8")
        result = scan_corpus(ScanConfig(roots=[str(temp_dir)], min_component_tokens=20))
        assert result.records == []
        assert result.report.diagnostics.get("below_min_tokens") == 2

    def test_parallel_matches_serial(self, temp_dir):
        """Test that worker processes give the same records in the same order."""
        write_c_corpus(temp_dir, functions=120, per_file=20, seed=5)
        serial = scan_corpus(ScanConfig(roots=[str(temp_dir)]))
        parallel = scan_corpus(ScanConfig(roots=[str(temp_dir)], jobs=2))
        assert parallel.records == serial.records
        assert parallel.report.T == serial.report.T

    def test_rescan_is_identical(self, temp_dir):
        """Test that scanning an unchanged tree twice gives identical records."""
        write_c_corpus(temp_dir, functions=40, per_file=20, seed=9)
        config = ScanConfig(roots=[str(temp_dir)])
        assert scan_corpus(config).records == scan_corpus(config).records

    def test_self_scan_conserves_tokens(self):
        """Test the package tree and bundled corpora: every token is inside or outside a component."""
        result = scan_corpus(ScanConfig(roots=[str(PROJECT_ROOT / "tokenlaw"), str(CORPORA_DIR)]))
        assert result.report.M >= 1
        assert all(scan.conserved for scan in result.files)
        assert result.report.diagnostics.get("unknown_extension") > 0
        assert result.report.T == sum(record.t for record in result.records)

    def test_on_file_callback(self, temp_dir):
        """Test that the progress callback fires once per file."""
        write_c_corpus(temp_dir, functions=40, per_file=10, seed=1)
        seen = []
        scan_corpus(ScanConfig(roots=[str(temp_dir)]), on_file=lambda scan: seen.append(scan.path))
        assert len(seen) == 4

    @pytest.mark.slow
    def test_throughput(self):
        """Test a scan rate of at least 50,000 lines per second on the bundled C library."""
        config = ScanConfig(roots=[str(CBLAS_DIR)])
        best = math.inf
        for _ in range(3):
            started = time.perf_counter()
            result = scan_corpus(config)
            best = min(best, time.perf_counter() - started)
        lines = sum(scan.lines for scan in result.files)
        assert lines >= 10_000
        assert lines / best >= 50_000


class TestScanFile:
    """Test single-file scans."""

    def test_counts(self, temp_dir, two_functions_source):
        """Test line, token and outside counts of the two-function file."""
        path = temp_dir / "a.c"
        path.write_text(two_functions_source, encoding="utf-8")
        scan = scan_file(str(path), "C")
        assert scan.lines == 12
        assert scan.outside_tokens == 6
        assert scan.conserved
        assert [r.name for r in scan.records] == ["f", "g"]

    def test_unreadable_file(self, temp_dir):
        """Test that a read failure is captured rather than raised."""
        scan = scan_file(str(temp_dir / "gone.c"), "C")
        assert scan.error is not None
        assert scan.diagnostics.get("unreadable_file") == 1

    def test_count_lines(self):
        """Test line counting with and without a final newline."""
        assert count_lines("") == 0
        assert count_lines("a\nb") == 2
        assert count_lines("a\nb\n") == 2


def _span(name, first, last):
    tokens = tuple(Token("x", TokenClass.VARIABLE, 1, k, "x") for k in range(first, last + 1))
    return ComponentSpan(name=name, file="a.c", first_token_index=first, last_token_index=last, tokens=tokens)


class TestCountOutside:
    """Test counting tokens in the gaps between components."""

    def test_gaps(self):
        """Test leading, middle and trailing gaps regardless of span order."""
        spans = [_span("g", 8, 11), _span("f", 2, 5)]
        assert count_outside(15, spans) == 2 + 2 + 3

    def test_no_spans(self):
        """Test that every token is outside when nothing was segmented."""
        assert count_outside(9, []) == 9

    def test_adjacent_spans_fill_stream(self):
        """Test spans covering the whole stream leave nothing outside."""
        assert count_outside(6, [_span("f", 0, 2), _span("g", 3, 5)]) == 0

    def test_overlap_rejected(self):
        """Test that overlapping spans cannot be counted."""
        with pytest.raises(ValueError, match="overlaps"):
            count_outside(10, [_span("f", 0, 4), _span("g", 3, 6)])

    def test_span_past_end_rejected(self):
        """Test that a span beyond the token stream cannot be counted."""
        with pytest.raises(ValueError, match="runs past token 5"):
            count_outside(5, [_span("f", 2, 5)])

    def test_short_span_breaks_conservation(self):
        """Test that a span whose tokens do not fill its index range is not conserved."""
        span = _span("f", 1, 4)
        short = ComponentSpan(name="f", file="a.c", first_token_index=1, last_token_index=4, tokens=span.tokens[:2])
        scan = FileScan(path="a.c", language="C", tokens=6, component_tokens=len(short))
        scan.outside_tokens = count_outside(6, [short])
        assert not scan.conserved


class TestCorpusShape:
    """Test the size distribution of C corpora."""

    def test_bundled_library_shape(self):
        """Test the bundled CBLAS sources: a flat smallest decade and a steep power-law tail."""
        result = scan_corpus(ScanConfig(roots=[str(CBLAS_DIR)]))
        assert sum(scan.lines for scan in result.files) >= 10_000
        assert result.report.M >= 130
        assert all(scan.conserved for scan in result.files)
        shape = predicted_shape_check(build_ccdf([record.t for record in result.records]))
        assert abs(shape.head_slope) < 0.3
        assert shape.tail_slope < -1.0
        assert shape.tail_slope < shape.head_slope - 1.0

    def test_flat_head_power_tail(self, temp_dir):
        """Test a generated corpus over 10,000 lines for a flat head and a falling tail."""
        write_c_corpus(temp_dir)
        result = scan_corpus(ScanConfig(roots=[str(temp_dir)]))
        assert sum(scan.lines for scan in result.files) >= 10_000
        shape = predicted_shape_check(build_ccdf([record.t for record in result.records]))
        assert abs(shape.head_slope) < 0.3
        assert shape.tail_slope < 0
