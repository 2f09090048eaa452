"""Tests for gene-length tables, kingdom regressions and uniformity checks."""

import math

import numpy as np
import pytest

from tokenlaw.config import CORPORA_DIR
from tokenlaw.errors import GeneDataError, InsufficientDataError
from tokenlaw.genome import (
    GeneSet,
    Kingdom,
    kingdom_regression,
    load_gene_lengths,
    uniformity_check,
    write_gene_lengths,
)
from tokenlaw.synth import constant_kingdom, pareto_lengths, sampler_gene_sets, uniform_kingdom

KINGDOMS_CSV = CORPORA_DIR / "genes" / "kingdoms.csv"

BUNDLED_TOTALS = {
    "prok_01": (40, 35985),
    "prok_02": (55, 49818),
    "prok_03": (70, 62101),
    "prok_04": (85, 76440),
    "prok_05": (100, 91633),
    "euk_01": (60, 84003),
    "euk_02": (80, 112489),
    "euk_03": (100, 140550),
    "euk_04": (120, 168987),
    "euk_05": (140, 196198),
}


class TestLoadGeneLengths:
    """Test reading gene-length CSV files."""

    def test_bundled_fixture(self):
        """Test the bundled ten-species table."""
        sets = load_gene_lengths(KINGDOMS_CSV)
        assert len(sets) == 10
        totals = {s.species: (s.gene_count, s.total_length) for s in sets}
        assert totals == BUNDLED_TOTALS
        assert {s.kingdom for s in sets} == {Kingdom.PROKARYOTE, Kingdom.EUKARYOTE}

    def test_one_gene_per_row(self, temp_dir):
        """Test the long layout with two species."""
        path = temp_dir / "genes.csv"
        path.write_text(
            "species,kingdom,length\n"
            "ecoli,prokaryote,900\n"
            "yeast,Eukaryote,1400\n"
            "ecoli,prokaryote,1100\n",
            encoding="utf-8",
        )
        sets = load_gene_lengths(path)
        assert [(s.species, s.kingdom, s.lengths) for s in sets] == [
            ("ecoli", Kingdom.PROKARYOTE, [900, 1100]),
            ("yeast", Kingdom.EUKARYOTE, [1400]),
        ]

    def test_compact_layout(self, temp_dir):
        """Test semicolon-separated lengths."""
        path = temp_dir / "genes.csv"
        path.write_text("species,kingdom,lengths\nx,other,10;20;30\n", encoding="utf-8")
        assert load_gene_lengths(path)[0].lengths == [10, 20, 30]

    def test_zero_length_names_line(self, temp_dir):
        """Test that a zero length is rejected with its line number."""
        path = temp_dir / "genes.csv"
        path.write_text("species,kingdom,length\na,prokaryote,5\na,prokaryote,0\n", encoding="utf-8")
        with pytest.raises(GeneDataError, match=r"genes\.csv:3: gene length 0"):
            load_gene_lengths(path)

    def test_malformed_rows(self, temp_dir):
        """Test the row errors a table can contain."""
        path = temp_dir / "genes.csv"
        cases = {
            "species,kingdom,length\na,plant,5\n": "unknown kingdom",
            "species,kingdom,length\na,prokaryote\n": "expected 3 fields",
            "species,kingdom,length\na,prokaryote,five\n": "not an integer",
            "species,kingdom,length\na,prokaryote,5\na,eukaryote,6\n": "already labelled",
            "name,size\na,5\n": "header must be",
        }
        for text, message in cases.items():
            path.write_text(text, encoding="utf-8")
            with pytest.raises(GeneDataError, match=message):
                load_gene_lengths(path)

    def test_missing_file(self, temp_dir):
        """Test that a missing table is a gene-data error."""
        with pytest.raises(GeneDataError, match="not found"):
            load_gene_lengths(temp_dir / "absent.csv")

    def test_written_table_reads_back(self, temp_dir):
        """Test that a written compact table loads to the same sets."""
        sets = uniform_kingdom([5, 7], 100, 200, seed=1)
        path = write_gene_lengths(sets, temp_dir / "out.csv", compact=True)
        assert load_gene_lengths(path) == sets

    def test_gene_set_validation(self):
        """Test that gene sets reject non-positive lengths."""
        with pytest.raises(ValueError):
            GeneSet(species="x", kingdom="other", lengths=[3, -1])


class TestKingdomRegression:
    """Test total coding length against gene count."""

    def test_constant_length(self):
        """Test that identical 1000-base genes give slope exactly 1000."""
        regression = kingdom_regression(constant_kingdom([40, 60, 80], 1000), Kingdom.PROKARYOTE)
        assert regression.k_prime == pytest.approx(1000.0, rel=1e-12)
        assert regression.fit.intercept == pytest.approx(0.0, abs=1e-6)
        assert regression.fit.r_squared == pytest.approx(1.0)
        assert regression.mean_length == 1000.0

    def test_uniform_lengths(self):
        """Test that lengths uniform on [500, 1500] give slopes within 2 standard errors of 1000.

        A species total of n genes has variance n * sigma^2, so the slope's standard
        error is sigma * sqrt(sum(d^2 n)) / sum(d^2) with d the centred gene counts;
        about 95% of seeds land within 2 of them.
        """
        counts = np.array([50, 80, 120, 160, 200, 260, 320])
        d = counts - counts.mean()
        sigma = math.sqrt((1001**2 - 1) / 12)
        stderr = sigma * math.sqrt(np.sum(d**2 * counts)) / np.sum(d**2)
        within = 0
        for seed in range(100):
            sets = uniform_kingdom(counts.tolist(), 500, 1500, seed=seed)
            slope = kingdom_regression(sets, "prokaryote").fit.slope
            within += abs(slope - 1000.0) < 2 * stderr
        assert within >= 88

    def test_uniform_mean_length(self):
        """Test the pooled mean gene length of a uniform kingdom against 1000."""
        counts = [50, 80, 120, 160, 200, 260, 320]
        regression = kingdom_regression(uniform_kingdom(counts, 500, 1500, seed=13), "prokaryote")
        stderr = math.sqrt((1001**2 - 1) / 12) / math.sqrt(sum(counts))
        assert abs(regression.mean_length - 1000.0) < 4 * stderr

    def test_bundled_kingdoms_separate(self):
        """Test that the bundled kingdoms have distinct mean gene sizes."""
        sets = load_gene_lengths(KINGDOMS_CSV)
        prokaryote = kingdom_regression(sets, Kingdom.PROKARYOTE)
        eukaryote = kingdom_regression(sets, Kingdom.EUKARYOTE)
        assert prokaryote.k_prime < 1000.0 < eukaryote.k_prime
        assert prokaryote.species == ["prok_01", "prok_02", "prok_03", "prok_04", "prok_05"]

    def test_mean_length_between_species_means(self):
        """Test that the pooled mean lies within the per-species means."""
        sets = load_gene_lengths(KINGDOMS_CSV)
        regression = kingdom_regression(sets, Kingdom.EUKARYOTE)
        means = [s.mean_length for s in sets if s.kingdom is Kingdom.EUKARYOTE]
        assert min(means) <= regression.mean_length <= max(means)

    def test_too_few_species(self):
        """Test that fewer than three species is an error."""
        with pytest.raises(InsufficientDataError, match="kingdom 'other' has 0 species"):
            kingdom_regression(load_gene_lengths(KINGDOMS_CSV), Kingdom.OTHER)

    def test_sampled_genes_are_linear(self):
        """Test that genes cut from a fixed-alphabet sampled state grow linearly."""
        sets = sampler_gene_sets([40, 60, 80, 100], mean_length=200, seed=17)
        fit = kingdom_regression(sets, Kingdom.PROKARYOTE).fit
        assert fit.r_squared > 0.95
        assert fit.slope == pytest.approx(200.0, rel=0.05)


class TestUniformityCheck:
    """Test the flat-versus-power-law check on one species."""

    def test_equal_lengths(self):
        """Test that identical lengths have zero spread and no power-law tail."""
        report = uniformity_check(constant_kingdom([40], 1000)[0])
        assert report.cv == 0.0
        assert report.mean == 1000.0
        assert not report.power_law
        assert report.ccdf_tail_slope_flag == "flat-head/short-tail"

    def test_sampled_lengths_have_no_tail(self):
        """Test that sampler-generated lengths are not flagged as a power law."""
        gene_set = sampler_gene_sets([100], mean_length=200, seed=23)[0]
        report = uniformity_check(gene_set)
        assert not report.power_law
        assert report.cv < 0.2

    def test_pareto_lengths_flagged(self):
        """Test that Pareto lengths are flagged as a power law."""
        lengths = pareto_lengths(2000, exponent=1.0, s_min=100, seed=3)
        report = uniformity_check(GeneSet(species="pareto", kingdom="other", lengths=lengths))
        assert report.power_law
        assert report.ccdf_tail_slope_flag == "power-law"
        assert report.tail_decades >= 1.0

    def test_too_few_genes(self):
        """Test that fewer than thirty genes is an error."""
        with pytest.raises(InsufficientDataError, match="29 genes"):
            uniformity_check(constant_kingdom([29], 500)[0])
