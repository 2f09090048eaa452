"""Randomized property checks over many generated inputs."""

import math

import numpy as np
import pytest

from tokenlaw.distfit import build_ccdf, fit_loglog
from tokenlaw.ensemble import EnsembleSystem, Microstate, boltzmann_equilibrium, metropolis_sample, multinomial_weight
from tokenlaw.lexicon import load_registry, segment_components, tokenize
from tokenlaw.metrics import summarize_corpus
from tokenlaw.scan import count_outside
from tokenlaw.types import ComponentRecord, TokenClass

CASES = 1000

C_ALPHABET = list("abcxyz019_ \t\n;{}()[]+-*/=<>!&|^%~?:,.'\"#\\@$`")

C_TOP_LEVEL = (
    "int g{k} = {n};",
    "/* block {k} {{ */",
    "static const char *s{k} = \"{{ ({n}\";",
    "struct s{k} {{ int a; long b[{n}]; }};",
    "int proto{k}(int x, char *y);",
    "#define M{k}(x) ((x) + {n})",
    "typedef int (*cb{k})(void);",
)

C_STATEMENTS = (
    "    x = x + {n};",
    "    if (x > {n}) {{ y = f{k}(x, y); }} else {{ y--; }}",
    "    while (y < {n}) {{ y += x; }}",
    "    // note }} {k}",
    "    s = \"}} {n}\";",
    "    for (i = 0; i < {n}; i++) {{ if (i & 1) {{ continue; }} }}",
    "    switch (x) {{ case {n}: break; default: x = {k}; }}",
)


def _random_records(rng, count):
    records = []
    for k in range(count):
        t = int(rng.integers(1, 5000))
        a = int(rng.integers(1, min(t, 200) + 1))
        a_fixed = int(rng.integers(0, a + 1))
        records.append(ComponentRecord.from_counts(f"r{k}", "r.c", t, a_fixed, a - a_fixed))
    return records


def _random_c_program(rng):
    """A C file of random top-level declarations, functions and stray soup."""
    lines = []
    for k in range(int(rng.integers(0, 8))):
        roll = rng.random()
        if roll < 0.4:
            lines.append(C_TOP_LEVEL[int(rng.integers(len(C_TOP_LEVEL)))].format(k=k, n=int(rng.integers(100))))
        elif roll < 0.9:
            lines.append(f"static int f{k}(int x, int y)")
            lines.append("{")
            for _ in range(int(rng.integers(0, 6))):
                template = C_STATEMENTS[int(rng.integers(len(C_STATEMENTS)))]
                lines.append(template.format(k=k, n=int(rng.integers(100))))
            lines.append("    return x;")
            lines.append("}")
        else:
            lines.append("".join(rng.choice(C_ALPHABET, int(rng.integers(1, 30)))))
    return "\n".join(lines) + "\n"


class TestInformationProperties:
    """Properties of the information measure."""

    def test_additivity(self):
        """Test that corpus information is the sum over records and merges add up."""
        rng = np.random.default_rng(101)
        for _ in range(CASES):
            records = _random_records(rng, int(rng.integers(2, 12)))
            summary = summarize_corpus(records)
            assert summary.I == pytest.approx(math.fsum(r.t * math.log(r.a) for r in records), rel=1e-12)
            cut = int(rng.integers(1, len(records)))
            merged = summarize_corpus(records[:cut]).merge(summarize_corpus(records[cut:]))
            assert merged.T == summary.T
            assert merged.I == pytest.approx(summary.I, rel=1e-12)

    def test_bounds(self):
        """Test 0 <= I <= t ln t for every record."""
        rng = np.random.default_rng(102)
        for record in _random_records(rng, CASES):
            assert 0.0 <= record.info <= record.t * math.log(record.t) + 1e-9


class TestCcdfProperties:
    """Properties of the ccdf and its fit."""

    def test_ccdf_monotone(self):
        """Test that sizes rise and counts fall strictly, starting from the total."""
        rng = np.random.default_rng(201)
        for _ in range(CASES):
            sizes = rng.integers(1, 400, int(rng.integers(1, 300)))
            points = build_ccdf(sizes).points
            assert points[0].count == sizes.size
            assert all(a.s < b.s and a.count > b.count for a, b in zip(points, points[1:]))
            assert points[-1].count == int(np.sum(sizes == sizes.max()))

    def test_fit_scale_invariance(self):
        """Test that multiplying counts changes only the intercept."""
        rng = np.random.default_rng(202)
        for _ in range(CASES):
            s = np.sort(rng.choice(np.arange(2, 5000), int(rng.integers(3, 40)), replace=False))
            counts = np.exp(rng.normal(0.0, 1.0, s.size)) * s ** -rng.uniform(0.5, 2.5)
            factor = float(rng.uniform(0.01, 100.0))
            base = fit_loglog(s, counts)
            scaled = fit_loglog(s, factor * counts)
            assert scaled.slope == pytest.approx(base.slope, rel=1e-9, abs=1e-9)
            assert scaled.intercept == pytest.approx(base.intercept + math.log(factor), rel=1e-9, abs=1e-9)


class TestModelProperties:
    """Properties of the microstate model and sampler."""

    def test_weight_permutation_invariance(self):
        """Test that ln W ignores component order."""
        rng = np.random.default_rng(301)
        for _ in range(CASES):
            t = rng.integers(0, 60, int(rng.integers(1, 8))).tolist()
            shuffled = rng.permutation(t).tolist()
            assert multinomial_weight(Microstate(t=t)) == pytest.approx(
                multinomial_weight(Microstate(t=shuffled)), rel=1e-12, abs=1e-12
            )

    def test_equilibrium_normalised(self):
        """Test that equilibrium probabilities sum to one and t* to T."""
        rng = np.random.default_rng(302)
        for _ in range(CASES):
            M = int(rng.integers(1, 30))
            system = EnsembleSystem(
                M=M, T=int(rng.integers(1, 10000)), epsilon=rng.uniform(0, 8, M).tolist(), beta=float(rng.normal(0, 5))
            )
            eq = boltzmann_equilibrium(system)
            assert sum(eq.p) == pytest.approx(1.0, abs=1e-12)
            assert sum(eq.t_star) == pytest.approx(system.T, rel=1e-12)

    def test_sampler_conserves_tokens(self):
        """Test that every chain ends with T tokens and accounts for every recorded step."""
        rng = np.random.default_rng(303)
        for case in range(CASES):
            M = int(rng.integers(1, 6))
            T = int(rng.integers(M, 40))
            system = EnsembleSystem(M=M, T=T, epsilon=rng.uniform(0, 4, M).tolist(), beta=float(rng.uniform(-2, 2)))
            summary = metropolis_sample(system, 300, seed=case, burn_in=50, batches=5)
            assert summary.final_state.T == T
            assert np.all(summary.histograms.sum(axis=1) == 250)
            assert summary.means.sum() == pytest.approx(T)

    def test_sampler_seed_determinism(self):
        """Test that one seed always gives the same chain."""
        rng = np.random.default_rng(304)
        for case in range(CASES):
            M = int(rng.integers(1, 6))
            T = int(rng.integers(M, 40))
            system = EnsembleSystem(M=M, T=T, epsilon=rng.uniform(0, 4, M).tolist(), beta=float(rng.uniform(-2, 2)))
            seed = int(rng.integers(0, 2**31))
            first = metropolis_sample(system, 200, seed=seed, burn_in=40, batches=4)
            second = metropolis_sample(system, 200, seed=seed, burn_in=40, batches=4)
            assert first.accepted == second.accepted
            assert first.final_state == second.final_state
            np.testing.assert_array_equal(first.histograms, second.histograms)
            np.testing.assert_array_equal(first.means, second.means)


class TestTokenizerProperties:
    """Properties of the tokenizer on arbitrary input."""

    def test_pieces_cover_source(self, c_spec):
        """Test that random character soup is consumed exactly and never raises."""
        rng = np.random.default_rng(401)
        lexer = c_spec.lexer()
        for _ in range(CASES):
            source = "".join(rng.choice(C_ALPHABET, int(rng.integers(0, 80))))
            pieces = list(lexer.pieces(source))
            assert "".join(source[p.start:p.end] for p in pieces) == source
            tokens = tokenize(source, c_spec)
            assert all(token.lexeme and token.symbol for token in tokens)

    def test_fixed_variable_partition(self):
        """Test that fixed tokens are exactly the registered lexemes in every bundled language."""
        rng = np.random.default_rng(402)
        registry = load_registry()
        specs = [registry.load_spec(name) for name in sorted(registry.languages)]
        for case in range(CASES):
            spec = specs[case % len(specs)]
            fixed = {spec.normalize(lexeme) for lexeme in spec.fixed_lexemes}
            symbols = fixed | set(spec.aliases.values())
            words = sorted(spec.fixed_lexemes) + ["x", "count", "Value_2", "0", "42", "3.5"]
            picked = rng.choice(words, int(rng.integers(1, 40)))
            source = " " + " ".join(w.lower() if rng.random() < 0.3 else w for w in picked) + "\n"
            for token in tokenize(source, spec):
                if token.token_class is TokenClass.FIXED:
                    assert spec.normalize(token.lexeme) in fixed
                    assert token.symbol in symbols
                else:
                    assert spec.normalize(token.lexeme) not in fixed


class TestSegmentationProperties:
    """Properties of component segmentation on generated files."""

    def test_file_token_conservation(self, c_spec):
        """Test that component tokens plus gap tokens add up to every token of a file."""
        rng = np.random.default_rng(501)
        for _ in range(CASES):
            tokens = tokenize(_random_c_program(rng), c_spec)
            spans = segment_components(tokens, c_spec)
            covered = set()
            for span in spans:
                assert span.tokens == tuple(tokens[span.first_token_index:span.last_token_index + 1])
                covered.update(range(span.first_token_index, span.last_token_index + 1))
            inside = sum(len(span) for span in spans)
            assert inside == len(covered)
            assert count_outside(len(tokens), spans) == len(tokens) - len(covered)
            assert inside + count_outside(len(tokens), spans) == len(tokens)
