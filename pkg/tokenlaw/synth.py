"""Synthetic fixtures with declared parameters.

Everything here is seeded through ``numpy.random.default_rng`` so a fixture is
reproducible from its arguments alone.
"""

import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from .ensemble.model import EnsembleSystem
from .ensemble.sampler import metropolis_sample
from .genome import GeneSet, Kingdom
from .types import ComponentRecord

logger = logging.getLogger(__name__)


def power_law_sizes(
    exponent: float = 1.125,
    s_min: int = 30,
    s_max: int = 3000,
    scale: float = 1e6,
) -> List[int]:
    """Size multiset whose ccdf is round(scale * s^-exponent) on [s_min, s_max].

    Items larger than s_max are piled onto s_max, so the count at s_max is exact
    too.
    """
    if not 1 <= s_min < s_max:
        raise ValueError(f"need 1 <= s_min < s_max, got {s_min}, {s_max}")
    s = np.arange(s_min, s_max + 2, dtype=float)
    target = np.rint(scale * s ** -exponent).astype(np.int64)
    per_size = target[:-1] - target[1:]
    per_size[-1] = target[-2]
    sizes = np.repeat(np.arange(s_min, s_max + 1), per_size)
    return sizes.tolist()


def pareto_lengths(n: int, exponent: float, s_min: int, seed: int) -> List[int]:
    """n integer lengths with ccdf ~ s^-exponent above s_min (inverse transform)."""
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    return np.floor(s_min * (1.0 - u) ** (-1.0 / exponent)).astype(np.int64).tolist()


def constant_kingdom(
    gene_counts: Sequence[int],
    length: int,
    kingdom: Union[Kingdom, str] = Kingdom.PROKARYOTE,
    prefix: str = "const",
) -> List[GeneSet]:
    """Species whose genes all have the same length."""
    kingdom = Kingdom(kingdom)
    return [
        GeneSet(species=f"{prefix}_{k:03d}", kingdom=kingdom, lengths=[length] * count)
        for k, count in enumerate(gene_counts)
    ]


def uniform_kingdom(
    gene_counts: Sequence[int],
    low: int,
    high: int,
    seed: int,
    kingdom: Union[Kingdom, str] = Kingdom.PROKARYOTE,
    prefix: str = "unif",
) -> List[GeneSet]:
    """Species with lengths uniform on [low, high], mean (low + high) / 2."""
    kingdom = Kingdom(kingdom)
    rng = np.random.default_rng(seed)
    return [
        GeneSet(
            species=f"{prefix}_{k:03d}",
            kingdom=kingdom,
            lengths=rng.integers(low, high + 1, count).tolist(),
        )
        for k, count in enumerate(gene_counts)
    ]


def sampler_gene_sets(
    gene_counts: Sequence[int],
    mean_length: int,
    seed: int,
    kingdom: Union[Kingdom, str] = Kingdom.PROKARYOTE,
    alphabet: int = 4,
    beta: float = 1.0,
    steps: Optional[int] = None,
    prefix: str = "sampled",
) -> List[GeneSet]:
    """Gene sets cut from one sampled microstate over a fixed alphabet.

    All genes of all species form one system of sum(gene_counts) components
    sharing ``mean_length`` tokens each on average, every component with
    eps = ln(alphabet). The final state of the chain is split into species in
    order.
    """
    kingdom = Kingdom(kingdom)
    M = sum(gene_counts)
    T = M * mean_length
    system = EnsembleSystem(M=M, T=T, epsilon=[math.log(alphabet)] * M, beta=beta)
    steps = steps or 4 * T
    summary = metropolis_sample(system, steps, seed)
    lengths = summary.final_state.t
    if min(lengths) < 1:
        raise ValueError("sampled state left a gene empty; raise mean_length")

    sets = []
    start = 0
    for k, count in enumerate(gene_counts):
        sets.append(
            GeneSet(species=f"{prefix}_{k:03d}", kingdom=kingdom, lengths=lengths[start : start + count])
        )
        start += count
    logger.debug(f"Cut {len(sets)} species from a sampled state of {M} genes, T={T}")
    return sets


def records_from_sizes(sizes: Sequence[int], prefix: str = "c", file: str = "synthetic.c") -> List[ComponentRecord]:
    """Component records with the given token counts.

    The alphabet grows slowly with size (a fixed part capped at 20), which is
    all a record needs to be valid.
    """
    records = []
    for k, t in enumerate(sizes):
        a_fixed = min(20, t)
        a_var = min(t - a_fixed, max(0, int(round(math.sqrt(t)))))
        records.append(ComponentRecord.from_counts(f"{prefix}{k}", file, int(t), a_fixed, a_var))
    return records


_STATEMENTS = (
    "    x = x + {n};",
    "    y = y * {n} - x;",
    "    if (x > {n}) {{ x = x - y; }}",
    "    while (y < {n}) {{ y = y + x + 1; }}",
    "    z = helper_{m}(x, y) ^ {n};",
    "    for (i = 0; i < {n}; i++) {{ z += i; }}",
    "    if (y != {n} && x <= z) {{ y = z; }} else {{ z = y; }}",
)


def write_c_corpus(
    directory: Union[str, Path],
    functions: int = 600,
    seed: int = 7,
    exponent: float = 1.1,
    accessor_fraction: float = 0.03,
    per_file: int = 40,
    max_statements: int = 800,
) -> List[Path]:
    """Write a synthetic C corpus with flat-head, power-tail function sizes.

    A small share of functions are one-line accessors; the rest have a
    Pareto-distributed statement count starting at 16, so sizes below ten times
    the smallest function are rare and the ccdf head is flat.

    Returns:
        Paths of the written files
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    accessors = rng.random(functions) < accessor_fraction
    counts = np.minimum(np.floor(16 * (1.0 - rng.random(functions)) ** (-1.0 / exponent)), max_statements)
    choices = rng.integers(0, len(_STATEMENTS), int(counts.sum()))
    literals = rng.integers(1, 1000, int(counts.sum()))

    paths = []
    used = 0
    for first in range(0, functions, per_file):
        lines = ["/* generated */", "static int counter;", ""]
        for k in range(first, min(first + per_file, functions)):
            if accessors[k]:
                lines.append(f"int get_{k}(void) {{ return counter; }}")
                lines.append("")
                continue
            lines.append(f"static int helper_{k}(int x, int y)")
            lines.append("{")
            lines.append("    int z = 0, i;")
            for _ in range(int(counts[k])):
                template = _STATEMENTS[int(choices[used])]
                lines.append(template.format(n=int(literals[used]), m=k))
                used += 1
            lines.append("    return x + y + z;")
            lines.append("}")
            lines.append("")
        path = directory / f"unit_{first // per_file:03d}.c"
        path.write_text("\n".join(lines) + "\n", encoding="latin-1")
        paths.append(path)
    logger.info(f"Wrote {functions} functions in {len(paths)} files under {directory}")
    return paths
