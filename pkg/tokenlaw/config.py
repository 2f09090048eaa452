"""Configuration constants and paths for Tokenlaw."""

from pathlib import Path
from typing import Any, Dict, Tuple

# Project root directory
PROJECT_ROOT = Path(__file__).parent.parent

# Language registry and bundled specification files
DEFAULT_REGISTRY_PATH = PROJECT_ROOT / "registry" / "languages.yaml"
LANGUAGE_SPEC_DIR = PROJECT_ROOT / "registry" / "lang"

# Bundled fixtures
CORPORA_DIR = PROJECT_ROOT / "corpora"
EXPERIMENTS_DIR = PROJECT_ROOT / "experiments"

# Template paths
TEMPLATE_DIR = PROJECT_ROOT / "tokenlaw" / "runtime"
REPORT_TEMPLATE = TEMPLATE_DIR / "report.html.j2"

OUTPUT_FILES = {
    "records_csv": "records.csv",
    "records_json": "records.json",
    "report_json": "report.json",
    "report_html": "report.html",
    "fit_json": "fit.json",
    "ccdf_csv": "ccdf.csv",
    "plot_data": "ccdf.dat",
    "experiment_json": "experiment.json",
    "genes_json": "genes.json",
}

RECORD_CSV_HEADER = ("name", "file", "t", "a_fixed", "a_var", "a", "info")

# Fitting
DEFAULT_FIT_RANGE: Tuple[int, int] = (30, 3000)
P_VALUE_FLOOR = 2.2e-16
MIN_FIT_POINTS = 3
MIN_SHAPE_POINTS = 10
POWER_LAW_MIN_DECADES = 1.0
POWER_LAW_MIN_R_SQUARED = 0.9

# Metrics
SMALL_COMPONENT_TOKENS = 10
FIXED_ALPHABET_OBSERVATION = 30

# Ensemble
DEFAULT_BURN_IN_FRACTION = 0.1
DEFAULT_BATCHES = 50
DEFAULT_MAX_STATES = 1_000_000
SAMPLER_CHUNK = 65_536

# Genome
MIN_SPECIES = 3
MIN_GENES = 30
GENETIC_ALPHABET = frozenset("acgt")

# Diagnostics
MAX_DIAGNOSTIC_MESSAGES = 200

# CLI exit codes
EXIT_CODES = {
    "ok": 0,
    "usage": 1,
    "input": 2,
    "internal": 3,
}

# Error messages
ERROR_MESSAGES = {
    "file_not_found": "File '{file}' not found",
    "no_analyzable_files": "no analyzable files under {roots}",
    "unknown_language": "Unknown language '{language}'",
    "invalid_json": "Invalid JSON in file '{file}': {error}",
    "invalid_yaml": "Invalid YAML in file '{file}': {error}",
    "fit_range": "fewer than {minimum} points with size in [{s_min}, {s_max}] (found {found})",
    "degenerate_fit": "degenerate fit: {reason}",
    "state_space": "state space of {states} compositions exceeds max_states={max_states}; use the Metropolis sampler",
    "insufficient_species": "kingdom '{kingdom}' has {found} species, at least {minimum} required",
    "insufficient_genes": "species '{species}' has {found} genes, at least {minimum} required",
}

# Success messages
SUCCESS_MESSAGES = {
    "scan_complete": "Scanned {files} files: {components} components, {tokens} tokens",
    "records_written": "Wrote {count} records to {path}",
    "fit_complete": "Fitted {points} points in [{s_min}, {s_max}]",
    "simulation_complete": "Simulation finished in {seconds:.2f}s",
}

# Console colors and styling
CONSOLE_STYLES = {
    "success": "green",
    "warning": "yellow",
    "error": "red",
    "info": "blue",
    "header": "bold cyan",
    "subheader": "cyan",
    "code": "dim",
}

# Default configuration
DEFAULT_CONFIG: Dict[str, Any] = {
    "output": "./tokenlaw-out",
    "format": "csv",
    "language": "auto",
    "measure": "tokens",
    "min_component_tokens": 1,
    "jobs": 1,
}
