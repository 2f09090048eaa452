"""Command-line interface for Tokenlaw."""

import logging
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple

import click
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from . import __version__
from .config import CONSOLE_STYLES, DEFAULT_CONFIG, EXIT_CODES, OUTPUT_FILES, SUCCESS_MESSAGES
from .distfit import build_ccdf, fit_tail, predicted_shape_check
from .emit import read_records, write_ccdf_csv, write_json, write_plot_data, write_records, write_reports
from .ensemble import ExperimentKind, ExperimentResult, load_experiment_config, run_experiment
from .errors import AnalysisError, ConfigError, InputError, InsufficientDataError
from .genome import Kingdom, kingdom_regression, load_gene_lengths, uniformity_check, write_gene_lengths
from .lexicon import load_registry
from .metrics import alphabet_growth_regression, summarize_corpus
from .scan import FileScan, scan_corpus
from .stats import clamp_p_value, student_t_two_sided
from .synth import constant_kingdom, power_law_sizes, records_from_sizes, uniform_kingdom, write_c_corpus
from .types import LinearFit, Measure, OutputFormat, ScanConfig

logger = logging.getLogger(__name__)

# Recent typer releases raise these from a vendored copy of click.
try:
    from typer._click import exceptions as _vendored_click
except ImportError:
    _vendored_click = None

CLICK_ERRORS: Tuple[type, ...] = (click.ClickException,)
CLICK_ABORTS: Tuple[type, ...] = (click.Abort,)
if _vendored_click is not None:
    CLICK_ERRORS += (_vendored_click.ClickException,)
    CLICK_ABORTS += (_vendored_click.Abort,)

# Create Typer app
app = typer.Typer(
    name="tokenlaw",
    help="Token-level structure of source code and gene lengths against the conservation model",
    add_completion=False,
)

# Create console for rich output
console = Console()


@dataclass
class GlobalOptions:
    """Flags shared by every command."""
    output: Path
    format: OutputFormat
    seed: Optional[int]
    verbose: bool


class SynthKind(str, Enum):
    """Fixtures the ``synth`` command can write."""
    CORPUS = "corpus"
    GENES = "genes"
    RECORDS = "records"


def setup_logging(verbose: bool = False) -> None:
    """Setup logging configuration.

    Args:
        verbose: Whether to enable verbose logging
    """
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )


@contextmanager
def handle_errors() -> Iterator[None]:
    """Turn library errors into console messages and the documented exit codes."""
    try:
        yield
    except (InputError, AnalysisError) as e:
        console.print(f"[{CONSOLE_STYLES['error']}]Error: {e}[/{CONSOLE_STYLES['error']}]")
        raise typer.Exit(EXIT_CODES["input"])
    except typer.Exit:
        raise
    except Exception as e:
        logger.exception("Unexpected failure")
        console.print(f"[{CONSOLE_STYLES['error']}]Internal error: {e}[/{CONSOLE_STYLES['error']}]")
        raise typer.Exit(EXIT_CODES["internal"])


def _options(ctx: typer.Context) -> GlobalOptions:
    if isinstance(ctx.obj, GlobalOptions):
        return ctx.obj
    return GlobalOptions(
        output=Path(DEFAULT_CONFIG["output"]), format=OutputFormat.CSV, seed=None, verbose=False
    )


def _fmt(value: Optional[float], spec: str = ".6g") -> str:
    return "NA" if value is None else format(value, spec)


def print_banner(title: str) -> None:
    """Print a command banner."""
    console.print(Panel(f"[bold cyan]Tokenlaw[/bold cyan] {title}", border_style="cyan", padding=(0, 2)))


def print_coefficients(fit: LinearFit, label: str = "x") -> None:
    """Print a fit the way a regression summary lays it out."""
    table = Table(title="Coefficients", show_header=True, header_style="bold magenta")
    table.add_column("", style="cyan")
    table.add_column("Estimate", justify="right")
    table.add_column("Std. Error", justify="right")
    table.add_column("t value", justify="right")
    table.add_column("Pr(>|t|)", justify="right")

    if fit.intercept_stderr > 0:
        t_intercept: Optional[float] = fit.intercept / fit.intercept_stderr
        p_intercept, clamped = clamp_p_value(student_t_two_sided(t_intercept, fit.df))
        p_text = f"< {p_intercept:.1e}" if clamped else f"{p_intercept:.4g}"
    else:
        t_intercept, p_text = None, "NA"
    table.add_row("(Intercept)", _fmt(fit.intercept), _fmt(fit.intercept_stderr), _fmt(t_intercept, ".1f"), p_text)
    table.add_row(label, _fmt(fit.slope), _fmt(fit.slope_stderr), _fmt(fit.t_value, ".1f"), fit.p_value_display)
    console.print(table)
    console.print(f"Residual standard error: {fit.residual_stderr:.4g} on {fit.df} degrees of freedom")
    console.print(f"Multiple R-squared: {_fmt(fit.r_squared, '.4f')}, points: {fit.n_points}")


@app.callback()
def main_callback(
    ctx: typer.Context,
    output: Path = typer.Option(Path(DEFAULT_CONFIG["output"]), "--output", "-o", help="Output directory"),
    format_type: OutputFormat = typer.Option(OutputFormat.CSV, "--format", "-f", help="Record format (csv/json)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed overriding configured seeds"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Verbose output"),
) -> None:
    """Measure token structure of code and genes; fit and simulate size distributions."""
    setup_logging(verbose)
    ctx.obj = GlobalOptions(output=output, format=format_type, seed=seed, verbose=verbose)


@app.command()
def scan(
    ctx: typer.Context,
    roots: List[Path] = typer.Argument(..., help="Files or directories to scan"),
    language: str = typer.Option("auto", "--language", "-l", help="Language name, or auto by extension"),
    include: Optional[List[str]] = typer.Option(None, "--include", help="Glob a file must match (repeatable)"),
    exclude: Optional[List[str]] = typer.Option(None, "--exclude", help="Glob that skips a file (repeatable)"),
    min_tokens: int = typer.Option(1, "--min-tokens", help="Smallest component kept"),
    jobs: int = typer.Option(1, "--jobs", "-j", help="Worker processes"),
    registry: Optional[Path] = typer.Option(None, "--registry", "-r", help="Custom language registry"),
) -> None:
    """Tokenize and segment source trees and write component records."""
    options = _options(ctx)
    with handle_errors():
        try:
            config = ScanConfig(
                roots=[str(root) for root in roots],
                language=language,
                include=include or [],
                exclude=exclude or [],
                min_component_tokens=min_tokens,
                output=str(options.output),
                jobs=jobs,
            )
        except ValidationError as e:
            raise ConfigError(f"Invalid scan options: {e.errors()[0]['msg']}") from e

        with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console) as progress:
            task = progress.add_task("Scanning...", total=None)

            def on_file(scan_result: FileScan) -> None:
                progress.update(task, description=f"Scanned {scan_result.path}")

            result = scan_corpus(config, str(registry) if registry else None, on_file=on_file)
            progress.update(task, description=f"Scanned {result.report.files_scanned} files")

        suffix = "records_json" if options.format is OutputFormat.JSON else "records_csv"
        records_path = write_records(result.records, options.output / OUTPUT_FILES[suffix], options.format)
        result.report.records_path = str(records_path)
        write_reports(result.report, options.output, result.records)

    report = result.report
    table = Table(title="Corpus Composition", show_header=True, header_style="bold magenta")
    table.add_column("Language", style="cyan")
    table.add_column("Files", justify="right")
    table.add_column("Lines", justify="right")
    table.add_column("Components", justify="right")
    table.add_column("Tokens", justify="right")
    table.add_column("Share", style="yellow", justify="right")
    for share in report.composition:
        percent = f"{100.0 * share.tokens / report.T:.1f}%" if report.T else "-"
        table.add_row(share.language, str(share.files), str(share.lines), str(share.components), str(share.tokens), percent)
    table.add_row("Total", str(report.files_scanned), "", str(report.M), str(report.T), "", style="bold")
    console.print(table)

    if report.diagnostics.total:
        skipped = ", ".join(f"{kind}={count}" for kind, count in sorted(report.diagnostics.counts.items()))
        console.print(f"[{CONSOLE_STYLES['warning']}]Skipped: {skipped}[/{CONSOLE_STYLES['warning']}]")
    console.print(f"I = {report.I:.2f} nats, components with t < 10: {report.small_components}")
    console.print(
        f"[{CONSOLE_STYLES['success']}]"
        + SUCCESS_MESSAGES["records_written"].format(count=report.M, path=records_path)
        + f"[/{CONSOLE_STYLES['success']}]"
    )


@app.command()
def fit(
    ctx: typer.Context,
    records_path: Path = typer.Argument(..., help="Records file written by scan (.csv or .json)"),
    measure: Measure = typer.Option(Measure.TOKENS, "--measure", "-m", help="Size measure (tokens/alphabet)"),
    s_min: float = typer.Option(30, "--s-min", help="Smallest size in the fit"),
    s_max: float = typer.Option(3000, "--s-max", help="Largest size in the fit"),
) -> None:
    """Fit the power-law tail of the component-size ccdf."""
    options = _options(ctx)
    with handle_errors():
        records = read_records(records_path)
        summary = summarize_corpus(records)
        sizes = [record.t if measure is Measure.TOKENS else record.a for record in records]
        curve = build_ccdf(sizes, measure=measure)
        tail = fit_tail(curve, s_min, s_max)

        shape = None
        try:
            shape = predicted_shape_check(curve)
        except InsufficientDataError as e:
            logger.info(f"Shape check skipped: {e}")
        growth = None
        try:
            growth = alphabet_growth_regression(records)
        except AnalysisError as e:
            logger.info(f"Alphabet growth skipped: {e}")

        payload: Dict[str, Any] = {
            "records": str(records_path),
            "measure": measure.value,
            "summary": {"T": summary.T, "M": summary.M, "I": summary.I},
            "ccdf_points": len(curve.points),
            "fit": tail.model_dump(mode="json"),
            "p_value_display": tail.p_value_display,
            "shape": shape.model_dump(mode="json") if shape else None,
            "alphabet_growth": growth.model_dump(mode="json", exclude={"ratios"}) if growth else None,
        }
        write_json(payload, options.output / OUTPUT_FILES["fit_json"])
        write_ccdf_csv(curve, options.output / OUTPUT_FILES["ccdf_csv"])
        write_plot_data(curve, options.output / OUTPUT_FILES["plot_data"])

    console.print(f"T = {summary.T}, M = {summary.M}, I = {summary.I:.2f} nats")
    print_coefficients(tail, label=f"ln({measure.value})")
    if shape is not None:
        console.print(
            f"Shape: head slope {shape.head_slope:.3f} over {shape.head_range}, "
            f"tail slope {shape.tail_slope:.3f} over {shape.tail_range}, knee near {shape.knee_estimate}"
        )
    console.print(
        f"[{CONSOLE_STYLES['success']}]"
        + SUCCESS_MESSAGES["fit_complete"].format(points=tail.n_points, s_min=s_min, s_max=s_max)
        + f"[/{CONSOLE_STYLES['success']}]"
    )


def _print_system_result(result: ExperimentResult) -> None:
    table = Table(title=f"Experiment '{result.name}' ({result.method})", show_header=True, header_style="bold magenta")
    table.add_column("i", style="cyan", justify="right")
    table.add_column("eps", justify="right")
    table.add_column("t*", justify="right")
    if result.exact_means is not None:
        table.add_column("exact mean", justify="right")
    if result.sample is not None:
        table.add_column("sampled mean", justify="right")
        table.add_column("± se", justify="right")
    if result.oracle:
        table.add_column("|delta|/se", style="yellow", justify="right")
    for i, (eps, t_star) in enumerate(zip(result.system.epsilon, result.equilibrium.t_star)):
        row = [str(i), f"{eps:.4f}", f"{t_star:.3f}"]
        if result.exact_means is not None:
            row.append(f"{result.exact_means[i]:.3f}")
        if result.sample is not None:
            row.append(f"{result.sample['means'][i]:.3f}")
            row.append(f"{result.sample['stderr'][i]:.3f}")
        if result.oracle:
            row.append(_fmt(result.oracle[i].delta_in_stderr, ".2f"))
        table.add_row(*row)
    console.print(table)
    if result.exact_mode is not None:
        console.print(f"Most likely state: {tuple(result.exact_mode)} of {result.states} states")
    if result.undersupplied:
        console.print(
            f"[yellow]T={result.system.T} < M={result.system.M}: every state leaves a component empty "
            f"(empty-component mass {_fmt(result.empty_component_mass, '.3f')})[/yellow]"
        )
    if result.sample is not None:
        console.print(
            f"Acceptance rate {result.sample['acceptance_rate']:.3f}, "
            f"half-chain drift {result.sample['half_drift']:.2f} se"
        )


def _print_emergence_result(result: ExperimentResult) -> None:
    emergence = result.emergence
    if emergence is None:
        return
    table = Table(title=f"Power-law emergence '{result.name}'", show_header=True, header_style="bold magenta")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    table.add_row("components", str(len(emergence.alphabet_sizes)))
    table.add_row("beta", f"{emergence.beta:.4f}")
    table.add_row(f"recovered ccdf exponent ({emergence.exponent_source})", _fmt(emergence.recovered_exponent, ".4f"))
    table.add_row("target -beta+1", f"{emergence.target_exponent:.4f}")
    table.add_row("delta", _fmt(emergence.delta, "+.4f"), style="yellow")
    if emergence.density_fit is not None:
        table.add_row("density fit R²", _fmt(emergence.density_fit.r_squared, ".5f"))
    if emergence.ccdf_fit is not None and emergence.ccdf_fit.fit_range is not None:
        low, high = emergence.ccdf_fit.fit_range
        table.add_row(f"cell-weighted ccdf slope over [{low:g}, {high:g}]", f"{emergence.ccdf_fit.slope:.4f}")
    table.add_row("max |mean - t*| / t*", f"{emergence.max_relative_deviation:.4f}")
    console.print(table)
    if emergence.degenerate:
        console.print(f"[{CONSOLE_STYLES['warning']}]All alphabets are equal: no power law to recover[/{CONSOLE_STYLES['warning']}]")


@app.command()
def simulate(
    ctx: typer.Context,
    config_path: Path = typer.Argument(..., help="Experiment configuration (JSON)"),
    jobs: int = typer.Option(1, "--jobs", "-j", help="Worker processes for independent chains"),
) -> None:
    """Run an ensemble experiment: exact enumeration, sampling or power-law emergence."""
    options = _options(ctx)
    with handle_errors():
        config = load_experiment_config(config_path)
        with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console) as progress:
            task = progress.add_task(f"Running '{config.name}'...", total=None)
            result = run_experiment(config, seed=options.seed, jobs=jobs)
            progress.update(task, description=f"Finished '{config.name}'")

        write_json(result.model_dump(mode="json"), options.output / OUTPUT_FILES["experiment_json"])
        if result.emergence is not None and result.emergence.ccdf is not None:
            write_plot_data(result.emergence.ccdf, options.output / OUTPUT_FILES["plot_data"])
            write_ccdf_csv(result.emergence.ccdf, options.output / OUTPUT_FILES["ccdf_csv"])

    if result.kind is ExperimentKind.EMERGENCE:
        _print_emergence_result(result)
    else:
        _print_system_result(result)
    console.print(
        f"[{CONSOLE_STYLES['success']}]"
        + SUCCESS_MESSAGES["simulation_complete"].format(seconds=result.elapsed)
        + f"[/{CONSOLE_STYLES['success']}]"
    )


@app.command()
def genes(
    ctx: typer.Context,
    csv_path: Path = typer.Argument(..., help="Gene-length CSV"),
    kingdom: Optional[Kingdom] = typer.Option(None, "--kingdom", "-k", help="Kingdom to regress; all by default"),
) -> None:
    """Regress total coding length on gene count and check length uniformity."""
    options = _options(ctx)
    with handle_errors():
        sets = load_gene_lengths(csv_path)
        wanted = [kingdom] if kingdom else sorted({s.kingdom for s in sets}, key=lambda k: k.value)
        regressions = []
        failures: List[InsufficientDataError] = []
        for label in wanted:
            try:
                regressions.append(kingdom_regression(sets, label))
            except InsufficientDataError as e:
                if kingdom is not None:
                    raise
                logger.warning(str(e))
                failures.append(e)
        if not regressions:
            raise failures[0]

        uniformity = []
        skipped = []
        for gene_set in sets:
            if kingdom is not None and gene_set.kingdom is not kingdom:
                continue
            try:
                uniformity.append(uniformity_check(gene_set))
            except InsufficientDataError as e:
                skipped.append({"species": gene_set.species, "reason": str(e)})

        payload = {
            "file": str(csv_path),
            "regressions": [r.model_dump(mode="json") for r in regressions],
            "uniformity": [
                {**u.model_dump(mode="json"), "ccdf_tail_slope_flag": u.ccdf_tail_slope_flag} for u in uniformity
            ],
            "skipped_species": skipped,
        }
        write_json(payload, options.output / OUTPUT_FILES["genes_json"])

    table = Table(title="Kingdom Regressions (T = k' M)", show_header=True, header_style="bold magenta")
    table.add_column("Kingdom", style="cyan")
    table.add_column("Species", justify="right")
    table.add_column("k'", justify="right")
    table.add_column("Std. Error", justify="right")
    table.add_column("Mean length", justify="right")
    table.add_column("R²", justify="right")
    for regression in regressions:
        table.add_row(
            regression.kingdom.value,
            str(len(regression.species)),
            f"{regression.k_prime:.4f}",
            f"{regression.fit.slope_stderr:.4g}",
            f"{regression.mean_length:.4f}",
            _fmt(regression.fit.r_squared, ".6f"),
        )
    console.print(table)
    flagged = [u.species for u in uniformity if u.power_law]
    console.print(
        f"Uniformity: {len(uniformity)} species checked, {len(flagged)} with a power-law tail"
        + (f" ({', '.join(flagged)})" if flagged else "")
    )


@app.command()
def languages(
    registry: Optional[Path] = typer.Option(None, "--registry", "-r", help="Custom language registry"),
) -> None:
    """List registered languages and their file extensions."""
    with handle_errors():
        loaded = load_registry(registry)
    table = Table(title=f"Languages ({loaded.name})", show_header=True, header_style="bold magenta")
    table.add_column("Language", style="cyan")
    table.add_column("Extensions")
    table.add_column("Spec file")
    table.add_column("Components")
    for entry in loaded.languages.values():
        table.add_row(
            entry.name,
            " ".join(entry.extensions),
            entry.spec,
            "best effort" if entry.best_effort else "[green]normative[/green]",
        )
    console.print(table)


@app.command()
def synth(
    ctx: typer.Context,
    kind: SynthKind = typer.Argument(..., help="What to generate (corpus/genes/records)"),
    count: Optional[int] = typer.Option(None, "--count", "-n", help="Functions, species per kingdom, or ignored"),
) -> None:
    """Write a synthetic fixture with declared parameters into the output directory."""
    options = _options(ctx)
    seed = options.seed if options.seed is not None else 7
    with handle_errors():
        started = time.perf_counter()
        if kind is SynthKind.CORPUS:
            paths = write_c_corpus(options.output / "corpus", functions=count or 600, seed=seed)
            target = options.output / "corpus"
            detail = f"{len(paths)} files"
        elif kind is SynthKind.GENES:
            per_kingdom = count or 5
            counts = [200 + 50 * k for k in range(per_kingdom)]
            sets = uniform_kingdom(counts, 400, 1400, seed, Kingdom.PROKARYOTE, prefix="prok")
            sets += uniform_kingdom(counts, 900, 1900, seed + 1, Kingdom.EUKARYOTE, prefix="euk")
            sets += constant_kingdom([40, 60, 80], 1000, Kingdom.OTHER, prefix="const")
            target = write_gene_lengths(sets, options.output / "genes.csv")
            detail = f"{len(sets)} species"
        else:
            records = records_from_sizes(power_law_sizes(scale=1e5))
            target = write_records(records, options.output / OUTPUT_FILES["records_csv"])
            detail = f"{len(records)} records"
    console.print(
        f"[{CONSOLE_STYLES['success']}]Wrote {kind.value} fixture ({detail}) to {target} "
        f"in {time.perf_counter() - started:.2f}s[/{CONSOLE_STYLES['success']}]"
    )


@app.command()
def version() -> None:
    """Show Tokenlaw version."""
    console.print(f"Tokenlaw version {__version__}")


def main() -> None:
    """Main entry point; exit codes 0 ok, 1 usage, 2 input, 3 internal."""
    try:
        code = app(standalone_mode=False)
    except CLICK_ERRORS as e:
        e.show()
        sys.exit(EXIT_CODES["usage"])
    except CLICK_ABORTS:
        sys.exit(EXIT_CODES["usage"])
    sys.exit(code if isinstance(code, int) else EXIT_CODES["ok"])


if __name__ == "__main__":
    main()
