"""Corpus scanning: walk source trees, tokenize, segment and measure.

Files are independent, so they can be scanned in worker processes; results are
merged in path order so a rescan of an unchanged tree gives identical records.
"""

import fnmatch
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from . import __version__
from .config import ERROR_MESSAGES
from .errors import InputError
from .lexicon import LanguageRegistry, load_registry, segment_components, tokenize
from .metrics import component_metrics
from .types import ComponentRecord, ComponentSpan, Diagnostics, LanguageShare, RunReport, ScanConfig

logger = logging.getLogger(__name__)


@dataclass
class FileScan:
    """Result of scanning one file."""
    path: str
    language: str
    lines: int = 0
    tokens: int = 0
    component_tokens: int = 0
    outside_tokens: int = 0
    records: List[ComponentRecord] = field(default_factory=list)
    diagnostics: Diagnostics = field(default_factory=Diagnostics)
    error: Optional[str] = None

    @property
    def conserved(self) -> bool:
        """Tokens in components plus tokens outside them add up to all tokens."""
        return self.tokens == self.component_tokens + self.outside_tokens


@dataclass
class ScanResult:
    """Everything a corpus scan produced."""
    records: List[ComponentRecord]
    files: List[FileScan]
    report: RunReport


@lru_cache(maxsize=8)
def _registry(registry_path: Optional[str]) -> LanguageRegistry:
    return load_registry(registry_path)


def count_lines(source: str) -> int:
    if not source:
        return 0
    return source.count("\n") + (0 if source.endswith("\n") else 1)


def count_outside(n_tokens: int, spans: List[ComponentSpan]) -> int:
    """Tokens in the gaps before, between and after the spans, counted from their indices.

    Raises:
        ValueError: If spans overlap or run past the end of the stream
    """
    outside = 0
    cursor = 0
    for span in sorted(spans, key=lambda s: s.first_token_index):
        if span.first_token_index < cursor or span.last_token_index >= n_tokens:
            raise ValueError(f"span '{span.name}' overlaps another span or runs past token {n_tokens}")
        outside += span.first_token_index - cursor
        cursor = span.last_token_index + 1
    return outside + n_tokens - cursor


def _matches(path: Path, patterns: List[str]) -> bool:
    posix = path.as_posix()
    return any(fnmatch.fnmatch(posix, p) or fnmatch.fnmatch(path.name, p) for p in patterns)


def discover_files(
    config: ScanConfig,
    registry: LanguageRegistry,
    diagnostics: Optional[Diagnostics] = None,
) -> List[Tuple[Path, str]]:
    """Files to scan with their language, sorted by path.

    Under ``language == "auto"`` files with an unregistered extension are
    skipped and counted as ``unknown_extension``.

    Raises:
        InputError: If a root does not exist
        ConfigError: If an explicit language is not registered
    """
    explicit = None if config.language == "auto" else registry.entry(config.language).name
    found: Dict[Path, str] = {}
    for root in config.roots:
        root_path = Path(root)
        if not root_path.exists():
            raise InputError(ERROR_MESSAGES["file_not_found"].format(file=root))
        candidates = [root_path] if root_path.is_file() else sorted(p for p in root_path.rglob("*") if p.is_file())
        for path in candidates:
            if config.include and not _matches(path, config.include):
                continue
            if config.exclude and _matches(path, config.exclude):
                continue
            language = explicit or registry.language_for(path)
            if language is None:
                if diagnostics is not None:
                    diagnostics.record("unknown_extension")
                continue
            found[path] = language
    return sorted(found.items(), key=lambda item: item[0].as_posix())


def scan_file(
    path: str,
    language: str,
    registry_path: Optional[str] = None,
    min_component_tokens: int = 1,
) -> FileScan:
    """Tokenize, segment and measure one file.

    The file is decoded as Latin-1 so every byte maps to one character; bytes
    that no rule accepts become ``unknown_character`` diagnostics. Read errors
    are captured in ``error`` rather than raised.
    """
    result = FileScan(path=path, language=language)
    try:
        source = Path(path).read_bytes().decode("latin-1")
    except OSError as e:
        result.error = f"cannot read {path}: {e}"
        result.diagnostics.record("unreadable_file", result.error)
        return result

    spec = _registry(registry_path).load_spec(language)
    tokens = tokenize(source, spec, diagnostics=result.diagnostics, file=path)
    spans = segment_components(tokens, spec, file=path, diagnostics=result.diagnostics)

    result.lines = count_lines(source)
    result.tokens = len(tokens)
    result.component_tokens = sum(len(span) for span in spans)
    result.outside_tokens = count_outside(len(tokens), spans)

    for span in spans:
        if len(span) < min_component_tokens:
            result.diagnostics.record("below_min_tokens")
            continue
        result.records.append(component_metrics(span))
    return result


def _composition(files: List[FileScan]) -> List[LanguageShare]:
    shares: Dict[str, LanguageShare] = {}
    for scan in files:
        share = shares.setdefault(
            scan.language, LanguageShare(language=scan.language, files=0, components=0, tokens=0, lines=0)
        )
        share.files += 1
        share.components += len(scan.records)
        share.tokens += sum(record.t for record in scan.records)
        share.lines += scan.lines
    return sorted(shares.values(), key=lambda share: (-share.tokens, share.language))


def scan_corpus(
    config: ScanConfig,
    registry_path: Optional[str] = None,
    on_file: Optional[Callable[[FileScan], None]] = None,
) -> ScanResult:
    """Scan every analyzable file under ``config.roots``.

    Args:
        config: Roots, language, globs, minimum component size and job count
        registry_path: Language registry YAML; the bundled one by default
        on_file: Called after each file finishes, in completion order

    Returns:
        ScanResult with records ordered by file path then position

    Raises:
        InputError: If a root is missing or no analyzable file is found
    """
    started = time.perf_counter()
    registry = _registry(registry_path)
    diagnostics = Diagnostics()
    files = discover_files(config, registry, diagnostics)
    if not files:
        raise InputError(ERROR_MESSAGES["no_analyzable_files"].format(roots=", ".join(config.roots)))
    discovered = time.perf_counter()
    logger.info(f"Scanning {len(files)} files with {config.jobs} job(s)")

    scans: Dict[str, FileScan] = {}
    if config.jobs <= 1:
        for path, language in files:
            scan = scan_file(str(path), language, registry_path, config.min_component_tokens)
            scans[scan.path] = scan
            if on_file is not None:
                on_file(scan)
    else:
        with ProcessPoolExecutor(max_workers=config.jobs) as executor:
            futures = [
                executor.submit(scan_file, str(path), language, registry_path, config.min_component_tokens)
                for path, language in files
            ]
            for future in as_completed(futures):
                scan = future.result()
                scans[scan.path] = scan
                if on_file is not None:
                    on_file(scan)
    scanned = time.perf_counter()

    ordered = [scans[str(path)] for path, _ in files]
    records: List[ComponentRecord] = []
    for scan in ordered:
        if scan.error:
            logger.warning(scan.error)
        diagnostics.merge(scan.diagnostics)
        records.extend(scan.records)

    report = RunReport(
        tool_version=__version__,
        roots=list(config.roots),
        files_scanned=sum(1 for scan in ordered if scan.error is None),
        T=sum(record.t for record in records),
        M=len(records),
        I=math.fsum(record.info for record in records),
        small_components=sum(1 for record in records if record.is_small),
        diagnostics=diagnostics,
        composition=_composition(ordered),
        timing={
            "discover": discovered - started,
            "scan": scanned - discovered,
            "total": time.perf_counter() - started,
        },
    )
    logger.info(f"Scanned {report.files_scanned} files: {report.M} components, {report.T} tokens")
    return ScanResult(records=records, files=ordered, report=report)
