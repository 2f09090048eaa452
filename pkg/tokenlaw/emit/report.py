"""Run reports: JSON for machines, HTML for people."""

import logging
from pathlib import Path
from typing import Dict, Optional, Sequence

from jinja2 import Template

from ..config import OUTPUT_FILES, REPORT_TEMPLATE
from ..errors import InputError
from ..types import ComponentRecord, RunReport

logger = logging.getLogger(__name__)

LARGEST_SHOWN = 20


def write_json_report(report: RunReport, output_path: Path) -> Path:
    """Serialize the report; ``read_json_report`` restores it unchanged."""
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote JSON report to {output_path}")
    return output_path


def read_json_report(path: Path) -> RunReport:
    if not path.is_file():
        raise InputError(f"File '{path}' not found")
    return RunReport.model_validate_json(path.read_text(encoding="utf-8"))


def write_html_report(
    report: RunReport,
    output_path: Path,
    records: Optional[Sequence[ComponentRecord]] = None,
) -> Path:
    """Render the HTML report, listing the largest components when given records."""
    template = Template(REPORT_TEMPLATE.read_text(encoding="utf-8"))
    largest = sorted(records or [], key=lambda record: (-record.t, record.file, record.name))[:LARGEST_SHOWN]
    html = template.render(report=report, largest=largest, diagnostics=sorted(report.diagnostics.counts.items()))
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(html, encoding="utf-8")
    logger.info(f"Wrote HTML report to {output_path}")
    return output_path


def write_reports(
    report: RunReport,
    output_dir: Path,
    records: Optional[Sequence[ComponentRecord]] = None,
) -> Dict[str, Path]:
    """Write ``report.json`` and ``report.html`` into ``output_dir``.

    Returns:
        Paths by report type
    """
    output_dir.mkdir(parents=True, exist_ok=True)
    written = {
        "json": write_json_report(report, output_dir / OUTPUT_FILES["report_json"]),
        "html": write_html_report(report, output_dir / OUTPUT_FILES["report_html"], records),
    }
    logger.info(f"Wrote {len(written)} report files")
    return written
