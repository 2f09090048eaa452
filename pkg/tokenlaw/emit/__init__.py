"""Output emission for Tokenlaw."""

from .plotdata import write_ccdf_csv, write_json, write_plot_data
from .records import read_records, write_records
from .report import read_json_report, write_html_report, write_json_report, write_reports

__all__ = [
    "read_json_report",
    "read_records",
    "write_ccdf_csv",
    "write_html_report",
    "write_json",
    "write_json_report",
    "write_plot_data",
    "write_records",
    "write_reports",
]
