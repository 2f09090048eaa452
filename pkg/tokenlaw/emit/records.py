"""Component record files: CSV with a fixed header, or a JSON array."""

import csv
import json
import logging
from pathlib import Path
from typing import List, Sequence, Union

from pydantic import ValidationError

from ..config import ERROR_MESSAGES, RECORD_CSV_HEADER
from ..errors import RecordFormatError
from ..types import ComponentRecord, OutputFormat

logger = logging.getLogger(__name__)


def write_records(
    records: Sequence[ComponentRecord],
    path: Union[str, Path],
    format_type: Union[OutputFormat, str] = OutputFormat.CSV,
) -> Path:
    """Write records as CSV (header ``name,file,t,a_fixed,a_var,a,info``) or JSON.

    Output depends only on the records and their order.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if OutputFormat(format_type) is OutputFormat.JSON:
        with open(path, "w", encoding="utf-8") as f:
            json.dump([record.model_dump() for record in records], f, indent=2, ensure_ascii=False)
            f.write("\n")
    else:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(RECORD_CSV_HEADER)
            for record in records:
                writer.writerow([getattr(record, column) for column in RECORD_CSV_HEADER])
    logger.info(f"Wrote {len(records)} records to {path}")
    return path


def _read_csv(path: Path) -> List[ComponentRecord]:
    records = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = tuple(next(reader, ()))
        if header != RECORD_CSV_HEADER:
            raise RecordFormatError(f"{path}:1: header must be '{','.join(RECORD_CSV_HEADER)}'")
        for row in reader:
            if not row:
                continue
            line = reader.line_num
            if len(row) != len(RECORD_CSV_HEADER):
                raise RecordFormatError(f"{path}:{line}: expected {len(RECORD_CSV_HEADER)} fields, got {len(row)}")
            try:
                records.append(ComponentRecord.model_validate(dict(zip(RECORD_CSV_HEADER, row))))
            except ValidationError as e:
                raise RecordFormatError(f"{path}:{line}: {e.errors()[0]['msg']}") from e
    return records


def _read_json(path: Path) -> List[ComponentRecord]:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise RecordFormatError(ERROR_MESSAGES["invalid_json"].format(file=path, error=e)) from e
    if not isinstance(data, list):
        raise RecordFormatError(f"{path}: expected a JSON array of records")
    records = []
    for index, item in enumerate(data):
        try:
            records.append(ComponentRecord.model_validate(item))
        except ValidationError as e:
            raise RecordFormatError(f"{path}: record {index}: {e.errors()[0]['msg']}") from e
    return records


def read_records(path: Union[str, Path]) -> List[ComponentRecord]:
    """Read a record file written by ``write_records``; the suffix picks the format.

    Raises:
        RecordFormatError: If the file is missing or any row is invalid
    """
    path = Path(path)
    if not path.is_file():
        raise RecordFormatError(ERROR_MESSAGES["file_not_found"].format(file=path))
    records = _read_json(path) if path.suffix.lower() == ".json" else _read_csv(path)
    logger.debug(f"Read {len(records)} records from {path}")
    return records
