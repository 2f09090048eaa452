"""Plot-ready exports of ccdf curves and fits."""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Union

from ..types import CcdfCurve

logger = logging.getLogger(__name__)


def write_plot_data(curve: CcdfCurve, path: Union[str, Path]) -> Path:
    """Two whitespace-separated columns ``ln_s ln_count``, one line per point.

    The first line is a ``#`` comment naming the columns, which gnuplot and
    ``numpy.loadtxt`` both skip.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# ln_s ln_count ({curve.measure.value}, {curve.n_inputs} inputs)"]
    lines.extend(f"{math.log(p.s):.10g} {math.log(p.count):.10g}" for p in curve.points)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug(f"Wrote {len(curve.points)} plot points to {path}")
    return path


def write_ccdf_csv(curve: CcdfCurve, path: Union[str, Path]) -> Path:
    """ccdf points as CSV with header ``s,count``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["s", "count"])
        for point in curve.points:
            writer.writerow([point.s, point.count])
    return path


def write_json(payload: Dict[str, Any], path: Union[str, Path]) -> Path:
    """Write a JSON document such as a fit sidecar or an experiment result."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, ensure_ascii=False)
        f.write("\n")
    logger.info(f"Wrote {path}")
    return path
