# SPDX-License-Identifier: GPL-3.0+

"""Writers for the CSV data files and JSON records produced by floq."""

import csv
import json
import logging
import math
import os
from typing import Any, Iterable, Sequence

import numpy as np


logger = logging.getLogger(__name__)


def format_number(x: Any) -> str:
    """
    Format a number with 17 significant digits so that it reads back to the
    same double. Integers and strings are passed through.
    """
    if isinstance(x, (str, bool)):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(x) for x in row])
    logger.info("wrote %s", path)
    return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _jsonable(value.real), "im": _jsonable(value.imag)}
    if isinstance(value, (float, np.floating)):
        value = float(value)
        # JSON has no infinities; keep them readable.
        if not math.isfinite(value):
            return str(value)
        return value
    return value


def dump_json(value: Any) -> str:
    return json.dumps(_jsonable(value), indent=2, sort_keys=False) + "\n"


def write_json(path: str, value: Any) -> str:
    with open(path, "w") as f:
        f.write(dump_json(value))
    logger.info("wrote %s", path)
    return path


def ensure_directory(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path
