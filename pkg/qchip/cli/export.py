"""Writers for command results: CSV rows or a JSON document."""
import csv
import io
import json
import math
import sys
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional, Sequence, TextIO

import smart_open
from pydantic import BaseModel

from .. import __version__
from ..errors import QchipError
from .events import BaseRequest


class CommandResult(BaseModel, frozen=True):
    columns: List[str]
    records: List[Dict[str, Any]]
    # physicality verdict for commands that report one; the data is still written
    failed: bool = False


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _finite(record: Dict[str, Any]) -> Dict[str, Any]:
    for name, value in record.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise QchipError(f"Column {name} holds non-finite value {value}")
    return record


def to_csv(result: CommandResult) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(result.columns)
    for record in result.records:
        _finite(record)
        writer.writerow([_format_value(record[name]) for name in result.columns])
    return buffer.getvalue()


def to_json(result: CommandResult, request: BaseRequest) -> str:
    document = {
        "metadata": {
            "command": request.command,
            "parameters": json.loads(request.json()),
            "version": __version__,
        },
        "records": [
            {name: _finite(record)[name] for name in result.columns}
            for record in result.records
        ],
    }
    return json.dumps(document, indent=2) + "\n"


def render(result: CommandResult, request: BaseRequest, fmt: str) -> str:
    if fmt == "json":
        return to_json(result, request)
    return to_csv(result)


@contextmanager
def destination(out: Optional[str]) -> Iterator[TextIO]:
    if not out:
        yield sys.stdout
        return
    with smart_open.open(out, "w", newline="") as file:
        yield file


def write(result: CommandResult, request: BaseRequest, fmt: str, out: Optional[str] = None) -> None:
    text = render(result, request, fmt)
    with destination(out) as file:
        file.write(text)


def rows(columns: Sequence[str], values: Sequence[Sequence[Any]]) -> List[Dict[str, Any]]:
    """Pair each row of values with the column names, converting numpy scalars."""
    return [
        {name: (value.item() if hasattr(value, "item") else value) for name, value in zip(columns, row)}
        for row in values
    ]
