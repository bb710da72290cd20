"""
Regenerate figure and table data from the run files in data/runs.

    regenerate surface_chip1 boundary_qbism_minus
    regenerate "*"
"""
import json
import os
from typing import Any, Dict, List, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel

from qchip.cli import execute
from qchip.cli.events import REQUESTS, BaseRequest
from qchip.errors import QchipError, exit_code
from .utils import OUTPUT_PATH, args_handler, get_runs, output_file


class RunFile(BaseModel, frozen=True):
    command: str
    description: str = ""
    format: Optional[Literal["csv", "json"]] = None
    parameters: Dict[str, Any] = {}


def regenerate(files: List[str], output_path: str = OUTPUT_PATH) -> int:
    os.makedirs(output_path, exist_ok=True)
    status = 0
    for file in files:
        name = os.path.splitext(os.path.basename(file))[0]
        with open(file) as fd:
            run_file = RunFile.parse_obj(json.load(fd))

        fmt = run_file.format or REQUESTS.get(run_file.command, BaseRequest).default_format
        out = output_file(name, fmt, output_path)
        print(f"{name}: {run_file.command} -> {out}")
        try:
            status = max(
                status,
                execute(run_file.command, run_file.parameters, format=fmt, out=out),
            )
        except QchipError as e:
            print(f"Error with {name}: {e}")
            status = max(status, exit_code(e))
    return status


@args_handler
def run(names: Optional[List[str]]) -> int:
    if not names:
        return 1
    load_dotenv()
    files = get_runs(names)
    if not files:
        print(f"No run files match {names}")
        return 1
    return regenerate(files)
