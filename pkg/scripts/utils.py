from sys import argv
from typing import Callable, List, Optional
import functools
import glob
import os


DATA_PATH = os.path.join(os.path.dirname(os.path.realpath(__file__)), "..", "data")
RUNS_PATH = os.path.join(DATA_PATH, "runs")
OUTPUT_PATH = os.path.join(DATA_PATH, "..", "output")


def run_names() -> List[str]:
    return sorted(
        os.path.splitext(os.path.basename(file))[0]
        for file in glob.glob(os.path.join(RUNS_PATH, "*.json"))
    )


def get_runs(patterns: List[str], runs_path: str = RUNS_PATH) -> List[str]:
    """Run files matching each name or glob pattern, without duplicates."""
    files = []
    for pattern in patterns:
        for file in sorted(glob.glob(os.path.join(runs_path, f"{pattern}.json"))):
            if file not in files:
                files.append(file)
    return files


def output_file(name: str, fmt: str, output_path: str = OUTPUT_PATH) -> str:
    return os.path.join(output_path, f"{name}.{fmt}")


def arguments() -> Optional[List[str]]:
    if len(argv) <= 1:
        print(f"No run provided, choose from: {' '.join(run_names())}")
        return None
    return argv[1:]


def args_handler(func: Callable[[Optional[List[str]]], int]):
    @functools.wraps(func)
    def prep_args(*args, **kwargs):
        return func(arguments())

    return prep_args
